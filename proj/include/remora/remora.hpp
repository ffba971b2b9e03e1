#pragma once

// Umbrella header for the Remora interpreter library.

#include "remora/error.hpp"
#include "remora/reader.hpp"
#include "remora/value.hpp"
#include "remora/frame.hpp"
#include "remora/ast.hpp"
#include "remora/desugar.hpp"
#include "remora/env.hpp"
#include "remora/eval.hpp"
#include "remora/normalize.hpp"
#include "remora/typecheck.hpp"
#include "remora/format.hpp"
#include "remora/prelude.hpp"
#include "remora/session.hpp"
