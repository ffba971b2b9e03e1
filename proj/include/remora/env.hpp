#pragma once

#include <memory>
#include <string>
#include <unordered_map>

#include "remora/value.hpp"

namespace remora {

// Lexically scoped name->array frames. Lookup is innermost-first; define
// extends the current frame only (redefinition in the same frame is allowed,
// which is what a REPL wants).
struct Environment {
    std::unordered_map<std::string, ArrayValue> vars;
    std::shared_ptr<Environment> parent;

    explicit Environment(std::shared_ptr<Environment> p = nullptr) : parent(std::move(p)) {}

    const ArrayValue* lookup(const std::string& name) const {
        for (const Environment* e = this; e; e = e->parent.get()) {
            auto it = e->vars.find(name);
            if (it != e->vars.end()) return &it->second;
        }
        return nullptr;
    }

    void define(const std::string& name, ArrayValue value) {
        vars.insert_or_assign(name, std::move(value));
    }
};

using EnvPtr = std::shared_ptr<Environment>;

inline EnvPtr childEnv(EnvPtr parent) { return std::make_shared<Environment>(std::move(parent)); }

} // namespace remora
