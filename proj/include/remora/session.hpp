#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "remora/desugar.hpp"
#include "remora/eval.hpp"
#include "remora/format.hpp"
#include "remora/prelude.hpp"
#include "remora/typecheck.hpp"

namespace remora {

struct SessionConfig {
    Dialect dialect = Dialect::Dynamic;
    bool loadPrelude = true;
    bool checkOnly = false;
    bool parallelCells = false;
};

// One interpreter instance: persistent environments, shared by file runs and
// the REPL. In the typed dialect each form is checked, erased, then run.
class Session {
public:
    explicit Session(SessionConfig cfg = {})
        : cfg_(cfg), ev_(EvalConfig{cfg.dialect, cfg.parallelCells}) {
        env_ = childEnv(makeGlobalEnv());
        if (cfg_.dialect == Dialect::Typed) tenv_ = makeGlobalTypeEnv();
        // the prelude is dynamic-dialect code; typed sessions start bare
        if (cfg_.loadPrelude && cfg_.dialect == Dialect::Dynamic) {
            std::vector<std::string> sink;
            runSource(preludeSource(), sink);
        }
    }

    const SessionConfig& config() const { return cfg_; }

    // Evaluate every form; formatted non-define results are appended to out.
    void runSource(const std::string& source, std::vector<std::string>& out) {
        for (const SurfaceForm& form : readForms(source)) runForm(form, out);
    }

    void runForm(const SurfaceForm& form, std::vector<std::string>& out) {
        ExprPtr core = desugar(form);
        if (cfg_.dialect == Dialect::Typed) {
            checker_.check(*core, tenv_);
            if (cfg_.checkOnly) return;
            core = Evaluator::erase(core);
        }
        ArrayValue value = ev_.evaluate(*core, env_);
        if (!core->as<CoreExpr::Define>()) out.push_back(formatValue(value));
    }

    // Library entry points used by tests.
    ArrayValue evalSource(const std::string& source) {
        ArrayValue last;
        for (const SurfaceForm& form : readForms(source)) {
            ExprPtr core = desugar(form);
            if (cfg_.dialect == Dialect::Typed) {
                checker_.check(*core, tenv_);
                core = Evaluator::erase(core);
            }
            last = ev_.evaluate(*core, env_);
        }
        return last;
    }

    TypePtr checkSource(const std::string& source) {
        TypePtr last;
        for (const SurfaceForm& form : readForms(source))
            last = checker_.check(*desugar(form), tenv_);
        return last;
    }

    EnvPtr environment() { return env_; }
    Evaluator& evaluator() { return ev_; }

private:
    SessionConfig cfg_;
    Evaluator ev_;
    EnvPtr env_;
    TypeEnv tenv_;
    TypeChecker checker_;
};

// ---------------------------------------------------------------------------
// File and corpus driving.

inline std::string readFileText(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(Err::MissingExpectation, "cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Exit status 0: ok, 1: Remora-level error (diagnostic on err stream).
inline int runFile(const std::filesystem::path& path, const SessionConfig& cfg,
                   std::ostream& out, std::ostream& err) {
    Session session(cfg);
    std::vector<std::string> results;
    try {
        session.runSource(readFileText(path), results);
    } catch (const RemoraError& e) {
        for (const std::string& r : results) out << r << "\n";
        err << e.diagnostic() << "\n";
        return 1;
    }
    for (const std::string& r : results) out << r << "\n";
    return 0;
}

struct CorpusCase {
    std::string name;
    bool passed = false;
    std::string detail; // populated on failure
};

struct CorpusReport {
    std::vector<CorpusCase> cases;
    std::size_t passed = 0;
    std::size_t failed = 0;
};

// Run one .rem program and render what the corpus compares: the formatted
// values (one per line), or "ERROR <code>" when evaluation fails.
inline std::string corpusActualOutput(const std::string& source, const SessionConfig& cfg) {
    Session session(cfg);
    std::vector<std::string> results;
    try {
        session.runSource(source, results);
    } catch (const RemoraError& e) {
        return std::string("ERROR ") + errName(e.code()) + "\n";
    }
    std::string out;
    for (const std::string& r : results) out += r + "\n";
    return out;
}

inline CorpusReport runCorpus(const std::filesystem::path& dir, const SessionConfig& cfg) {
    CorpusReport report;
    std::vector<std::filesystem::path> programs;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
        if (entry.path().extension() == ".rem") programs.push_back(entry.path());
    std::sort(programs.begin(), programs.end());
    for (const auto& program : programs) {
        CorpusCase c;
        c.name = program.stem().string();
        std::filesystem::path expectedPath = program;
        expectedPath.replace_extension(".expected");
        if (!std::filesystem::exists(expectedPath)) {
            c.detail = "MissingExpectation: no " + expectedPath.filename().string();
            report.cases.push_back(c);
            ++report.failed;
            continue;
        }
        std::string expected = readFileText(expectedPath);
        std::string actual = corpusActualOutput(readFileText(program), cfg);
        if (actual == expected) {
            c.passed = true;
            ++report.passed;
        } else {
            c.detail = "expected:\n" + expected + "actual:\n" + actual;
            ++report.failed;
        }
        report.cases.push_back(std::move(c));
    }
    return report;
}

// Concatenated output of the whole corpus, for determinism comparisons.
inline std::string corpusOutput(const std::filesystem::path& dir, const SessionConfig& cfg) {
    std::vector<std::filesystem::path> programs;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
        if (entry.path().extension() == ".rem") programs.push_back(entry.path());
    std::sort(programs.begin(), programs.end());
    std::string out;
    for (const auto& program : programs) {
        out += ";; " + program.filename().string() + "\n";
        out += corpusActualOutput(readFileText(program), cfg);
    }
    return out;
}

} // namespace remora
