// Remora command-line driver: run files, type-check, REPL, corpus runner.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#ifdef _WIN32
#include <io.h>
#define REMORA_ISATTY _isatty
#define REMORA_FILENO _fileno
#else
#include <unistd.h>
#define REMORA_ISATTY isatty
#define REMORA_FILENO fileno
#endif

#include <CLI11.hpp>

#include "remora/remora.hpp"

namespace {

using namespace remora;

// A source chunk is complete when the only reader complaint left would be
// "more input needed".
bool sourceIncomplete(const std::string& src) {
    try {
        readForms(src);
    } catch (const RemoraError& e) {
        if (e.code() == Err::UnterminatedString) return true;
        if (e.code() == Err::UnbalancedDelimiter &&
            std::string(e.what()).find("unclosed") != std::string::npos)
            return true;
    }
    return false;
}

void printReplValue(const std::string& value) {
    // "=> value", with continuation lines indented to keep brackets aligned
    std::string out = "⇒ ";
    for (char c : value) {
        out.push_back(c);
        if (c == '\n') out += "  ";
    }
    std::cout << out << "\n";
}

int repl(const SessionConfig& cfg) {
    Session session(cfg);
    bool tty = REMORA_ISATTY(REMORA_FILENO(stdin));
    std::string pending;
    std::string line;
    if (tty) std::cout << "Remora REPL. Press Ctrl-D to exit.\n";
    while (true) {
        if (tty) std::cout << (pending.empty() ? "> " : "  ") << std::flush;
        if (!std::getline(std::cin, line)) break;
        pending += line;
        pending += "\n";
        if (sourceIncomplete(pending)) continue;
        std::vector<std::string> results;
        try {
            session.runSource(pending, results);
            for (const std::string& r : results) printReplValue(r);
        } catch (const RemoraError& e) {
            for (const std::string& r : results) printReplValue(r);
            std::cerr << e.diagnostic() << "\n";
        }
        pending.clear();
    }
    if (tty) std::cout << "\n";
    return 0;
}

int corpusMain(const std::string& dir, const SessionConfig& cfg) {
    CorpusReport report;
    try {
        report = runCorpus(dir, cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    for (const CorpusCase& c : report.cases) {
        std::cout << (c.passed ? "pass" : "FAIL") << "  " << c.name << "\n";
        if (!c.passed) std::cout << c.detail;
    }
    std::cout << report.passed << "/" << report.passed + report.failed << " cases passed\n";
    return report.failed == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Remora rank-polymorphic array language"};
    app.name("remora");

    std::string dialect = "dynamic";
    bool checkOnly = false;
    bool noPrelude = false;
    bool parallelCells = false;
    std::vector<std::string> files;

    app.add_option("--dialect", dialect, "dynamic or typed")
        ->check(CLI::IsMember({"dynamic", "typed"}));
    app.add_flag("--check-only", checkOnly, "type-check without evaluating (typed only)");
    app.add_flag("--no-prelude", noPrelude, "start without the Remora prelude");
    app.add_flag("--parallel-cells", parallelCells, "evaluate independent cells on worker threads");
    app.add_option("file", files, "Remora source files (.rem); none starts a REPL");

    CLI::App* corpus = app.add_subcommand("corpus", "run a directory of .rem/.expected cases");
    std::string corpusDir;
    corpus->add_option("dir", corpusDir, "corpus directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : 2;
    }

    SessionConfig cfg;
    cfg.dialect = dialect == "typed" ? Dialect::Typed : Dialect::Dynamic;
    cfg.checkOnly = checkOnly;
    cfg.loadPrelude = !noPrelude;
    cfg.parallelCells = parallelCells;

    if (checkOnly && cfg.dialect != Dialect::Typed) {
        std::cerr << "usage error: --check-only requires --dialect typed\n";
        return 2;
    }

    if (corpus->parsed()) return corpusMain(corpusDir, cfg);

    if (files.empty()) return repl(cfg);

    for (const std::string& file : files) {
        int status = runFile(file, cfg, std::cout, std::cerr);
        if (status != 0) return status;
    }
    return 0;
}
