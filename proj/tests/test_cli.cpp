#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <fstream>

#include "test_util.hpp"

namespace {

struct RunResult {
    int exitCode = -1;
    std::string out;
    std::string err;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const char* remoraBin() { return std::getenv("REMORA_BIN"); }

RunResult runCli(const std::string& argsAndRedirects) {
    static int counter = 0;
    std::string outPath = "/tmp/remora_cli_out_" + std::to_string(++counter);
    std::string errPath = "/tmp/remora_cli_err_" + std::to_string(counter);
    std::string cmd = std::string(remoraBin()) + " " + argsAndRedirects + " >" + outPath +
                      " 2>" + errPath;
    int status = std::system(cmd.c_str());
    RunResult r;
    r.exitCode = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(outPath);
    r.err = slurp(errPath);
    std::remove(outPath.c_str());
    std::remove(errPath.c_str());
    return r;
}

std::string writeTemp(const std::string& name, const std::string& contents) {
    std::string path = "/tmp/" + name;
    std::ofstream out(path, std::ios::binary);
    out << contents;
    return path;
}

} // namespace

TEST_CASE("cli runs a file and prints its values") {
    if (!remoraBin()) SKIP("REMORA_BIN not set");
    std::string file = writeTemp("cli_basic.rem", "(+ 3 4)\n(vmag [[1 2 2] [2 3 6]])\n");
    RunResult r = runCli(file);
    CHECK(r.exitCode == 0);
    CHECK(r.out == "7\n[3 7]\n");
    CHECK(r.err.empty());
}

TEST_CASE("cli reports Remora errors with exit 1") {
    if (!remoraBin()) SKIP("REMORA_BIN not set");
    std::string file = writeTemp("cli_err.rem", "[[7 1 2]\n [9 5]\n [2 0 5]]\n");
    RunResult r = runCli(file);
    CHECK(r.exitCode == 1);
    CHECK(r.err.find("RaggedLiteral") != std::string::npos);
}

TEST_CASE("cli usage errors exit 2") {
    if (!remoraBin()) SKIP("REMORA_BIN not set");
    CHECK(runCli("--check-only /dev/null").exitCode == 2);
    CHECK(runCli("--no-such-flag").exitCode == 2);
}

TEST_CASE("cli typed dialect checks before running") {
    if (!remoraBin()) SKIP("REMORA_BIN not set");
    std::string bad = writeTemp("cli_typed_bad.rem", "(+ [1 2 3] [[8 1 3] [5 0 9]])\n");
    RunResult r = runCli("--dialect typed --no-prelude " + bad);
    CHECK(r.exitCode == 1);
    CHECK(r.err.find("FrameDisagreement") != std::string::npos);
    CHECK(r.out.empty());

    std::string good =
        writeTemp("cli_typed_good.rem", "(define (double [i int]) (+ i i))\n(double [3 2])\n");
    RunResult ok = runCli("--dialect typed --no-prelude " + good);
    CHECK(ok.exitCode == 0);
    CHECK(ok.out == "[6 4]\n");
    RunResult checkOnly = runCli("--dialect typed --check-only --no-prelude " + good);
    CHECK(checkOnly.exitCode == 0);
    CHECK(checkOnly.out.empty());
}

TEST_CASE("cli REPL over a pipe prints arrow lines and keeps definitions") {
    if (!remoraBin()) SKIP("REMORA_BIN not set");
    std::string script = writeTemp("cli_repl_input.txt",
                                   "(define v (array [3] 8 1 7))\nv\n\n(vmag [1 2 2])\n");
    RunResult r = runCli("< " + script);
    CHECK(r.exitCode == 0);
    CHECK(r.out == "⇒ [8 1 7]\n⇒ 3\n");
}

TEST_CASE("cli REPL continues after errors") {
    if (!remoraBin()) SKIP("REMORA_BIN not set");
    std::string script = writeTemp("cli_repl_err.txt", "(nosuch 1)\n(+ 1 2)\n");
    RunResult r = runCli("< " + script);
    CHECK(r.exitCode == 0);
    CHECK(r.out == "⇒ 3\n");
    CHECK(r.err.find("UnboundVariable") != std::string::npos);
}

TEST_CASE("cli corpus runner passes the golden corpus") {
    if (!remoraBin()) SKIP("REMORA_BIN not set");
    RunResult r = runCli(std::string("corpus ") + REMORA_CORPUS_DIR);
    CHECK(r.exitCode == 0);
    CHECK(r.out.find("FAIL") == std::string::npos);
}

TEST_CASE("cli corpus runner reports missing expectations") {
    if (!remoraBin()) SKIP("REMORA_BIN not set");
    std::string dir = "/tmp/remora_corpus_missing";
    std::filesystem::create_directories(dir);
    writeTemp("remora_corpus_missing/lonely.rem", "(+ 1 2)\n");
    RunResult r = runCli("corpus " + dir);
    CHECK(r.exitCode == 1);
    CHECK(r.out.find("MissingExpectation") != std::string::npos);
}

TEST_CASE("cli --parallel-cells output matches sequential") {
    if (!remoraBin()) SKIP("REMORA_BIN not set");
    std::string file = writeTemp("cli_par.rem",
                                 "(m*m (iota [8 9]) (iota [9 5]))\n(fact [0 3 5 10 7 2])\n");
    RunResult seq = runCli(file);
    RunResult par = runCli("--parallel-cells " + file);
    CHECK(seq.exitCode == 0);
    CHECK(par.exitCode == 0);
    CHECK(seq.out == par.out);
}
