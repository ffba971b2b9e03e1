#include <catch2/catch_amalgamated.hpp>

#include "test_util.hpp"

using namespace remora;
using rtest::evalStr;
using rtest::fmt;

TEST_CASE("application of scalar function over frames") {
    CHECK(fmt("(+ 3 4)") == "7");
    CHECK(fmt("(+ 10 [7 1 4])") == "[17 11 14]");
    CHECK(fmt("(+ [7 1 4] 10)") == "[17 11 14]");
    CHECK(fmt("(+ [10 20] [[8 1 3] [5 0 9]])") == "[[18 11 13]\n [25 20 29]]");
}

TEST_CASE("if and cond take one scalar-boolean branch") {
    CHECK(fmt("(if (zero? 0) 1 2)") == "1");
    CHECK(fmt("(if (zero? 1) 1 2)") == "2");
    CHECK(fmt("(cond ((zero? 1) 10) ((negative? -3) 20) (else 30))") == "20");
    CHECK(fmt("(cond ((zero? 1) 10) (else 30))") == "30");
    CHECK(rtest::errOf("(if [#t #t] 1 2)") == Err::NonScalarCondition);
    CHECK(rtest::errOf("(if 1 1 2)") == Err::NonScalarCondition);
}

TEST_CASE("let and let* scoping") {
    CHECK(fmt("(let ((x 2) (y 3)) (+ x y))") == "5");
    CHECK(fmt("(let* ((x 2) (y (+ x 1))) (* x y))") == "6");
    // let bindings do not see each other
    CHECK(fmt("(define x 10) (let ((x 1) (y x)) y)") == "10");
}

TEST_CASE("define returns its value, extends the current frame, and recurses") {
    Session s;
    CHECK(formatValue(s.evalSource("(define nine 9)")) == "9");
    CHECK(formatValue(s.evalSource("nine")) == "9");
    CHECK(formatValue(s.evalSource(
              "(define (fct [n 0]) (if (zero? n) 1 (* n (fct (- n 1))))) (fct 6)")) == "720");
}

TEST_CASE("top-level mutual recursion") {
    Session s;
    const char* src =
        "(define (even? [n 0]) (if (zero? n) #t (odd? (- n 1))))"
        "(define (odd? [n 0]) (if (zero? n) #f (even? (- n 1))))"
        "(even? [0 1 2 3 4 5])";
    CHECK(formatValue(s.evalSource(src)) == "[#t #f #t #f #t #f]");
}

TEST_CASE("unbound variables and non-functions are reported") {
    CHECK(rtest::errOf("nosuch") == Err::UnboundVariable);
    CHECK(rtest::errOf("(5 1 2)") == Err::NotAFunction);
    CHECK(rtest::errOf("(+ 1)") == Err::ArityMismatch);
}

TEST_CASE("function-position arrays determine the frame") {
    CHECK(fmt("(define m [[square square-root] [add1 sub1]]) (m 9)") ==
          "[[81 3]\n [10 8]]");
    // mixed ranks in one function array are rejected
    CHECK(rtest::errOf("([+ add1] 1 2)") == Err::HeterogeneousFunctionArray);
}

TEST_CASE("frame disagreement and rank-too-low are detected") {
    CHECK(rtest::errOf("(+ [1 2 3] [[8 1 3] [5 0 9]])") == Err::FrameDisagreement);
    CHECK(rtest::errOf("(dot-product 0 0)") == Err::RankTooLow);
}

TEST_CASE("typed forms cannot be evaluated directly") {
    CHECK(rtest::errOf("(t-app x int)") == Err::TypedFormInDynamicCode);
    CHECK(rtest::errOf("((fn ([x int]) x) 5)") == Err::TypedFormInDynamicCode);
}

TEST_CASE("dynamic boxes and unbox") {
    CHECK(fmt("(unbox (box ((len 3)) [int len] [8 23 0]) (a len) (length a))") == "3");
    CHECK(fmt("(unbox (box ((len 3)) [int len] [8 23 0]) (a len) len)") == "3");
    // witness arity is checked at run time
    CHECK(rtest::errOf("(unbox (box ((len 3)) [int len] [8 23 0]) (a) a)") ==
          Err::WitnessArity);
    CHECK(rtest::errOf("(unbox 5 (a) a)") == Err::NotABox);
}

TEST_CASE("scalar-frame application is plain application") {
    rtest::Rng rng(7);
    Session s;
    ArrayValue f = s.evalSource("(fn ([x 1] [y 1]) (+ (reduce/zero + 0 x) (reduce/zero + 0 y)))");
    Evaluator& ev = s.evaluator();
    for (int i = 0; i < 20; ++i) {
        Shape cell = Shape{rng.range(1, 4)};
        ArrayValue x = rng.intArray(cell);
        ArrayValue y = rng.intArray(cell);
        ArrayValue lifted = ev.liftApply(f, {x, y});
        ArrayValue plain =
            ev.applyCell(*std::get<FunctionRef>(f.atoms[0]), {x, y});
        CHECK(arrayEqual(lifted, plain));
    }
}

namespace {

// Random closures whose bodies depend on whole cells: sums of first atoms,
// sometimes returning cell-shaped results.
std::string randomClosureSource(rtest::Rng& rng, const std::vector<std::size_t>& ranks) {
    std::string params = "(";
    for (std::size_t i = 0; i < ranks.size(); ++i) {
        params += "[x" + std::to_string(i) + " " + std::to_string(ranks[i]) + "]";
        if (i + 1 < ranks.size()) params += " ";
    }
    params += ")";
    // scalarize via with-shape (picks the first atom of each cell)
    std::string body = "(with-shape 0 x0)";
    for (std::size_t i = 1; i < ranks.size(); ++i)
        body = "(+ " + body + " (with-shape 0 x" + std::to_string(i) + "))";
    if (rng.upto(2) == 0)
        body = "(+ x0 " + body + ")"; // cell-shaped result
    return "(fn " + params + " " + body + ")";
}

struct LiftCase {
    ArrayValue fnArr;
    std::vector<ArrayValue> args;
};

LiftCase randomLiftCase(rtest::Rng& rng, Session& s) {
    std::size_t arity = rng.range(1, 3);
    Shape principal = rng.shape(3, 3);
    std::vector<std::size_t> ranks;
    std::vector<ArrayValue> args;
    for (std::size_t i = 0; i < arity; ++i) {
        std::size_t cellRank = rng.upto(3);
        ranks.push_back(cellRank);
        Shape own = principal.prefix(rng.upto(principal.rank()));
        Shape cell = rng.shape(cellRank, 3);
        while (cell.rank() != cellRank) cell = rng.shape(cellRank, 3);
        args.push_back(rng.intArray(own + cell));
    }
    ArrayValue fnArr = s.evalSource(randomClosureSource(rng, ranks));
    if (rng.upto(3) == 0) {
        // non-scalar function array: replicate one closure atom over a prefix
        Shape fshape = principal.prefix(rng.upto(principal.rank()));
        std::vector<Atom> atoms(fshape.elementCount(), fnArr.atoms[0]);
        fnArr = ArrayValue(fshape, std::move(atoms));
    }
    return {fnArr, args};
}

} // namespace

TEST_CASE("property: liftApply agrees with the brute-force oracle") {
    rtest::Rng rng(20240812);
    Session s;
    Evaluator& ev = s.evaluator();
    for (int trial = 0; trial < 300; ++trial) {
        LiftCase c = randomLiftCase(rng, s);
        ArrayValue lifted = ev.liftApply(c.fnArr, c.args);
        ArrayValue oracle = rtest::oracleLift(ev, c.fnArr, c.args);
        if (!arrayEqual(lifted, oracle)) {
            CAPTURE(formatValue(lifted), formatValue(oracle));
            REQUIRE(arrayEqual(lifted, oracle));
        }
    }
}

TEST_CASE("property: cell application order is unobservable") {
    rtest::Rng rng(20240813);
    Session s;
    Evaluator& ev = s.evaluator();
    for (int trial = 0; trial < 100; ++trial) {
        LiftCase c = randomLiftCase(rng, s);
        ArrayValue forward = rtest::oracleLift(ev, c.fnArr, c.args, false);
        ArrayValue backward = rtest::oracleLift(ev, c.fnArr, c.args, true);
        ArrayValue lifted = ev.liftApply(c.fnArr, c.args);
        CHECK(arrayEqual(forward, backward));
        CHECK(arrayEqual(lifted, forward));
    }
}

TEST_CASE("property: reranking with the declared ranks changes nothing") {
    rtest::Rng rng(20240814);
    for (int trial = 0; trial < 60; ++trial) {
        Session s;
        std::size_t arity = rng.range(1, 2);
        std::vector<std::size_t> ranks;
        for (std::size_t i = 0; i < arity; ++i) ranks.push_back(rng.upto(2));
        s.evalSource("(define f " + randomClosureSource(rng, ranks) + ")");
        std::string rankList;
        for (std::size_t i = 0; i < arity; ++i)
            rankList += (i ? " " : "") + std::to_string(ranks[i]);
        Shape frame = rng.shape(2, 3);
        std::string call = " ", rcall = " ";
        std::vector<ArrayValue> args;
        Session probe;
        for (std::size_t i = 0; i < arity; ++i) {
            Shape cell = rng.shape(ranks[i], 3);
            while (cell.rank() != ranks[i]) cell = rng.shape(ranks[i], 3);
            ArrayValue arg = rng.intArray(frame + cell);
            std::string name = "a" + std::to_string(i);
            s.evalSource("(define " + name + " " + formatValue(arg) + ")");
            call += name + " ";
            rcall += name + " ";
        }
        ArrayValue plain = s.evalSource("(f" + call + ")");
        ArrayValue reranked = s.evalSource("(~(" + rankList + ")f" + rcall + ")");
        CHECK(arrayEqual(plain, reranked));
    }
}

TEST_CASE("rerank coherence for builtins with natural ranks") {
    CHECK(fmt("(~(0 0)+ [1 2] [10 20])") == fmt("(+ [1 2] [10 20])"));
    CHECK(fmt("(~(0 0 0)select #t [1 2] [3 4])") == fmt("(select #t [1 2] [3 4])"));
}

TEST_CASE("parallel evaluation is byte-identical to sequential") {
    const char* programs[] = {
        "(vmag [[1 2 2] [2 3 6]])",
        "(poly-eval [2 0 -3] (iota [4 5]))",
        "(m*m (iota [6 7]) (iota [7 3]))",
        "(fact [0 3 5 10 7 2 9 1])",
        "(~(1 1)+ (iota [32]) (iota [32 32]))",
    };
    for (const char* src : programs) {
        Session seq({Dialect::Dynamic, true, false, false});
        Session par({Dialect::Dynamic, true, false, true});
        CHECK(formatValue(seq.evalSource(src)) == formatValue(par.evalSource(src)));
    }
}

TEST_CASE("parallel evaluation reports the error of the lowest frame index") {
    const char* src = "(/ 60 [3 0 5 0])";
    std::string seqMsg, parMsg;
    try {
        Session s({Dialect::Dynamic, false, false, false});
        s.evalSource(src);
    } catch (const RemoraError& e) {
        seqMsg = e.diagnostic();
    }
    try {
        Session s({Dialect::Dynamic, false, false, true});
        s.evalSource(src);
    } catch (const RemoraError& e) {
        parMsg = e.diagnostic();
    }
    CHECK(!seqMsg.empty());
    CHECK(seqMsg == parMsg);
}

TEST_CASE("erase drops type and index applications") {
    auto erased = [](const char* src) {
        return rtest::printCore(Evaluator::erase(desugar(readForms(src)[0])));
    };
    CHECK(erased("(t-app identity [bool 2 3])") == "identity");
    CHECK(erased("(i-app dot-product 3)") == "dot-product");
    CHECK(erased("((t-app (i-app append 2 7 [3 5]) bool) a1 a2)") == "(append a1 a2)");
}

TEST_CASE("erase turns parameter types into cell ranks") {
    ExprPtr e = Evaluator::erase(desugar(readForms("(fn ([i int]) (+ i i))")[0]));
    const auto* lam = e->as<CoreExpr::Lambda>();
    REQUIRE(lam);
    CHECK(*lam->params[0].rank == CellRank::of(0));

    e = Evaluator::erase(desugar(readForms("(fn ([v [int len]] [m [int 2 3]]) v)")[0]));
    lam = e->as<CoreExpr::Lambda>();
    REQUIRE(lam);
    CHECK(*lam->params[0].rank == CellRank::of(1)); // rank known even with a dim variable
    CHECK(*lam->params[1].rank == CellRank::of(2));

    // abstract array types consume their argument whole
    e = Evaluator::erase(desugar(readForms("(t-fn (@t) (fn ([x @t]) x))")[0]));
    lam = e->as<CoreExpr::Lambda>();
    REQUIRE(lam);
    CHECK(lam->params[0].rank->all);
}

TEST_CASE("erase instantiates literal type abstractions") {
    // syntactic t-app over a t-fn pins the parameter rank down
    ExprPtr e = Evaluator::erase(
        desugar(readForms("(t-app (t-fn (@t) (fn ([x @t]) x)) [bool 2 3])")[0]));
    const auto* lam = e->as<CoreExpr::Lambda>();
    REQUIRE(lam);
    CHECK(*lam->params[0].rank == CellRank::of(2));
}

TEST_CASE("erased unbox keeps value and witness binders") {
    ExprPtr e = Evaluator::erase(desugar(readForms(
        "(unbox weekdays (day len) (= 6 ((t-app (i-app length len []) char) day)))")[0]));
    CHECK(rtest::printCore(e) == "(unbox weekdays (day len) (= 6 (length day)))");
}
