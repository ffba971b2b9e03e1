#include <catch2/catch_amalgamated.hpp>

#include "test_util.hpp"

using namespace remora;
using rtest::coreEqual;
using rtest::printCore;

namespace {

ExprPtr one(const std::string& src) {
    auto forms = readForms(src);
    REQUIRE(forms.size() == 1);
    return desugar(forms[0]);
}

} // namespace

TEST_CASE("atom literals become scalar array literals") {
    ExprPtr e = one("17");
    const auto* lit = e->as<CoreExpr::ArrayLit>();
    REQUIRE(lit);
    CHECK(lit->shape.isScalar());
    CHECK(std::get<std::int64_t>(lit->atoms[0]) == 17);
    CHECK(coreEqual(e, one("(array [] 17)")));
}

TEST_CASE("nested brackets collapse to one array literal") {
    ExprPtr e = one("[[7 1 2]\n [2 0 5]]");
    const auto* lit = e->as<CoreExpr::ArrayLit>();
    REQUIRE(lit);
    CHECK(lit->shape == Shape{2, 3});
    CHECK(coreEqual(e, one("(array [2 3] 7 1 2 2 0 5)")));
}

TEST_CASE("ragged literals are rejected") {
    try {
        one("[[7 1 2] [9 5] [2 0 5]]");
        FAIL("expected RaggedLiteral");
    } catch (const RemoraError& e) {
        CHECK(e.code() == Err::RaggedLiteral);
    }
}

TEST_CASE("frame arity must match the dims product") {
    try {
        one("(frame [3] 1 2)");
        FAIL("expected BadFrameArity");
    } catch (const RemoraError& e) {
        CHECK(e.code() == Err::BadFrameArity);
    }
}

TEST_CASE("strings become character vectors") {
    ExprPtr e = one("\"abc\"");
    const auto* lit = e->as<CoreExpr::ArrayLit>();
    REQUIRE(lit);
    CHECK(lit->shape == Shape{3});
    CHECK(std::get<char32_t>(lit->atoms[1]) == U'b');
}

TEST_CASE("frames of non-literals survive as frames") {
    ExprPtr e = one("(frame [2] v v)");
    const auto* fr = e->as<CoreExpr::Frame>();
    REQUIRE(fr);
    CHECK(fr->dims == std::vector<std::size_t>{2});
    CHECK(fr->exprs.size() == 2);
}

TEST_CASE("function define sugar") {
    ExprPtr e = one("(define (vmag [v 1]) (square-root (reduce/zero + 0 (square v))))");
    const auto* def = e->as<CoreExpr::Define>();
    REQUIRE(def);
    CHECK(def->name == "vmag");
    const auto* lam = def->expr->as<CoreExpr::Lambda>();
    REQUIRE(lam);
    REQUIRE(lam->params.size() == 1);
    CHECK(lam->params[0].name == "v");
    CHECK(*lam->params[0].rank == CellRank::of(1));
}

TEST_CASE("all-ranked and bare parameters") {
    ExprPtr e = one("(fn ([a all] b) a)");
    const auto* lam = e->as<CoreExpr::Lambda>();
    REQUIRE(lam);
    CHECK(lam->params[0].rank->all);
    CHECK(*lam->params[1].rank == CellRank::of(0)); // bare name is a scalar cell
}

TEST_CASE("rerank desugars to the side-effect-safe let wrapper") {
    ExprPtr e = one("~(1 1)append");
    const auto* let = e->as<CoreExpr::Let>();
    REQUIRE(let);
    REQUIRE(let->bindings.size() == 1);
    CHECK(let->bindings[0].expr->as<CoreExpr::Var>()->name == "append");
    const auto* lam = let->body->as<CoreExpr::Lambda>();
    REQUIRE(lam);
    REQUIRE(lam->params.size() == 2);
    CHECK(*lam->params[0].rank == CellRank::of(1));
    const auto* app = lam->body->as<CoreExpr::App>();
    REQUIRE(app);
    CHECK(app->fn->as<CoreExpr::Var>()->name == let->bindings[0].name);
    CHECK(app->args.size() == 2);
    // the generated names are hygienic: no user symbol may contain '%'
    CHECK(let->bindings[0].name[0] == '%');
}

TEST_CASE("rerank target evaluates once (shared binding)") {
    // matches the paper's safer desugaring shape for a 3-rank rerank
    ExprPtr e = one("~(0 0 2)reduce/zero");
    const auto* let = e->as<CoreExpr::Let>();
    REQUIRE(let);
    const auto* lam = let->body->as<CoreExpr::Lambda>();
    REQUIRE(lam);
    REQUIRE(lam->params.size() == 3);
    CHECK(*lam->params[2].rank == CellRank::of(2));
}

TEST_CASE("box sugar expands to a one-clause boxes form") {
    ExprPtr e = one("(box ((len 3)) [int len] [8 23 0])");
    const auto* boxes = e->as<CoreExpr::Boxes>();
    REQUIRE(boxes);
    REQUIRE(boxes->ivars.size() == 1);
    CHECK(boxes->ivars[0].name == "len");
    CHECK(boxes->dims.empty()); // scalar box array
    REQUIRE(boxes->clauses.size() == 1);
    REQUIRE(boxes->clauses[0].witnesses.size() == 1);
    CHECK(std::get<IndexAst::DimLit>(boxes->clauses[0].witnesses[0]->node).value == 3);
    CHECK(coreEqual(e, one("(boxes (len) [int len] [] ((3) [8 23 0]))")));
}

TEST_CASE("box with no abstracted indices") {
    ExprPtr e = one("(box () int 5)");
    const auto* boxes = e->as<CoreExpr::Boxes>();
    REQUIRE(boxes);
    CHECK(boxes->ivars.empty());
    CHECK(coreEqual(e, one("(boxes () int [] (() 5))")));
}

TEST_CASE("malformed box binders are rejected") {
    auto codeOf = [&](const char* src) {
        try {
            one(src);
        } catch (const RemoraError& e) {
            return e.code();
        }
        return Err::MissingExpectation;
    };
    CHECK(codeOf("(box ((len 3) k) [int len] [8 23 0])") == Err::MalformedBox);
    CHECK(codeOf("(boxes (r c) [int r c] [1] ((2) [[1 2] [3 4]]))") == Err::MalformedBox);
}

TEST_CASE("typed splicing shapes rewrite per the core notation") {
    IndexPtr spliced = desugarIndex(readForms("[d1 @s 5 (+ 1 d2)]")[0]);
    IndexPtr core = desugarIndex(readForms("(++ (shape d1) @s (shape 5 (+ 1 d2)))")[0]);
    CHECK(normalizeShape(spliced) == normalizeShape(core));
    CHECK(normalizeShape(desugarIndex(readForms("[3 4]")[0])) ==
          normalizeShape(desugarIndex(readForms("(shape 3 4)")[0])));
    CHECK(normalizeShape(desugarIndex(readForms("[@s1 @s2]")[0])) ==
          normalizeShape(desugarIndex(readForms("(++ @s1 @s2)")[0])));
    CHECK(normalizeShape(desugarIndex(readForms("[@s]")[0])) ==
          normalizeShape(desugarIndex(readForms("@s")[0])));
}

TEST_CASE("element type in array position means a scalar array") {
    TypePtr sugar = parseType("int");
    TypePtr full = parseType("(A int (shape))");
    CHECK(typeEqual(sugar, full));
    CHECK(typeEqual(parseType("[int 3 4]"), parseType("(A int (shape 3 4))")));
}

TEST_CASE("ranked let binding is a beta-redex of a ranked lambda") {
    ExprPtr e = one("(let ((y 0 coeffs)) x)");
    const auto* app = e->as<CoreExpr::App>();
    REQUIRE(app);
    const auto* lam = app->fn->as<CoreExpr::Lambda>();
    REQUIRE(lam);
    REQUIRE(lam->params.size() == 1);
    CHECK(lam->params[0].name == "y");
    CHECK(*lam->params[0].rank == CellRank::of(0));
    CHECK(app->args[0]->as<CoreExpr::Var>()->name == "coeffs");
}

TEST_CASE("cond requires an else clause") {
    try {
        one("(cond ((zero? x) 1))");
        FAIL("expected MalformedForm");
    } catch (const RemoraError& e) {
        CHECK(e.code() == Err::MalformedForm);
    }
}

TEST_CASE("desugaring printed core is stable (idempotence mod fresh names)") {
    const char* sources[] = {
        "17",
        "[[7 1 2] [2 0 5]]",
        "(define (vmag [v 1]) (square-root (reduce/zero + 0 (square v))))",
        "~(1 1)append",
        "(~(0 1)reduce + [[0 1 2] [0 10 100]])",
        "(box ((len 3)) [int len] [8 23 0])",
        "(let* ((ns (not (char=? #\\space s))) (lns (drop-right1 (append [#t] ns) 1))) "
        "(filter (or ns lns) s))",
        "(if (zero? n) 1 (* n (fact (- n 1))))",
        "(cond ((zero? x) 1) (else 2))",
        "(unbox weekdays (day len) (= 6 (length day)))",
        "(t-app (i-app append 2 7 [3 5]) bool)",
        "(define identity (t-fn (@t) (fn ([x @t]) x)))",
    };
    for (const char* src : sources) {
        ExprPtr first = one(src);
        ExprPtr second = one(printCore(first));
        if (!coreEqual(first, second)) {
            CAPTURE(src, printCore(first), printCore(second));
            CHECK(coreEqual(first, second));
        }
    }
}

TEST_CASE("no sugar survives desugaring") {
    // a frame of equal-shape literals is always collapsed
    ExprPtr e = one("(frame [2] (array [3] 1 2 3) (array [3] 4 5 6))");
    CHECK(e->as<CoreExpr::ArrayLit>());
    // strings never appear in core output
    ExprPtr s = one("[\"ab\" \"cd\"]");
    REQUIRE(s->as<CoreExpr::ArrayLit>());
    CHECK(s->as<CoreExpr::ArrayLit>()->shape == Shape{2, 2});
}
