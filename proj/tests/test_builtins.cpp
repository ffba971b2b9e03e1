#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <numeric>

#include "test_util.hpp"

using namespace remora;
using rtest::errOf;
using rtest::evalStr;
using rtest::fmt;

TEST_CASE("scalar arithmetic") {
    CHECK(fmt("(+ 2 8)") == "10");
    CHECK(fmt("(- 5 9)") == "-4");
    CHECK(fmt("(* 6 7)") == "42");
    CHECK(fmt("(square 9)") == "81");
    CHECK(fmt("(square-root 9)") == "3");
    CHECK(fmt("(add1 9)") == "10");
    CHECK(fmt("(sub1 9)") == "8");
    CHECK(fmt("(expt 2 [0 1 2 3])") == "[1 2 4 8]");
    CHECK(errOf("(+ 1 #t)") == Err::TypeMismatchAtom);
}

TEST_CASE("numeric tower: ints stay ints, mixes promote") {
    CHECK(fmt("(/ 6 3)") == "2");            // exactly divisible stays Int
    CHECK(fmt("(/ 2 3)") == fmt("0.6666666666666666"));
    CHECK(fmt("(+ 1 2.5)") == "3.5");
    CHECK(fmt("(square-root 2)") == fmt("1.4142135623730951"));
    CHECK(fmt("(square-root 2.25)") == "1.5");
    CHECK(fmt("(vmag [3 4])") == "5");        // perfect square comes back as Int
    CHECK(fmt("(expt 2 -1)") == "0.5");
    CHECK(errOf("(/ 1 0)") == Err::DivisionByZero);
    CHECK(errOf("(/ 1.0 0.0)") == Err::DivisionByZero);
    CHECK(errOf("(square-root -4)") == Err::NegativeSqrt);
}

TEST_CASE("predicates and logic") {
    CHECK(fmt("(= 3 3)") == "#t");
    CHECK(fmt("(< 1 2)") == "#t");
    CHECK(fmt("(> 1 2)") == "#f");
    CHECK(fmt("(zero? 0)") == "#t");
    CHECK(fmt("(negative? -3)") == "#t");
    CHECK(fmt("(not #f)") == "#t");
    CHECK(fmt("(and #t #f)") == "#f");
    CHECK(fmt("(or #t #f)") == "#t");
    CHECK(fmt("(char=? #\\space #\\a)") == "#f");
    CHECK(fmt("(char=? #\\q #\\q)") == "#t");
    CHECK(errOf("(and 1 #t)") == Err::TypeMismatchAtom);
}

TEST_CASE("select") {
    CHECK(fmt("(select #t 3 4)") == "3");
    CHECK(fmt("(select #f [8 1 2] [20 3 9])") == "[20 3 9]");
    CHECK(fmt("(select [#t #f #f #t #t] [0 1 2 3 4] 100)") == "[0 100 100 3 4]");
}

TEST_CASE("append") {
    CHECK(fmt("(append [1 2] [3 4 5])") == "[1 2 3 4 5]");
    ArrayValue r = evalStr("(append (iota [3 5]) (iota [7 5]))");
    CHECK(r.shape == Shape{10, 5});
    CHECK(errOf("(append 1 2)") == Err::RankZeroAppend);
    CHECK(errOf("(append [1 2] [[1 2] [3 4]])") == Err::TrailingShapeMismatch);
    CHECK(errOf("(append (iota [2 3]) (iota [2 4]))") == Err::TrailingShapeMismatch);
}

TEST_CASE("length") {
    CHECK(fmt("(length (iota [3 5]))") == "3");
    CHECK(fmt("(length [8 1 7])") == "3");
    CHECK(fmt("(length \"Wednesday\")") == "9");
    CHECK(errOf("(length 5)") == Err::RankZeroLength);
}

TEST_CASE("iota") {
    CHECK(fmt("(iota [5])") == "[0 1 2 3 4]");
    CHECK(fmt("(iota [2 3])") == "[[0 1 2]\n [3 4 5]]");
    CHECK(fmt("(iota [])") == "0"); // empty shape spec: the scalar 0
    CHECK(errOf("(iota [-1])") == Err::NegativeDimension);
}

TEST_CASE("property: iota atoms count the row-major positions") {
    rtest::Rng rng(91);
    Session s;
    for (int trial = 0; trial < 50; ++trial) {
        Shape spec = rng.shape(3, 5, 0);
        std::string dims;
        for (std::size_t d : spec.dims) dims += " " + std::to_string(d);
        ArrayValue r = s.evalSource("(iota [" + dims + "])");
        CHECK(r.shape == spec);
        for (std::size_t i = 0; i < r.atoms.size(); ++i)
            CHECK(std::get<std::int64_t>(r.atoms[i]) == static_cast<std::int64_t>(i));
    }
}

TEST_CASE("iota0..iota9 box their result with dimension witnesses") {
    CHECK(fmt("(unbox (iota1 5) (v len) v)") == "[0 1 2 3 4]");
    CHECK(fmt("(unbox (iota1 5) (v len) len)") == "5");
    CHECK(fmt("(unbox (iota2 2 3) (m r c) (+ r c))") == "5");
    CHECK(fmt("(unbox (iota0) (x) x)") == "0");
    CHECK(fmt("(iota1 3)") == "(box (3) [0 1 2])");
}

TEST_CASE("indices-of") {
    CHECK(fmt("(indices-of [10 20 30])") == "[[0]\n [1]\n [2]]");
    ArrayValue m = evalStr("(indices-of (iota [2 3]))");
    CHECK(m.shape == Shape{2, 3, 2});
    ArrayValue s = evalStr("(indices-of 5)");
    CHECK(s.shape == Shape{0}); // scalar source: empty index vectors
    CHECK(fmt("(indices-of/1 [10 20 30])") == "[[0]\n [1]\n [2]]");
    // the rank-monomorphic variants lift over higher-rank input
    ArrayValue lifted = evalStr("(indices-of/1 (iota [2 3]))");
    CHECK(lifted.shape == Shape{2, 3, 1});
}

TEST_CASE("property: indexing by indices-of reconstructs the array") {
    rtest::Rng rng(92);
    Session s;
    for (int trial = 0; trial < 50; ++trial) {
        ArrayValue a = rng.intArray(rng.shape(3, 4));
        s.environment()->define("a", a);
        ArrayValue back = s.evalSource("(index a (indices-of a))");
        CHECK(arrayEqual(back, a));
    }
}

TEST_CASE("rotate") {
    CHECK(fmt("(rotate [2 3 4 5 11] [2])") == "[4 5 11 2 3]");
    CHECK(fmt("(rotate [[2 3 4 5 11] [1 4 9 16 25]] [1 0])") ==
          "[[1 4 9 16 25]\n [2 3 4 5 11]]");
    CHECK(fmt("(rotate [2 3 5 7] [[0] [1] [2]])") == "[[2 3 5 7]\n [3 5 7 2]\n [5 7 2 3]]");
    CHECK(fmt("(rotate [1 2 3] [-1])") == "[3 1 2]"); // negative amounts wrap
    CHECK(errOf("(rotate [1 2 3] [1 2])") == Err::RotationArity);
}

TEST_CASE("property: rotating by v then -v is the identity") {
    rtest::Rng rng(93);
    Session s;
    for (int trial = 0; trial < 50; ++trial) {
        ArrayValue a = rng.intArray(rng.shape(3, 4));
        std::vector<std::int64_t> amounts;
        for (std::size_t i = 0; i < a.rank(); ++i) amounts.push_back(rng.intIn(-7, 7));
        std::string v = "[", nv = "[";
        for (std::size_t i = 0; i < amounts.size(); ++i) {
            v += (i ? " " : "") + std::to_string(amounts[i]);
            nv += (i ? " " : "") + std::to_string(-amounts[i]);
        }
        v += "]";
        nv += "]";
        s.environment()->define("a", a);
        if (a.rank() == 0) continue; // rotation vector [] is fine but trivial
        ArrayValue back = s.evalSource("(rotate (rotate a " + v + ") " + nv + ")");
        CHECK(arrayEqual(back, a));
    }
}

TEST_CASE("with-shape") {
    CHECK(fmt("(with-shape [1 1 1 1] 7)") == "[7 7 7 7]");
    CHECK(fmt("(with-shape [[9 9] [9 9]] [1 2 3])") == "[[1 2]\n [3 1]]");
    CHECK(fmt("(with-shape 5 9)") == "9");
    CHECK(errOf("(with-shape [1 2] (filter [#f] [1]))") == Err::EmptyDataSource);
}

TEST_CASE("edge operations: take, drop, drop-right, mirror") {
    CHECK(fmt("(drop-right1 [1 2 3] 0)") == "[1 2 3]");
    CHECK(fmt("(drop-right1 (append [#t] [#f #t #f]) 1)") == "[#t #f #t]");
    CHECK(fmt("(take [[1 2] [3 4]] [1 2])") == "[[1 2]]");
    CHECK(fmt("(drop [[1 2] [3 4]] [1 0])") == "[[3 4]]");
    CHECK(fmt("(drop-right [[1 2] [3 4]] [0 1])") == "[[1]\n [3]]");
    CHECK(fmt("(mirror [1 2 3] [#t])") == "[3 2 1]");
    CHECK(fmt("(mirror [[1 2] [3 4]] [#f #t])") == "[[2 1]\n [4 3]]");
    CHECK(errOf("(drop-right1 [1 2 3] 4)") == Err::CountOutOfRange);
    CHECK(errOf("(take [[1 2] [3 4]] [1])") == Err::ArityMismatch);
    CHECK(errOf("(drop-right1 5 1)") == Err::RankZeroData);
}

TEST_CASE("index") {
    Session s;
    s.evalSource("(define a [[[1 10 100 1000] [2 20 200 2000]]"
                 " [[0 2 4 6] [1 3 5 7]] [[30 31 32 33] [40 41 42 43]]])");
    CHECK(formatValue(s.evalSource("(index a [1 1 2])")) == "5");
    CHECK(formatValue(s.evalSource("(index a [[1 1 2] [1 1 2] [0 1 3]])")) == "[5 5 2000]");
    CHECK(formatValue(s.evalSource("(index a [2 1])")) == "[40 41 42 43]");
    CHECK(formatValue(s.evalSource("(~[2 1]index a [0 2])")) == "[100 4 32]");
    CHECK(formatValue(s.evalSource("(index a [])")).substr(0, 3) == "[[[");
    CHECK(errOf("(index [1 2 3] [5])") == Err::IndexOutOfBounds);
    CHECK(errOf("(index [1 2 3] [0 0])") == Err::IndexTooLong);
}

TEST_CASE("index-item") {
    CHECK(fmt("(index-item [9] 0)") == "9");
    CHECK(fmt("(index-item [3 1 4 1] (grade < [3 1 4 1]))") == "[1 1 3 4]");
    CHECK(errOf("(index-item 5 0)") == Err::RankZeroSource);
    CHECK(errOf("(index-item [1 2] 2)") == Err::IndexOutOfBounds);
}

TEST_CASE("subarray family") {
    CHECK(fmt("(subarray [1 2 3 4 5] [1] [3])") == "[2 3 4]");
    CHECK(fmt("(subarray/wrap [1 2 3] [2] [3])") == "[3 1 2]");
    CHECK(fmt("(subarray/fill [1 2 3] [2] [3] 0)") == "[3 0 0]");
    CHECK(fmt("(subarray/wrap [1 2 3] [-1] [2])") == "[3 1]");
    CHECK(errOf("(subarray [1 2 3] [2] [3])") == Err::RegionOutOfBounds);
    CHECK(errOf("(subarray [1 2 3] [0 0] [1])") == Err::ArityMismatch);
}

TEST_CASE("filter") {
    CHECK(fmt("(filter [#t #f #t] [1 2 3])") == "[1 3]");
    CHECK(fmt("(filter [#f #f] [1 2])") == "#(shape 0)[]");
    CHECK(errOf("(filter [#t #f] [1 2 3])") == Err::SelectorLengthMismatch);
    CHECK(errOf("(filter [#t] 5)") == Err::RankZeroData);
}

TEST_CASE("partition returns two boxed halves") {
    Session s;
    s.evalSource("(define halves (partition [#t #f #t] [1 2 3]))");
    CHECK(formatValue(s.evalSource("(unbox (index-item halves 0) (a n) a)")) == "[1 3]");
    CHECK(formatValue(s.evalSource("(unbox (index-item halves 1) (a n) a)")) == "[2]");
    CHECK(formatValue(s.evalSource("(unbox halves (a n) n)")) == "[2 1]");
    // all-true: second half is empty but keeps the item shape
    ArrayValue empty = s.evalSource("(unbox (index-item (partition [#t #t] (iota [2 3])) 1) (a n) a)");
    CHECK(empty.shape == Shape{0, 3});
    CHECK(errOf("(partition [#t] [1 2])") == Err::SelectorLengthMismatch);
}

TEST_CASE("replicate") {
    CHECK(fmt("(replicate [1 3 0 2] [20 73 99 14])") == "[20 73 73 73 14 14]");
    CHECK(fmt("(replicate [1 1 1] [1 2 3])") == "[1 2 3]");
    ArrayValue empty = evalStr("(replicate [0 0] (iota [2 3]))");
    CHECK(empty.shape == Shape{0, 3});
    CHECK(errOf("(replicate [1 2] [1 2 3])") == Err::SelectorLengthMismatch);
    CHECK(errOf("(replicate [-1 1] [1 2])") == Err::NegativeCount);
}

TEST_CASE("property: filter equals replicate with 0/1 counts") {
    rtest::Rng rng(94);
    Session s;
    for (int trial = 0; trial < 50; ++trial) {
        std::size_t n = rng.range(1, 6);
        Shape shape = Shape{n} + rng.shape(2, 3);
        ArrayValue a = rng.intArray(shape);
        std::string ks = "[";
        for (std::size_t i = 0; i < n; ++i) ks += (i ? " " : "") + std::string(rng.upto(1) ? "#t" : "#f");
        ks += "]";
        s.environment()->define("a", a);
        ArrayValue filtered = s.evalSource("(filter " + ks + " a)");
        ArrayValue replicated = s.evalSource("(replicate (select " + ks + " 1 0) a)");
        CHECK(arrayEqual(filtered, replicated));
    }
}

TEST_CASE("reduce family") {
    CHECK(fmt("(reduce + [1 4 9 16])") == "30");
    CHECK(fmt("(reduce * [1 4 9 16])") == "576");
    CHECK(fmt("(reduce + [[1 2 3] [10 20 30] [100 200 300]])") == "[111 222 333]");
    CHECK(fmt("(reduce/zero * 1 (+ 1 (iota [5])))") == "120");
    CHECK(fmt("(reduce/zero + 0 (filter [#f] [(iota [3])]))") == "0"); // empty gives z back
    CHECK(errOf("(reduce + (drop-right1 [1] 1))") == Err::EmptyReduce);
    CHECK(errOf("(reduce + 5)") == Err::RankZeroData);
}

TEST_CASE("fold family") {
    CHECK(fmt("(fold (fn ([v 1] [sum 0]) (+ sum (vmag v))) 0 [[1 2 2] [2 3 6]])") == "10");
    CHECK(fmt("(fold-right (fn ([coeff 0] [acc 0]) (+ coeff (* 1 acc))) 0 [2 0 -3])") == "-1");
    CHECK(fmt("(fold + 7 (drop-right1 [1] 1))") == "7"); // empty leading dim gives z
    // fold is left-to-right, fold-right right-to-left
    CHECK(fmt("(fold - 0 [1 2 3])") == "2");        // 3 - (2 - (1 - 0))
    CHECK(fmt("(fold-right - 0 [1 2 3])") == "2");  // 1 - (2 - (3 - 0))
    CHECK(fmt("(fold append [0] [[1] [2] [3]])") == "[3 2 1 0]");
    CHECK(fmt("(fold-right append [0] [[1] [2] [3]])") == "[1 2 3 0]");
}

TEST_CASE("scan family") {
    CHECK(fmt("(iscan + [2 10 5])") == "[2 12 17]");
    CHECK(fmt("(scan/zero + 0 [2 10 5])") == "[0 2 12 17]");
    CHECK(fmt("(open-scan/zero * 1 [3 3 3 3])") == "[1 3 9 27]");
    CHECK(errOf("(iscan + (drop-right1 [1] 1))") == Err::EmptyReduce);
}

TEST_CASE("trace family") {
    CHECK(fmt("(trace + 0 [2 10 5])") == "[0 2 12 17]");
    CHECK(fmt("(trace + 9 (drop-right1 [1] 1))") == "[9]");
    // successive Horner accumulators from the right end
    CHECK(fmt("(trace-right (fn ([coeff 0] [acc 0]) (+ coeff (* 1 acc))) 0 [2 0 -3])") ==
          "[0 -3 -3 -1]");
}

TEST_CASE("property: scan/reduce algebra on random data") {
    rtest::Rng rng(95);
    Session s;
    for (int trial = 0; trial < 100; ++trial) {
        std::size_t n = rng.range(1, 6);
        Shape shape = rng.upto(1) ? Shape{n} : Shape{n, rng.range(1, 4)};
        ArrayValue a = rng.intArray(shape, -20, 20);
        s.environment()->define("a", a);
        for (const char* op : {"+", "*"}) {
            std::string o(op);
            ArrayValue red = s.evalSource("(reduce " + o + " a)");
            ArrayValue isc = s.evalSource("(iscan " + o + " a)");
            ArrayValue lastScan = s.evalSource("(index-item (iscan " + o + " a) " +
                                               std::to_string(n - 1) + ")");
            CHECK(arrayEqual(red, lastScan));

            // z with the item shape, so scans of matrices stay rectangular
            std::string z = o == "+" ? "(with-shape (index-item a 0) 0)"
                                     : "(with-shape (index-item a 0) 1)";
            ArrayValue scan = s.evalSource("(scan/zero " + o + " " + z + " a)");
            ArrayValue open = s.evalSource("(open-scan/zero " + o + " " + z + " a)");
            ArrayValue scanInit = s.evalSource("(drop-right1 (scan/zero " + o + " " + z + " a) 1)");
            CHECK(arrayEqual(open, scanInit));

            ArrayValue traced = s.evalSource("(trace " + o + " " + z + " a)");
            CHECK(arrayEqual(traced, scan));

            // association independence: balanced tree equals both linear folds
            ArrayValue leftFold = s.evalSource("(fold " + o + " " + z + " a)");
            ArrayValue rightFold = s.evalSource("(fold-right " + o + " " + z + " a)");
            CHECK(arrayEqual(red, leftFold));
            CHECK(arrayEqual(red, rightFold));
        }
    }
}

TEST_CASE("grade and sort") {
    CHECK(fmt("(grade < [3 1 4 1])") == "[1 3 0 2]");
    CHECK(fmt("(sort < [3 1 4 1])") == "[1 1 3 4]");
    CHECK(fmt("(sort < [7])") == "[7]");
    CHECK(errOf("(grade < 5)") == Err::RankZeroData);
    // stability: an always-false comparator returns the identity permutation
    CHECK(fmt("(grade (fn (x y) #f) [5 3 5 1])") == "[0 1 2 3]");
}

TEST_CASE("property: sort agrees with a comparison-sort oracle and is idempotent") {
    rtest::Rng rng(96);
    Session s;
    for (int trial = 0; trial < 50; ++trial) {
        std::size_t n = rng.range(1, 8);
        ArrayValue a = rng.intArray(Shape{n});
        s.environment()->define("a", a);
        ArrayValue sorted = s.evalSource("(sort < a)");
        std::vector<std::int64_t> oracle;
        for (const Atom& atom : a.atoms) oracle.push_back(std::get<std::int64_t>(atom));
        std::sort(oracle.begin(), oracle.end());
        REQUIRE(sorted.atoms.size() == oracle.size());
        for (std::size_t i = 0; i < oracle.size(); ++i)
            CHECK(std::get<std::int64_t>(sorted.atoms[i]) == oracle[i]);
        s.environment()->define("sorted", sorted);
        CHECK(arrayEqual(s.evalSource("(sort < sorted)"), sorted));
    }
}

TEST_CASE("dialect-dependent boxing: typed registry boxes iota/indices-of/filter") {
    Session typed({Dialect::Typed, false, false, false});
    CHECK(formatValue(typed.evalSource("((t-app (i-app filter 3 []) int) [#t #f #t] [1 2 3])")) ==
          "(box (2) [1 3])");
    Session dynamic;
    CHECK(formatValue(dynamic.evalSource("(filter [#t #f #t] [1 2 3])")) == "[1 3]");
}
