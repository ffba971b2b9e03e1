#pragma once

#include <cmath>
#include <cstdlib>
#include <unordered_map>

#include "remora/eval.hpp"

namespace remora {

namespace bi {

using Cells = std::vector<ArrayValue>;

inline std::int64_t wantInt(const Atom& a, SourcePos pos) {
    if (const auto* i = std::get_if<std::int64_t>(&a)) return *i;
    fail(Err::TypeMismatchAtom, "integer expected", pos);
}

inline bool wantBool(const Atom& a, SourcePos pos) {
    if (const auto* b = std::get_if<bool>(&a)) return *b;
    fail(Err::TypeMismatchAtom, "boolean expected", pos);
}

inline char32_t wantChar(const Atom& a, SourcePos pos) {
    if (const auto* c = std::get_if<char32_t>(&a)) return *c;
    fail(Err::TypeMismatchAtom, "character expected", pos);
}

inline void wantNumeric(const Atom& a, SourcePos pos) {
    if (!isNumeric(a)) fail(Err::TypeMismatchAtom, "number expected", pos);
}

inline std::vector<std::int64_t> intVector(const ArrayValue& v, SourcePos pos) {
    std::vector<std::int64_t> out;
    out.reserve(v.atoms.size());
    for (const Atom& a : v.atoms) out.push_back(wantInt(a, pos));
    return out;
}

inline std::int64_t mathMod(std::int64_t x, std::int64_t m) {
    std::int64_t r = x % m;
    return r < 0 ? r + m : r;
}

// Items of an array: its rank-(r-1) subarrays along the leading dimension.
inline std::vector<ArrayValue> itemsOf(const ArrayValue& a) {
    return splitCells(a, CellRank::of(a.rank() - 1)).cells;
}

inline ArrayValue boxed(ArrayValue contents, std::vector<Witness> ws) {
    BoxValue box{std::move(contents), std::move(ws)};
    return ArrayValue::scalar(Atom(std::make_shared<const BoxValue>(std::move(box))));
}

// --- scalar arithmetic ------------------------------------------------------

inline Atom numAdd(const Atom& a, const Atom& b) {
    if (std::holds_alternative<std::int64_t>(a) && std::holds_alternative<std::int64_t>(b))
        return Atom(std::get<std::int64_t>(a) + std::get<std::int64_t>(b));
    return Atom(asDouble(a) + asDouble(b));
}

inline Atom numSub(const Atom& a, const Atom& b) {
    if (std::holds_alternative<std::int64_t>(a) && std::holds_alternative<std::int64_t>(b))
        return Atom(std::get<std::int64_t>(a) - std::get<std::int64_t>(b));
    return Atom(asDouble(a) - asDouble(b));
}

inline Atom numMul(const Atom& a, const Atom& b) {
    if (std::holds_alternative<std::int64_t>(a) && std::holds_alternative<std::int64_t>(b))
        return Atom(std::get<std::int64_t>(a) * std::get<std::int64_t>(b));
    return Atom(asDouble(a) * asDouble(b));
}

// Integer division stays integral when exact, otherwise falls to a float.
inline Atom numDiv(const Atom& a, const Atom& b, SourcePos pos) {
    if (std::holds_alternative<std::int64_t>(a) && std::holds_alternative<std::int64_t>(b)) {
        std::int64_t x = std::get<std::int64_t>(a);
        std::int64_t y = std::get<std::int64_t>(b);
        if (y == 0) fail(Err::DivisionByZero, "division by zero", pos);
        if (x % y == 0) return Atom(x / y);
        return Atom(static_cast<double>(x) / static_cast<double>(y));
    }
    double y = asDouble(b);
    if (y == 0.0) fail(Err::DivisionByZero, "division by zero", pos);
    return Atom(asDouble(a) / y);
}

inline Atom numExpt(const Atom& a, const Atom& b, SourcePos pos) {
    if (std::holds_alternative<std::int64_t>(a) && std::holds_alternative<std::int64_t>(b)) {
        std::int64_t base = std::get<std::int64_t>(a);
        std::int64_t exp = std::get<std::int64_t>(b);
        if (exp >= 0) {
            std::int64_t result = 1;
            std::int64_t acc = base;
            for (std::int64_t e = exp; e > 0; e >>= 1) {
                if (e & 1) result *= acc;
                if (e > 1) acc *= acc;
            }
            return Atom(result);
        }
        if (base == 0) fail(Err::DivisionByZero, "zero to a negative power", pos);
        return Atom(std::pow(static_cast<double>(base), static_cast<double>(exp)));
    }
    return Atom(std::pow(asDouble(a), asDouble(b)));
}

inline Atom numSqrt(const Atom& a, SourcePos pos) {
    if (const auto* i = std::get_if<std::int64_t>(&a)) {
        if (*i < 0) fail(Err::NegativeSqrt, "square root of a negative number", pos);
        auto r = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(*i))));
        while (r > 0 && r * r > *i) --r;
        while ((r + 1) * (r + 1) <= *i) ++r;
        if (r * r == *i) return Atom(r);
        return Atom(std::sqrt(static_cast<double>(*i)));
    }
    double x = asDouble(a);
    if (x < 0) fail(Err::NegativeSqrt, "square root of a negative number", pos);
    return Atom(std::sqrt(x));
}

template <typename IntOp, typename FloatOp>
ArrayValue scalarNumeric2(const Cells& c, SourcePos pos, IntOp iop, FloatOp fop) {
    wantNumeric(c[0].atoms[0], pos);
    wantNumeric(c[1].atoms[0], pos);
    const Atom& a = c[0].atoms[0];
    const Atom& b = c[1].atoms[0];
    if (std::holds_alternative<std::int64_t>(a) && std::holds_alternative<std::int64_t>(b))
        return ArrayValue::scalar(iop(std::get<std::int64_t>(a), std::get<std::int64_t>(b)));
    return ArrayValue::scalar(fop(asDouble(a), asDouble(b)));
}

inline ArrayValue implAdd(Evaluator&, const Cells& c, SourcePos pos) {
    wantNumeric(c[0].atoms[0], pos);
    wantNumeric(c[1].atoms[0], pos);
    return ArrayValue::scalar(numAdd(c[0].atoms[0], c[1].atoms[0]));
}
inline ArrayValue implSub(Evaluator&, const Cells& c, SourcePos pos) {
    wantNumeric(c[0].atoms[0], pos);
    wantNumeric(c[1].atoms[0], pos);
    return ArrayValue::scalar(numSub(c[0].atoms[0], c[1].atoms[0]));
}
inline ArrayValue implMul(Evaluator&, const Cells& c, SourcePos pos) {
    wantNumeric(c[0].atoms[0], pos);
    wantNumeric(c[1].atoms[0], pos);
    return ArrayValue::scalar(numMul(c[0].atoms[0], c[1].atoms[0]));
}
inline ArrayValue implDiv(Evaluator&, const Cells& c, SourcePos pos) {
    wantNumeric(c[0].atoms[0], pos);
    wantNumeric(c[1].atoms[0], pos);
    return ArrayValue::scalar(numDiv(c[0].atoms[0], c[1].atoms[0], pos));
}
inline ArrayValue implExpt(Evaluator&, const Cells& c, SourcePos pos) {
    wantNumeric(c[0].atoms[0], pos);
    wantNumeric(c[1].atoms[0], pos);
    return ArrayValue::scalar(numExpt(c[0].atoms[0], c[1].atoms[0], pos));
}
inline ArrayValue implSquare(Evaluator&, const Cells& c, SourcePos pos) {
    wantNumeric(c[0].atoms[0], pos);
    return ArrayValue::scalar(numMul(c[0].atoms[0], c[0].atoms[0]));
}
inline ArrayValue implSqrt(Evaluator&, const Cells& c, SourcePos pos) {
    wantNumeric(c[0].atoms[0], pos);
    return ArrayValue::scalar(numSqrt(c[0].atoms[0], pos));
}
inline ArrayValue implAdd1(Evaluator&, const Cells& c, SourcePos pos) {
    wantNumeric(c[0].atoms[0], pos);
    return ArrayValue::scalar(numAdd(c[0].atoms[0], Atom(std::int64_t(1))));
}
inline ArrayValue implSub1(Evaluator&, const Cells& c, SourcePos pos) {
    wantNumeric(c[0].atoms[0], pos);
    return ArrayValue::scalar(numSub(c[0].atoms[0], Atom(std::int64_t(1))));
}

// --- predicates and logic ---------------------------------------------------

inline double cmpValue(const Atom& a, SourcePos pos) {
    wantNumeric(a, pos);
    return asDouble(a);
}

inline ArrayValue implEq(Evaluator&, const Cells& c, SourcePos pos) {
    return ArrayValue::scalar(Atom(cmpValue(c[0].atoms[0], pos) == cmpValue(c[1].atoms[0], pos)));
}
inline ArrayValue implLt(Evaluator&, const Cells& c, SourcePos pos) {
    return ArrayValue::scalar(Atom(cmpValue(c[0].atoms[0], pos) < cmpValue(c[1].atoms[0], pos)));
}
inline ArrayValue implGt(Evaluator&, const Cells& c, SourcePos pos) {
    return ArrayValue::scalar(Atom(cmpValue(c[0].atoms[0], pos) > cmpValue(c[1].atoms[0], pos)));
}
inline ArrayValue implZeroP(Evaluator&, const Cells& c, SourcePos pos) {
    return ArrayValue::scalar(Atom(cmpValue(c[0].atoms[0], pos) == 0.0));
}
inline ArrayValue implNegativeP(Evaluator&, const Cells& c, SourcePos pos) {
    return ArrayValue::scalar(Atom(cmpValue(c[0].atoms[0], pos) < 0.0));
}
inline ArrayValue implNot(Evaluator&, const Cells& c, SourcePos pos) {
    return ArrayValue::scalar(Atom(!wantBool(c[0].atoms[0], pos)));
}
inline ArrayValue implAnd(Evaluator&, const Cells& c, SourcePos pos) {
    return ArrayValue::scalar(Atom(wantBool(c[0].atoms[0], pos) && wantBool(c[1].atoms[0], pos)));
}
inline ArrayValue implOr(Evaluator&, const Cells& c, SourcePos pos) {
    return ArrayValue::scalar(Atom(wantBool(c[0].atoms[0], pos) || wantBool(c[1].atoms[0], pos)));
}
inline ArrayValue implCharEq(Evaluator&, const Cells& c, SourcePos pos) {
    return ArrayValue::scalar(Atom(wantChar(c[0].atoms[0], pos) == wantChar(c[1].atoms[0], pos)));
}
inline ArrayValue implSelect(Evaluator&, const Cells& c, SourcePos pos) {
    return wantBool(c[0].atoms[0], pos) ? c[1] : c[2];
}

// --- whole-array structure ---------------------------------------------------

inline ArrayValue implAppend(Evaluator&, const Cells& c, SourcePos pos) {
    const ArrayValue& a = c[0];
    const ArrayValue& b = c[1];
    if (a.rank() == 0 || b.rank() == 0)
        fail(Err::RankZeroAppend, "append needs arguments of rank at least 1", pos);
    if (a.rank() != b.rank())
        fail(Err::TrailingShapeMismatch, "append needs arguments of identical rank", pos);
    for (std::size_t i = 1; i < a.rank(); ++i)
        if (a.shape.dims[i] != b.shape.dims[i])
            fail(Err::TrailingShapeMismatch, "append arguments disagree past the first axis: " +
                                                 a.shape.str() + " vs " + b.shape.str(),
                 pos);
    ArrayValue out = a;
    out.shape.dims[0] += b.shape.dims[0];
    out.atoms.insert(out.atoms.end(), b.atoms.begin(), b.atoms.end());
    return out;
}

inline ArrayValue implLength(Evaluator&, const Cells& c, SourcePos pos) {
    if (c[0].rank() == 0)
        fail(Err::RankZeroLength, "length of a scalar", pos);
    return ArrayValue::scalar(Atom(static_cast<std::int64_t>(c[0].shape.dims[0])));
}

inline ArrayValue iotaArray(const std::vector<std::int64_t>& dims, SourcePos pos) {
    std::vector<std::size_t> ds;
    for (std::int64_t d : dims) {
        if (d < 0) fail(Err::NegativeDimension, "iota dimension is negative", pos);
        ds.push_back(static_cast<std::size_t>(d));
    }
    Shape shape{std::move(ds)};
    std::vector<std::int64_t> vs(shape.elementCount());
    for (std::size_t i = 0; i < vs.size(); ++i) vs[i] = static_cast<std::int64_t>(i);
    return ArrayValue::ints(std::move(shape), std::move(vs));
}

inline ArrayValue implIota(Evaluator& ev, const Cells& c, SourcePos pos) {
    ArrayValue out = iotaArray(intVector(c[0], pos), pos);
    if (ev.config().dialect == Dialect::Typed) {
        std::vector<std::size_t> dims = out.shape.dims;
        return boxed(std::move(out), {Witness::ofShape(std::move(dims))});
    }
    return out;
}

// iota0..iota9 take one scalar per dimension and always box the result,
// exposing the dimensions as witnesses.
inline ArrayValue implIotaN(Evaluator&, const Cells& c, SourcePos pos) {
    std::vector<std::int64_t> dims;
    for (const ArrayValue& cell : c) dims.push_back(wantInt(cell.atoms[0], pos));
    ArrayValue out = iotaArray(dims, pos);
    std::vector<Witness> ws;
    for (std::size_t d : out.shape.dims) ws.push_back(Witness::ofDim(d));
    return boxed(std::move(out), std::move(ws));
}

inline ArrayValue indicesOfArray(const ArrayValue& a) {
    std::size_t r = a.rank();
    Shape outShape = a.shape + Shape{r};
    std::vector<Atom> atoms;
    atoms.reserve(outShape.elementCount());
    std::vector<std::size_t> idx(r, 0);
    std::size_t n = a.shape.elementCount();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < r; ++k)
            atoms.emplace_back(static_cast<std::int64_t>(idx[k]));
        nextIndex(idx, a.shape);
    }
    return ArrayValue(std::move(outShape), std::move(atoms));
}

inline ArrayValue implIndicesOf(Evaluator& ev, const Cells& c, SourcePos pos) {
    (void)pos;
    ArrayValue out = indicesOfArray(c[0]);
    if (ev.config().dialect == Dialect::Typed)
        return boxed(std::move(out), {Witness::ofDim(c[0].rank())});
    return out;
}

// indices-of/1..9: the fixed rank comes in as the declared cell rank, so the
// result shape is statically known and no box is needed.
inline ArrayValue implIndicesOfN(Evaluator&, const Cells& c, SourcePos pos) {
    (void)pos;
    return indicesOfArray(c[0]);
}

inline ArrayValue implRotate(Evaluator&, const Cells& c, SourcePos pos) {
    const ArrayValue& a = c[0];
    std::vector<std::int64_t> amounts = intVector(c[1], pos);
    if (amounts.size() != a.rank())
        fail(Err::RotationArity, "rotate needs one amount per axis: rank " +
                                     std::to_string(a.rank()) + ", got " +
                                     std::to_string(amounts.size()),
             pos);
    if (a.atoms.empty()) return a;
    ArrayValue out(a.shape, std::vector<Atom>(a.atoms.size()));
    std::vector<std::size_t> idx(a.rank(), 0);
    std::vector<std::size_t> src(a.rank(), 0);
    for (std::size_t i = 0; i < a.atoms.size(); ++i) {
        for (std::size_t k = 0; k < a.rank(); ++k)
            src[k] = static_cast<std::size_t>(mathMod(
                static_cast<std::int64_t>(idx[k]) + amounts[k],
                static_cast<std::int64_t>(a.shape.dims[k])));
        out.atoms[i] = a.atoms[rowMajorOffset(a.shape, src)];
        nextIndex(idx, a.shape);
    }
    return out;
}

inline ArrayValue implWithShape(Evaluator&, const Cells& c, SourcePos pos) {
    const ArrayValue& pattern = c[0];
    const ArrayValue& data = c[1];
    std::size_t n = pattern.shape.elementCount();
    if (n > 0 && data.atoms.empty())
        fail(Err::EmptyDataSource, "with-shape has no data atoms to cycle", pos);
    std::vector<Atom> atoms;
    atoms.reserve(n);
    for (std::size_t i = 0; i < n; ++i) atoms.push_back(data.atoms[i % data.atoms.size()]);
    return ArrayValue(pattern.shape, std::move(atoms));
}

// --- take/drop family --------------------------------------------------------

// Copy the region of `a` starting at `start` with the given extents.
// Callers guarantee the region is in bounds.
inline ArrayValue copyRegion(const ArrayValue& a, const std::vector<std::size_t>& start,
                             const std::vector<std::size_t>& extent) {
    Shape outShape{std::vector<std::size_t>(extent)};
    std::vector<Atom> atoms;
    atoms.reserve(outShape.elementCount());
    if (outShape.elementCount() > 0) {
        std::vector<std::size_t> idx(extent.size(), 0);
        std::vector<std::size_t> src(extent.size(), 0);
        do {
            for (std::size_t k = 0; k < extent.size(); ++k) src[k] = start[k] + idx[k];
            atoms.push_back(a.atoms[rowMajorOffset(a.shape, src)]);
        } while (nextIndex(idx, outShape));
    }
    return ArrayValue(std::move(outShape), std::move(atoms));
}

inline std::vector<std::size_t> wantCounts(const ArrayValue& ks, const ArrayValue& a,
                                           SourcePos pos) {
    std::vector<std::int64_t> counts = intVector(ks, pos);
    if (counts.size() != a.rank())
        fail(Err::ArityMismatch, "need one count per axis: rank " + std::to_string(a.rank()) +
                                     ", got " + std::to_string(counts.size()),
             pos);
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < counts.size(); ++k) {
        if (counts[k] < 0 || static_cast<std::size_t>(counts[k]) > a.shape.dims[k])
            fail(Err::CountOutOfRange, "count " + std::to_string(counts[k]) +
                                           " out of range for axis of extent " +
                                           std::to_string(a.shape.dims[k]),
                 pos);
        out.push_back(static_cast<std::size_t>(counts[k]));
    }
    return out;
}

inline ArrayValue implDropRight1(Evaluator&, const Cells& c, SourcePos pos) {
    const ArrayValue& a = c[0];
    if (a.rank() == 0) fail(Err::RankZeroData, "drop-right1 needs a leading dimension", pos);
    std::int64_t k = wantInt(c[1].atoms[0], pos);
    if (k < 0 || static_cast<std::size_t>(k) > a.shape.dims[0])
        fail(Err::CountOutOfRange, "drop count " + std::to_string(k) +
                                       " out of range for leading extent " +
                                       std::to_string(a.shape.dims[0]),
             pos);
    std::vector<std::size_t> start(a.rank(), 0);
    std::vector<std::size_t> extent = a.shape.dims;
    extent[0] -= static_cast<std::size_t>(k);
    return copyRegion(a, start, extent);
}

inline ArrayValue implDropRight(Evaluator&, const Cells& c, SourcePos pos) {
    const ArrayValue& a = c[0];
    std::vector<std::size_t> ks = wantCounts(c[1], a, pos);
    std::vector<std::size_t> start(a.rank(), 0);
    std::vector<std::size_t> extent = a.shape.dims;
    for (std::size_t k = 0; k < ks.size(); ++k) extent[k] -= ks[k];
    return copyRegion(a, start, extent);
}

inline ArrayValue implTake(Evaluator&, const Cells& c, SourcePos pos) {
    const ArrayValue& a = c[0];
    std::vector<std::size_t> ks = wantCounts(c[1], a, pos);
    std::vector<std::size_t> start(a.rank(), 0);
    return copyRegion(a, start, ks);
}

inline ArrayValue implDrop(Evaluator&, const Cells& c, SourcePos pos) {
    const ArrayValue& a = c[0];
    std::vector<std::size_t> ks = wantCounts(c[1], a, pos);
    std::vector<std::size_t> extent = a.shape.dims;
    for (std::size_t k = 0; k < ks.size(); ++k) extent[k] -= ks[k];
    return copyRegion(a, ks, extent);
}

inline ArrayValue implMirror(Evaluator&, const Cells& c, SourcePos pos) {
    const ArrayValue& a = c[0];
    if (c[1].atoms.size() != a.rank())
        fail(Err::ArityMismatch, "mirror needs one flag per axis", pos);
    std::vector<bool> flags;
    for (const Atom& f : c[1].atoms) flags.push_back(wantBool(f, pos));
    if (a.atoms.empty()) return a;
    ArrayValue out(a.shape, std::vector<Atom>(a.atoms.size()));
    std::vector<std::size_t> idx(a.rank(), 0);
    std::vector<std::size_t> src(a.rank(), 0);
    for (std::size_t i = 0; i < a.atoms.size(); ++i) {
        for (std::size_t k = 0; k < a.rank(); ++k)
            src[k] = flags[k] ? a.shape.dims[k] - 1 - idx[k] : idx[k];
        out.atoms[i] = a.atoms[rowMajorOffset(a.shape, src)];
        nextIndex(idx, a.shape);
    }
    return out;
}

// --- indexing ----------------------------------------------------------------

inline ArrayValue implIndex(Evaluator&, const Cells& c, SourcePos pos) {
    const ArrayValue& a = c[0];
    std::vector<std::int64_t> idx = intVector(c[1], pos);
    if (idx.size() > a.rank())
        fail(Err::IndexTooLong, "index of length " + std::to_string(idx.size()) +
                                    " into an array of rank " + std::to_string(a.rank()),
             pos);
    std::vector<std::size_t> at;
    for (std::size_t k = 0; k < idx.size(); ++k) {
        if (idx[k] < 0 || static_cast<std::size_t>(idx[k]) >= a.shape.dims[k])
            fail(Err::IndexOutOfBounds, "index " + std::to_string(idx[k]) +
                                            " out of bounds for axis of extent " +
                                            std::to_string(a.shape.dims[k]),
                 pos);
        at.push_back(static_cast<std::size_t>(idx[k]));
    }
    Shape outShape = a.shape.suffix(a.rank() - idx.size());
    std::size_t block = outShape.elementCount();
    std::size_t off = rowMajorOffset(a.shape, at);
    std::vector<Atom> atoms(a.atoms.begin() + static_cast<std::ptrdiff_t>(off),
                            a.atoms.begin() + static_cast<std::ptrdiff_t>(off + block));
    return ArrayValue(std::move(outShape), std::move(atoms));
}

inline ArrayValue implIndexItem(Evaluator&, const Cells& c, SourcePos pos) {
    const ArrayValue& a = c[0];
    if (a.rank() == 0) fail(Err::RankZeroSource, "index-item needs a leading dimension", pos);
    std::int64_t i = wantInt(c[1].atoms[0], pos);
    if (i < 0 || static_cast<std::size_t>(i) >= a.shape.dims[0])
        fail(Err::IndexOutOfBounds, "item " + std::to_string(i) +
                                        " out of bounds for leading extent " +
                                        std::to_string(a.shape.dims[0]),
             pos);
    Shape outShape = a.shape.suffix(a.rank() - 1);
    std::size_t block = outShape.elementCount();
    std::size_t off = static_cast<std::size_t>(i) * block;
    std::vector<Atom> atoms(a.atoms.begin() + static_cast<std::ptrdiff_t>(off),
                            a.atoms.begin() + static_cast<std::ptrdiff_t>(off + block));
    return ArrayValue(std::move(outShape), std::move(atoms));
}

enum class Region { Plain, Wrap, Fill };

inline ArrayValue subarrayImpl(const Cells& c, Region mode, SourcePos pos) {
    const ArrayValue& a = c[0];
    std::vector<std::int64_t> start = intVector(c[1], pos);
    std::vector<std::int64_t> want = intVector(c[2], pos);
    if (start.size() != a.rank())
        fail(Err::ArityMismatch, "subarray start must name every axis", pos);
    if (want.size() > a.rank())
        fail(Err::ArityMismatch, "subarray shape longer than the array's rank", pos);
    std::vector<std::size_t> extent(a.rank());
    for (std::size_t k = 0; k < a.rank(); ++k) {
        std::int64_t d = static_cast<std::int64_t>(a.shape.dims[k]);
        if (k < want.size()) {
            if (want[k] < 0) fail(Err::ArityMismatch, "subarray extents are naturals", pos);
            extent[k] = static_cast<std::size_t>(want[k]);
        } else {
            // unspecified axes select the whole remaining extent
            std::int64_t rest = d - start[k];
            if (rest < 0)
                fail(Err::RegionOutOfBounds, "start index past the end of axis " +
                                                 std::to_string(k),
                     pos);
            extent[k] = static_cast<std::size_t>(rest);
        }
        if (mode == Region::Plain) {
            if (start[k] < 0 || start[k] + static_cast<std::int64_t>(extent[k]) > d)
                fail(Err::RegionOutOfBounds, "region exceeds axis " + std::to_string(k) +
                                                 " of extent " + std::to_string(d),
                     pos);
        }
    }
    Shape outShape{std::vector<std::size_t>(extent)};
    std::vector<Atom> atoms;
    atoms.reserve(outShape.elementCount());
    Atom fill = mode == Region::Fill ? c[3].atoms[0] : Atom(std::int64_t(0));
    if (outShape.elementCount() > 0) {
        std::vector<std::size_t> idx(a.rank(), 0);
        std::vector<std::size_t> src(a.rank(), 0);
        do {
            bool outOfBounds = false;
            for (std::size_t k = 0; k < a.rank(); ++k) {
                std::int64_t s = start[k] + static_cast<std::int64_t>(idx[k]);
                std::int64_t d = static_cast<std::int64_t>(a.shape.dims[k]);
                if (mode == Region::Wrap) {
                    s = mathMod(s, d);
                } else if (s < 0 || s >= d) {
                    outOfBounds = true;
                    break;
                }
                src[k] = static_cast<std::size_t>(s);
            }
            if (outOfBounds)
                atoms.push_back(fill);
            else
                atoms.push_back(a.atoms[rowMajorOffset(a.shape, src)]);
        } while (nextIndex(idx, outShape));
    }
    return ArrayValue(std::move(outShape), std::move(atoms));
}

inline ArrayValue implSubarray(Evaluator&, const Cells& c, SourcePos pos) {
    return subarrayImpl(c, Region::Plain, pos);
}
inline ArrayValue implSubarrayWrap(Evaluator&, const Cells& c, SourcePos pos) {
    return subarrayImpl(c, Region::Wrap, pos);
}
inline ArrayValue implSubarrayFill(Evaluator&, const Cells& c, SourcePos pos) {
    return subarrayImpl(c, Region::Fill, pos);
}

// --- conditional data movement ------------------------------------------------

inline std::vector<bool> selectorFlags(const ArrayValue& keep, const ArrayValue& a,
                                       SourcePos pos) {
    if (a.rank() == 0)
        fail(Err::RankZeroData, "data may not be a dimensionless scalar", pos);
    if (keep.atoms.size() != a.shape.dims[0])
        fail(Err::SelectorLengthMismatch,
             "selector of length " + std::to_string(keep.atoms.size()) +
                 " for leading extent " + std::to_string(a.shape.dims[0]),
             pos);
    std::vector<bool> flags;
    flags.reserve(keep.atoms.size());
    for (const Atom& b : keep.atoms) flags.push_back(wantBool(b, pos));
    return flags;
}

inline ArrayValue filterItems(const std::vector<bool>& flags, const ArrayValue& a) {
    Shape itemShape = a.shape.suffix(a.rank() - 1);
    std::size_t block = itemShape.elementCount();
    std::vector<Atom> atoms;
    std::size_t kept = 0;
    for (std::size_t i = 0; i < flags.size(); ++i) {
        if (!flags[i]) continue;
        ++kept;
        atoms.insert(atoms.end(), a.atoms.begin() + static_cast<std::ptrdiff_t>(i * block),
                     a.atoms.begin() + static_cast<std::ptrdiff_t>((i + 1) * block));
    }
    return ArrayValue(Shape{kept} + itemShape, std::move(atoms));
}

inline ArrayValue implFilter(Evaluator& ev, const Cells& c, SourcePos pos) {
    std::vector<bool> flags = selectorFlags(c[0], c[1], pos);
    ArrayValue out = filterItems(flags, c[1]);
    if (ev.config().dialect == Dialect::Typed)
        return boxed(std::move(out), {Witness::ofDim(out.shape.dims[0])});
    return out;
}

// partition returns its two halves as a 2-vector of boxes; each half's item
// count is that box's witness.
inline ArrayValue implPartition(Evaluator&, const Cells& c, SourcePos pos) {
    std::vector<bool> flags = selectorFlags(c[0], c[1], pos);
    std::vector<bool> negated;
    negated.reserve(flags.size());
    for (bool f : flags) negated.push_back(!f);
    ArrayValue yes = filterItems(flags, c[1]);
    ArrayValue no = filterItems(negated, c[1]);
    std::vector<Atom> atoms;
    atoms.push_back(std::make_shared<const BoxValue>(
        BoxValue{yes, {Witness::ofDim(yes.shape.dims[0])}}));
    atoms.push_back(std::make_shared<const BoxValue>(
        BoxValue{no, {Witness::ofDim(no.shape.dims[0])}}));
    return ArrayValue(Shape{2}, std::move(atoms));
}

inline ArrayValue implReplicate(Evaluator&, const Cells& c, SourcePos pos) {
    const ArrayValue& a = c[1];
    if (a.rank() == 0)
        fail(Err::RankZeroData, "data may not be a dimensionless scalar", pos);
    std::vector<std::int64_t> counts = intVector(c[0], pos);
    if (counts.size() != a.shape.dims[0])
        fail(Err::SelectorLengthMismatch,
             "count vector of length " + std::to_string(counts.size()) +
                 " for leading extent " + std::to_string(a.shape.dims[0]),
             pos);
    Shape itemShape = a.shape.suffix(a.rank() - 1);
    std::size_t block = itemShape.elementCount();
    std::vector<Atom> atoms;
    std::size_t total = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (counts[i] < 0) fail(Err::NegativeCount, "replication count is negative", pos);
        total += static_cast<std::size_t>(counts[i]);
        for (std::int64_t r = 0; r < counts[i]; ++r)
            atoms.insert(atoms.end(), a.atoms.begin() + static_cast<std::ptrdiff_t>(i * block),
                         a.atoms.begin() + static_cast<std::ptrdiff_t>((i + 1) * block));
    }
    return ArrayValue(Shape{total} + itemShape, std::move(atoms));
}

// --- reduce / scan / fold / trace ----------------------------------------------

inline void wantItems(const ArrayValue& a, SourcePos pos) {
    if (a.rank() == 0)
        fail(Err::RankZeroData, "iteration needs an array of rank at least 1", pos);
}

// Balanced pairwise combination; the tree shape is fixed by the item count,
// so results do not depend on evaluation order.
inline ArrayValue treeReduce(Evaluator& ev, const ArrayValue& op,
                             const std::vector<ArrayValue>& items, std::size_t lo,
                             std::size_t hi, SourcePos pos) {
    if (hi - lo == 1) return items[lo];
    std::size_t mid = lo + (hi - lo) / 2;
    ArrayValue left = treeReduce(ev, op, items, lo, mid, pos);
    ArrayValue right = treeReduce(ev, op, items, mid, hi, pos);
    return ev.liftApply(op, {left, right}, pos);
}

inline ArrayValue implReduce(Evaluator& ev, const Cells& c, SourcePos pos) {
    wantItems(c[1], pos);
    if (c[1].shape.dims[0] == 0)
        fail(Err::EmptyReduce, "reduce over a zero-extent leading dimension", pos);
    std::vector<ArrayValue> items = itemsOf(c[1]);
    return treeReduce(ev, c[0], items, 0, items.size(), pos);
}

inline ArrayValue implReduceZero(Evaluator& ev, const Cells& c, SourcePos pos) {
    wantItems(c[2], pos);
    if (c[2].shape.dims[0] == 0) return c[1];
    std::vector<ArrayValue> items = itemsOf(c[2]);
    items.insert(items.begin(), c[1]);
    return treeReduce(ev, c[0], items, 0, items.size(), pos);
}

inline ArrayValue implFold(Evaluator& ev, const Cells& c, SourcePos pos) {
    wantItems(c[2], pos);
    ArrayValue acc = c[1];
    for (const ArrayValue& item : itemsOf(c[2])) acc = ev.liftApply(c[0], {item, acc}, pos);
    return acc;
}

inline ArrayValue implFoldRight(Evaluator& ev, const Cells& c, SourcePos pos) {
    wantItems(c[2], pos);
    std::vector<ArrayValue> items = itemsOf(c[2]);
    ArrayValue acc = c[1];
    for (std::size_t i = items.size(); i-- > 0;) acc = ev.liftApply(c[0], {items[i], acc}, pos);
    return acc;
}

inline ArrayValue implIscan(Evaluator& ev, const Cells& c, SourcePos pos) {
    wantItems(c[1], pos);
    if (c[1].shape.dims[0] == 0)
        fail(Err::EmptyReduce, "iscan over a zero-extent leading dimension", pos);
    std::vector<ArrayValue> items = itemsOf(c[1]);
    std::vector<ArrayValue> out;
    out.reserve(items.size());
    ArrayValue acc = items[0];
    out.push_back(acc);
    for (std::size_t i = 1; i < items.size(); ++i) {
        acc = ev.liftApply(c[0], {acc, items[i]}, pos);
        out.push_back(acc);
    }
    return collectFrame(Shape{out.size()}, out);
}

inline std::vector<ArrayValue> exclusiveScan(Evaluator& ev, const ArrayValue& op,
                                             const ArrayValue& z, const ArrayValue& a,
                                             SourcePos pos) {
    std::vector<ArrayValue> out;
    out.push_back(z);
    ArrayValue acc = z;
    for (const ArrayValue& item : itemsOf(a)) {
        acc = ev.liftApply(op, {acc, item}, pos);
        out.push_back(acc);
    }
    return out;
}

inline ArrayValue implScanZero(Evaluator& ev, const Cells& c, SourcePos pos) {
    wantItems(c[2], pos);
    std::vector<ArrayValue> out = exclusiveScan(ev, c[0], c[1], c[2], pos);
    return collectFrame(Shape{out.size()}, out);
}

inline ArrayValue implOpenScanZero(Evaluator& ev, const Cells& c, SourcePos pos) {
    wantItems(c[2], pos);
    std::vector<ArrayValue> out = exclusiveScan(ev, c[0], c[1], c[2], pos);
    out.pop_back();
    std::optional<Shape> expected;
    if (out.empty()) expected = Shape{};
    return collectFrame(Shape{out.size()}, out, expected);
}

inline ArrayValue implTrace(Evaluator& ev, const Cells& c, SourcePos pos) {
    wantItems(c[2], pos);
    std::vector<ArrayValue> out;
    out.push_back(c[1]);
    ArrayValue acc = c[1];
    for (const ArrayValue& item : itemsOf(c[2])) {
        acc = ev.liftApply(c[0], {item, acc}, pos); // fold's (item, acc) order
        out.push_back(acc);
    }
    return collectFrame(Shape{out.size()}, out);
}

inline ArrayValue implTraceRight(Evaluator& ev, const Cells& c, SourcePos pos) {
    wantItems(c[2], pos);
    std::vector<ArrayValue> items = itemsOf(c[2]);
    std::vector<ArrayValue> out;
    out.push_back(c[1]);
    ArrayValue acc = c[1];
    for (std::size_t i = items.size(); i-- > 0;) {
        acc = ev.liftApply(c[0], {items[i], acc}, pos);
        out.push_back(acc);
    }
    return collectFrame(Shape{out.size()}, out);
}

// --- sorting -------------------------------------------------------------------

inline bool cmpItems(Evaluator& ev, const ArrayValue& cmp, const ArrayValue& x,
                     const ArrayValue& y, SourcePos pos) {
    ArrayValue r = ev.liftApply(cmp, {x, y}, pos);
    if (!r.isScalar() || !std::holds_alternative<bool>(r.atoms[0]))
        fail(Err::TypeMismatchAtom, "comparator must return a scalar boolean", pos);
    return std::get<bool>(r.atoms[0]);
}

// Stable index merge sort; std::stable_sort is avoided so a misbehaving
// comparator cannot run into undefined behaviour.
inline std::vector<std::size_t> gradeIndices(Evaluator& ev, const ArrayValue& cmp,
                                             const std::vector<ArrayValue>& items,
                                             SourcePos pos) {
    std::size_t n = items.size();
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    std::vector<std::size_t> buf(n);
    for (std::size_t width = 1; width < n; width *= 2) {
        for (std::size_t lo = 0; lo < n; lo += 2 * width) {
            std::size_t mid = std::min(lo + width, n);
            std::size_t hi = std::min(lo + 2 * width, n);
            std::size_t i = lo, j = mid, k = lo;
            while (i < mid && j < hi) {
                // take from the right run only when strictly smaller: stability
                if (cmpItems(ev, cmp, items[idx[j]], items[idx[i]], pos))
                    buf[k++] = idx[j++];
                else
                    buf[k++] = idx[i++];
            }
            while (i < mid) buf[k++] = idx[i++];
            while (j < hi) buf[k++] = idx[j++];
            std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo),
                      buf.begin() + static_cast<std::ptrdiff_t>(hi),
                      idx.begin() + static_cast<std::ptrdiff_t>(lo));
        }
    }
    return idx;
}

inline ArrayValue implGrade(Evaluator& ev, const Cells& c, SourcePos pos) {
    wantItems(c[1], pos);
    std::vector<ArrayValue> items = itemsOf(c[1]);
    std::vector<std::size_t> idx = gradeIndices(ev, c[0], items, pos);
    std::vector<std::int64_t> vs(idx.begin(), idx.end());
    Shape outShape{vs.size()};
    return ArrayValue::ints(std::move(outShape), std::move(vs));
}

inline ArrayValue implSort(Evaluator& ev, const Cells& c, SourcePos pos) {
    wantItems(c[1], pos);
    std::vector<ArrayValue> items = itemsOf(c[1]);
    std::vector<std::size_t> idx = gradeIndices(ev, c[0], items, pos);
    std::vector<ArrayValue> ordered;
    ordered.reserve(idx.size());
    for (std::size_t i : idx) ordered.push_back(items[i]);
    Shape itemShape = c[1].shape.suffix(c[1].rank() - 1);
    return collectFrame(Shape{idx.size()}, ordered, itemShape);
}

} // namespace bi

// ---------------------------------------------------------------------------
// Registry: cell ranks, typed-dialect signatures, implementations.

struct BuiltinDef {
    const char* id;
    std::vector<CellRank> ranks;
    const char* signature; // typed-dialect type, surface syntax
    ArrayValue (*impl)(Evaluator&, const bi::Cells&, SourcePos);
};

inline const std::vector<BuiltinDef>& builtinTable() {
    static const auto R0 = CellRank::of(0);
    static const auto R1 = CellRank::of(1);
    static const auto ALL = CellRank::whole();
    static const std::vector<BuiltinDef> table = [] {
        std::vector<BuiltinDef> t = {
            {"+", {R0, R0}, "(-> (int int) int)", bi::implAdd},
            {"-", {R0, R0}, "(-> (int int) int)", bi::implSub},
            {"*", {R0, R0}, "(-> (int int) int)", bi::implMul},
            {"/", {R0, R0}, "(-> (int int) int)", bi::implDiv},
            {"expt", {R0, R0}, "(-> (int int) int)", bi::implExpt},
            {"square", {R0}, "(-> (int) int)", bi::implSquare},
            {"square-root", {R0}, "(-> (int) int)", bi::implSqrt},
            {"add1", {R0}, "(-> (int) int)", bi::implAdd1},
            {"sub1", {R0}, "(-> (int) int)", bi::implSub1},
            {"=", {R0, R0}, "(-> (int int) bool)", bi::implEq},
            {"<", {R0, R0}, "(-> (int int) bool)", bi::implLt},
            {">", {R0, R0}, "(-> (int int) bool)", bi::implGt},
            {"zero?", {R0}, "(-> (int) bool)", bi::implZeroP},
            {"negative?", {R0}, "(-> (int) bool)", bi::implNegativeP},
            {"not", {R0}, "(-> (bool) bool)", bi::implNot},
            {"and", {R0, R0}, "(-> (bool bool) bool)", bi::implAnd},
            {"or", {R0, R0}, "(-> (bool bool) bool)", bi::implOr},
            {"char=?", {R0, R0}, "(-> (char char) bool)", bi::implCharEq},
            {"select", {R0, R0, R0}, "(Forall (t) (-> (bool t t) t))", bi::implSelect},
            {"append", {ALL, ALL},
             "(Pi (da db @rest) (Forall (t) (-> ([t da @rest] [t db @rest]) "
             "[t (+ da db) @rest])))",
             bi::implAppend},
            {"length", {ALL}, "(Pi (d1 @s) (Forall (t) (-> ([t d1 @s]) int)))", bi::implLength},
            {"iota", {R1}, "(Pi (r) (-> ([int r]) (Sigma (@s) [int @s])))", bi::implIota},
            {"indices-of", {ALL},
             "(Pi (@s) (Forall (t) (-> ([t @s]) (Sigma (r) [int @s r]))))", bi::implIndicesOf},
            {"rotate", {ALL, R1},
             "(Pi (r @s) (Forall (t) (-> ([t @s] [int r]) [t @s])))", bi::implRotate},
            {"with-shape", {ALL, ALL},
             "(Pi (@sp @sd) (Forall (tp td) (-> ([tp @sp] [td @sd]) [td @sp])))",
             bi::implWithShape},
            {"drop-right1", {ALL, R0},
             "(Pi (d1 @s) (Forall (t) (-> ([t d1 @s] int) (Sigma (db) [t db @s]))))",
             bi::implDropRight1},
            {"drop-right", {ALL, R1},
             "(Pi (r @s) (Forall (t) (-> ([t @s] [int r]) (Sigma (@so) [t @so]))))",
             bi::implDropRight},
            {"take", {ALL, R1},
             "(Pi (r @s) (Forall (t) (-> ([t @s] [int r]) (Sigma (@so) [t @so]))))",
             bi::implTake},
            {"drop", {ALL, R1},
             "(Pi (r @s) (Forall (t) (-> ([t @s] [int r]) (Sigma (@so) [t @so]))))",
             bi::implDrop},
            {"mirror", {ALL, R1},
             "(Pi (r @s) (Forall (t) (-> ([t @s] [bool r]) [t @s])))", bi::implMirror},
            {"index", {ALL, R1},
             "(Pi (n @s) (Forall (t) (-> ([t @s] [int n]) (Sigma (@r) [t @r]))))",
             bi::implIndex},
            {"index-item", {ALL, R0},
             "(Pi (d1 @s) (Forall (t) (-> ([t d1 @s] int) [t @s])))", bi::implIndexItem},
            {"subarray", {ALL, R1, R1},
             "(Pi (r n @s) (Forall (t) (-> ([t @s] [int r] [int n]) (Sigma (@o) [t @o]))))",
             bi::implSubarray},
            {"subarray/wrap", {ALL, R1, R1},
             "(Pi (r n @s) (Forall (t) (-> ([t @s] [int r] [int n]) (Sigma (@o) [t @o]))))",
             bi::implSubarrayWrap},
            {"subarray/fill", {ALL, R1, R1, R0},
             "(Pi (r n @s) (Forall (t) (-> ([t @s] [int r] [int n] t) (Sigma (@o) [t @o]))))",
             bi::implSubarrayFill},
            {"filter", {R1, ALL},
             "(Pi (da @s) (Forall (t) (-> ([bool da] [t da @s]) (Sigma (db) [t db @s]))))",
             bi::implFilter},
            {"partition", {R1, ALL},
             "(Pi (da @s) (Forall (t) (-> ([bool da] [t da @s]) "
             "[(Sigma (db) [t db @s]) 2])))",
             bi::implPartition},
            {"replicate", {R1, ALL},
             "(Pi (da @s) (Forall (t) (-> ([int da] [t da @s]) (Sigma (db) [t db @s]))))",
             bi::implReplicate},
            {"reduce", {R0, ALL},
             "(Pi (d-1 @item-pad @cell-shape) (Forall (t) (-> "
             "((-> ([t @cell-shape] [t @cell-shape]) [t @cell-shape]) "
             "[t (+ d-1 1) @item-pad @cell-shape]) "
             "[t @item-pad @cell-shape])))",
             bi::implReduce},
            {"reduce/zero", {R0, ALL, ALL},
             "(Pi (d @item-pad @cell-shape) (Forall (t) (-> "
             "((-> ([t @cell-shape] [t @cell-shape]) [t @cell-shape]) "
             "[t @cell-shape] [t d @item-pad @cell-shape]) "
             "[t @item-pad @cell-shape])))",
             bi::implReduceZero},
            {"fold", {R0, ALL, ALL},
             "(Pi (d @item-shape @acc-shape) (Forall (ta tb) (-> "
             "((-> ([ta @item-shape] [tb @acc-shape]) [tb @acc-shape]) "
             "[tb @acc-shape] [ta d @item-shape]) "
             "[tb @acc-shape])))",
             bi::implFold},
            {"fold-right", {R0, ALL, ALL},
             "(Pi (d @item-shape @acc-shape) (Forall (ta tb) (-> "
             "((-> ([ta @item-shape] [tb @acc-shape]) [tb @acc-shape]) "
             "[tb @acc-shape] [ta d @item-shape]) "
             "[tb @acc-shape])))",
             bi::implFoldRight},
            {"iscan", {R0, ALL},
             "(Pi (d-1 @item-pad @cell-shape) (Forall (t) (-> "
             "((-> ([t @cell-shape] [t @cell-shape]) [t @cell-shape]) "
             "[t (+ d-1 1) @item-pad @cell-shape]) "
             "[t (+ d-1 1) @item-pad @cell-shape])))",
             bi::implIscan},
            {"scan/zero", {R0, ALL, ALL},
             "(Pi (d @item-pad @cell-shape) (Forall (t) (-> "
             "((-> ([t @cell-shape] [t @cell-shape]) [t @cell-shape]) "
             "[t @cell-shape] [t d @item-pad @cell-shape]) "
             "[t (+ d 1) @item-pad @cell-shape])))",
             bi::implScanZero},
            {"open-scan/zero", {R0, ALL, ALL},
             "(Pi (d @item-pad @cell-shape) (Forall (t) (-> "
             "((-> ([t @cell-shape] [t @cell-shape]) [t @cell-shape]) "
             "[t @cell-shape] [t d @item-pad @cell-shape]) "
             "[t d @item-pad @cell-shape])))",
             bi::implOpenScanZero},
            {"trace", {R0, ALL, ALL},
             "(Pi (d @item-shape @acc-shape) (Forall (ta tb) (-> "
             "((-> ([ta @item-shape] [tb @acc-shape]) [tb @acc-shape]) "
             "[tb @acc-shape] [ta d @item-shape]) "
             "[tb (+ d 1) @acc-shape])))",
             bi::implTrace},
            {"trace-right", {R0, ALL, ALL},
             "(Pi (d @item-shape @acc-shape) (Forall (ta tb) (-> "
             "((-> ([ta @item-shape] [tb @acc-shape]) [tb @acc-shape]) "
             "[tb @acc-shape] [ta d @item-shape]) "
             "[tb (+ d 1) @acc-shape])))",
             bi::implTraceRight},
            {"grade", {R0, ALL},
             "(Pi (d1 @s) (Forall (t) (-> ((-> ([t @s] [t @s]) bool) [t d1 @s]) [int d1])))",
             bi::implGrade},
            {"sort", {R0, ALL},
             "(Pi (d1 @s) (Forall (t) (-> ((-> ([t @s] [t @s]) bool) [t d1 @s]) [t d1 @s])))",
             bi::implSort},
        };
        // iota0..iota9: one scalar dimension argument per rank
        static std::string iotaNames[10];
        static std::string iotaSigs[10];
        static std::string ioNames[10];
        static std::string ioSigs[10];
        for (int k = 0; k <= 9; ++k) {
            iotaNames[k] = "iota" + std::to_string(k);
            std::string args, dims;
            for (int i = 1; i <= k; ++i) {
                args += i > 1 ? " int" : "int";
                dims += " d" + std::to_string(i);
            }
            iotaSigs[k] = "(-> (" + args + ") (Sigma (" +
                          (dims.empty() ? "" : dims.substr(1)) + ") [int" + dims + "]))";
            t.push_back({iotaNames[k].c_str(),
                         std::vector<CellRank>(static_cast<std::size_t>(k), R0),
                         iotaSigs[k].c_str(), bi::implIotaN});
        }
        // indices-of/1..indices-of/9: rank-monomorphic, unboxed result
        for (int k = 1; k <= 9; ++k) {
            ioNames[k] = "indices-of/" + std::to_string(k);
            std::string dims;
            for (int i = 1; i <= k; ++i) dims += " d" + std::to_string(i);
            ioSigs[k] = "(Pi (" + dims.substr(1) + ") (Forall (t) (-> ([t" + dims + "]) [int" +
                        dims + " " + std::to_string(k) + "])))";
            t.push_back({ioNames[k].c_str(), {CellRank::of(static_cast<std::size_t>(k))},
                         ioSigs[k].c_str(), bi::implIndicesOfN});
        }
        return t;
    }();
    return table;
}

inline const BuiltinDef* findBuiltin(const std::string& id) {
    static const auto index = [] {
        std::unordered_map<std::string, const BuiltinDef*> m;
        for (const BuiltinDef& d : builtinTable()) m[d.id] = &d;
        return m;
    }();
    auto it = index.find(id);
    return it == index.end() ? nullptr : it->second;
}

inline ArrayValue callBuiltin(Evaluator& ev, const std::string& id,
                              const std::vector<ArrayValue>& cells, SourcePos pos) {
    const BuiltinDef* def = findBuiltin(id);
    if (!def) fail(Err::UnboundVariable, "unknown builtin '" + id + "'", pos);
    return def->impl(ev, cells, pos);
}

inline const std::vector<CellRank>& builtinRanks(const std::string& id) {
    const BuiltinDef* def = findBuiltin(id);
    if (!def) fail(Err::UnboundVariable, "unknown builtin '" + id + "'");
    return def->ranks;
}

inline EnvPtr makeGlobalEnv() {
    EnvPtr env = std::make_shared<Environment>();
    for (const BuiltinDef& def : builtinTable()) {
        FunctionValue fv;
        fv.impl = FunctionValue::Builtin{def.id};
        fv.cellRanks = def.ranks;
        env->define(def.id,
                    ArrayValue::scalar(Atom(std::make_shared<const FunctionValue>(std::move(fv)))));
    }
    return env;
}

} // namespace remora
