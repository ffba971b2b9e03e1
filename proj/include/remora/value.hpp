#pragma once

#include <cstdint>
#include <memory>
#include <numeric>
#include <string>
#include <variant>
#include <vector>

#include "remora/error.hpp"

namespace remora {

struct CoreExpr;
struct Environment;
struct FunctionValue;
struct BoxValue;

using FunctionRef = std::shared_ptr<const FunctionValue>;
using BoxRef = std::shared_ptr<const BoxValue>;

// A sequence of dimension extents. rank == dims.size(); scalar <=> empty.
struct Shape {
    std::vector<std::size_t> dims;

    Shape() = default;
    Shape(std::initializer_list<std::size_t> d) : dims(d) {}
    explicit Shape(std::vector<std::size_t> d) : dims(std::move(d)) {}

    std::size_t rank() const { return dims.size(); }

    // product of dims; the empty product is 1, so scalars hold one atom
    std::size_t elementCount() const {
        std::size_t n = 1;
        for (std::size_t d : dims) n *= d;
        return n;
    }

    bool isScalar() const { return dims.empty(); }

    bool isPrefixOf(const Shape& other) const {
        if (dims.size() > other.dims.size()) return false;
        for (std::size_t i = 0; i < dims.size(); ++i)
            if (dims[i] != other.dims[i]) return false;
        return true;
    }

    Shape prefix(std::size_t n) const {
        return Shape(std::vector<std::size_t>(dims.begin(), dims.begin() + n));
    }

    Shape suffix(std::size_t n) const {
        return Shape(std::vector<std::size_t>(dims.end() - n, dims.end()));
    }

    friend Shape operator+(const Shape& a, const Shape& b) {
        Shape s = a;
        s.dims.insert(s.dims.end(), b.dims.begin(), b.dims.end());
        return s;
    }

    friend bool operator==(const Shape& a, const Shape& b) { return a.dims == b.dims; }
    friend bool operator!=(const Shape& a, const Shape& b) { return !(a == b); }

    std::string str() const {
        std::string s = "[";
        for (std::size_t i = 0; i < dims.size(); ++i) {
            if (i) s += " ";
            s += std::to_string(dims[i]);
        }
        return s + "]";
    }
};

// Atoms are immutable once built. Functions compare by identity, boxes by
// contents plus witnesses.
using Atom = std::variant<std::int64_t, double, bool, char32_t, FunctionRef, BoxRef>;

struct ArrayValue {
    Shape shape;
    std::vector<Atom> atoms; // row-major, atoms.size() == shape.elementCount()

    ArrayValue() : atoms{Atom(std::int64_t(0))} {} // scalar 0 by default

    ArrayValue(Shape s, std::vector<Atom> a) : shape(std::move(s)), atoms(std::move(a)) {}

    static ArrayValue scalar(Atom a) { return ArrayValue(Shape{}, {std::move(a)}); }

    static ArrayValue ints(Shape s, std::vector<std::int64_t> vs) {
        std::vector<Atom> atoms;
        atoms.reserve(vs.size());
        for (auto v : vs) atoms.emplace_back(v);
        return ArrayValue(std::move(s), std::move(atoms));
    }

    std::size_t rank() const { return shape.rank(); }
    bool isScalar() const { return shape.isScalar(); }
};

// Witness values recorded in a box: one per abstracted index variable,
// either a single dimension or a whole shape.
struct Witness {
    enum class Sort { Dim, Shape };
    Sort sort;
    std::size_t dim = 0;
    std::vector<std::size_t> shapeDims;

    static Witness ofDim(std::size_t d) { return {Sort::Dim, d, {}}; }
    static Witness ofShape(std::vector<std::size_t> s) { return {Sort::Shape, 0, std::move(s)}; }

    friend bool operator==(const Witness& a, const Witness& b) {
        if (a.sort != b.sort) return false;
        return a.sort == Sort::Dim ? a.dim == b.dim : a.shapeDims == b.shapeDims;
    }
};

struct BoxValue {
    ArrayValue contents;
    std::vector<Witness> witnesses;
};

// Per-parameter cell rank: a natural, or the whole argument as one cell.
struct CellRank {
    bool all = false;
    std::size_t rank = 0;

    static CellRank whole() { return {true, 0}; }
    static CellRank of(std::size_t r) { return {false, r}; }

    friend bool operator==(const CellRank& a, const CellRank& b) {
        return a.all == b.all && (a.all || a.rank == b.rank);
    }

    std::string str() const { return all ? "all" : std::to_string(rank); }
};

struct ClosureParam {
    std::string name;
    CellRank cellRank;
};

struct FunctionValue {
    // Closure: user code. Builtin: primitive identified by name.
    struct Closure {
        std::vector<ClosureParam> params;
        std::shared_ptr<const CoreExpr> body;
        std::shared_ptr<Environment> env;
        std::string name; // from define, or empty for anonymous
    };
    struct Builtin {
        std::string id;
    };

    std::variant<Closure, Builtin> impl;
    std::vector<CellRank> cellRanks;

    bool isBuiltin() const { return std::holds_alternative<Builtin>(impl); }
    const Builtin& builtin() const { return std::get<Builtin>(impl); }
    const Closure& closure() const { return std::get<Closure>(impl); }

    std::string displayName() const {
        if (isBuiltin()) return builtin().id;
        const auto& n = closure().name;
        return n.empty() ? "anon" : n;
    }
};

inline bool atomEqual(const Atom& a, const Atom& b);

inline bool arrayEqual(const ArrayValue& a, const ArrayValue& b) {
    if (a.shape != b.shape) return false;
    for (std::size_t i = 0; i < a.atoms.size(); ++i)
        if (!atomEqual(a.atoms[i], b.atoms[i])) return false;
    return true;
}

inline bool atomEqual(const Atom& a, const Atom& b) {
    if (a.index() != b.index()) return false;
    if (auto* x = std::get_if<std::int64_t>(&a)) return *x == std::get<std::int64_t>(b);
    if (auto* x = std::get_if<double>(&a)) return *x == std::get<double>(b);
    if (auto* x = std::get_if<bool>(&a)) return *x == std::get<bool>(b);
    if (auto* x = std::get_if<char32_t>(&a)) return *x == std::get<char32_t>(b);
    if (auto* x = std::get_if<FunctionRef>(&a)) return *x == std::get<FunctionRef>(b);
    const auto& bx = std::get<BoxRef>(a);
    const auto& by = std::get<BoxRef>(b);
    return bx->witnesses == by->witnesses && arrayEqual(bx->contents, by->contents);
}

inline bool isNumeric(const Atom& a) {
    return std::holds_alternative<std::int64_t>(a) || std::holds_alternative<double>(a);
}

inline double asDouble(const Atom& a) {
    if (auto* i = std::get_if<std::int64_t>(&a)) return static_cast<double>(*i);
    return std::get<double>(a);
}

} // namespace remora
