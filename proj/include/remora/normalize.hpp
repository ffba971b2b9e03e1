#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "remora/ast.hpp"

namespace remora {

// Normal forms for the index language. Dimensions become a constant plus a
// multiset of variables; shapes become a sequence of segments, each a
// normalized dimension or a shape variable. Two indices are equal exactly
// when their normal forms are identical.

struct NormalDim {
    std::size_t constant = 0;
    std::map<std::string, std::size_t> vars; // name -> multiplicity

    friend bool operator==(const NormalDim& a, const NormalDim& b) {
        return a.constant == b.constant && a.vars == b.vars;
    }
    friend bool operator!=(const NormalDim& a, const NormalDim& b) { return !(a == b); }

    bool isLiteral() const { return vars.empty(); }
};

struct NormalShape {
    using Segment = std::variant<NormalDim, std::string>; // dim or shape var
    std::vector<Segment> segments;

    friend bool operator==(const NormalShape& a, const NormalShape& b) {
        return a.segments == b.segments;
    }
    friend bool operator!=(const NormalShape& a, const NormalShape& b) { return !(a == b); }
};

inline NormalDim normalizeDim(const IndexPtr& i) {
    if (const auto* l = std::get_if<IndexAst::DimLit>(&i->node)) return {l->value, {}};
    if (const auto* v = std::get_if<IndexAst::DimVar>(&i->node)) return {0, {{v->name, 1}}};
    if (const auto* s = std::get_if<IndexAst::DimSum>(&i->node)) {
        NormalDim out;
        for (const IndexPtr& t : s->terms) {
            NormalDim d = normalizeDim(t);
            out.constant += d.constant;
            for (const auto& [name, count] : d.vars) out.vars[name] += count;
        }
        return out;
    }
    fail(Err::SortError, "shape index used where a dimension is required", i->pos);
}

inline NormalShape normalizeShape(const IndexPtr& i) {
    if (const auto* l = std::get_if<IndexAst::ShapeLit>(&i->node)) {
        NormalShape out;
        for (const IndexPtr& d : l->dims) out.segments.emplace_back(normalizeDim(d));
        return out;
    }
    if (const auto* v = std::get_if<IndexAst::ShapeVar>(&i->node))
        return {{NormalShape::Segment{v->name}}};
    if (const auto* c = std::get_if<IndexAst::ShapeConcat>(&i->node)) {
        NormalShape out;
        for (const IndexPtr& p : c->parts) {
            NormalShape s = normalizeShape(p);
            out.segments.insert(out.segments.end(), s.segments.begin(), s.segments.end());
        }
        return out;
    }
    fail(Err::SortError, "dimension index used where a shape is required", i->pos);
}

// Rebuild an index AST from a normal form (used to assemble result types).
inline IndexPtr dimToIndex(const NormalDim& d) {
    std::vector<IndexPtr> terms;
    if (d.constant > 0 || d.vars.empty())
        terms.push_back(IndexAst::make(IndexAst::DimLit{d.constant}));
    for (const auto& [name, count] : d.vars)
        for (std::size_t k = 0; k < count; ++k)
            terms.push_back(IndexAst::make(IndexAst::DimVar{name}));
    if (terms.size() == 1) return terms[0];
    return IndexAst::make(IndexAst::DimSum{std::move(terms)});
}

inline IndexPtr shapeToIndex(const NormalShape& s) {
    std::vector<IndexPtr> parts;
    std::vector<IndexPtr> run; // pending literal-dim run
    auto flushRun = [&] {
        if (!run.empty()) {
            parts.push_back(IndexAst::make(IndexAst::ShapeLit{std::move(run)}));
            run.clear();
        }
    };
    for (const auto& seg : s.segments) {
        if (const auto* d = std::get_if<NormalDim>(&seg)) {
            run.push_back(dimToIndex(*d));
        } else {
            flushRun();
            parts.push_back(IndexAst::make(IndexAst::ShapeVar{std::get<std::string>(seg)}));
        }
    }
    flushRun();
    if (parts.size() == 1) return parts[0];
    return IndexAst::make(IndexAst::ShapeConcat{std::move(parts)});
}

inline std::string printNormalDim(const NormalDim& d) {
    if (d.isLiteral()) return std::to_string(d.constant);
    std::string out;
    std::size_t terms = 0;
    for (const auto& [name, count] : d.vars) terms += count;
    if (d.constant > 0) ++terms;
    if (terms > 1) out += "(+ ";
    bool first = true;
    for (const auto& [name, count] : d.vars)
        for (std::size_t k = 0; k < count; ++k) {
            if (!first) out += " ";
            out += name;
            first = false;
        }
    if (d.constant > 0) {
        if (!first) out += " ";
        out += std::to_string(d.constant);
    }
    if (terms > 1) out += ")";
    return out;
}

inline std::string printNormalShape(const NormalShape& s) {
    std::string out;
    for (const auto& seg : s.segments) {
        if (!out.empty()) out += " ";
        if (const auto* d = std::get_if<NormalDim>(&seg))
            out += printNormalDim(*d);
        else
            out += std::get<std::string>(seg);
    }
    return out;
}

} // namespace remora
