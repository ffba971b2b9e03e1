#pragma once

#include <charconv>
#include <string>

#include "remora/reader.hpp"
#include "remora/value.hpp"

namespace remora {

// Canonical value printing:
//   - scalars print the bare atom
//   - rank >= 1 prints nested brackets, one space between siblings
//   - rank >= 2 breaks lines between items, aligning the opening brackets
//   - rank >= 3 additionally separates items with blank lines
//   - zero-extent arrays print as #(shape ...)[] since brackets cannot
//     express them

inline std::string formatValue(const ArrayValue& v);

namespace detail {

inline std::string formatFloat(double x) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    std::string s(buf, ptr);
    // keep floats re-readable as floats
    if (s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
        s.find("inf") == std::string::npos && s.find("nan") == std::string::npos)
        s += ".0";
    return s;
}

inline std::string formatAtom(const Atom& a) {
    if (const auto* i = std::get_if<std::int64_t>(&a)) return std::to_string(*i);
    if (const auto* d = std::get_if<double>(&a)) return formatFloat(*d);
    if (const auto* b = std::get_if<bool>(&a)) return *b ? "#t" : "#f";
    if (const auto* c = std::get_if<char32_t>(&a)) {
        if (*c == U' ') return "#\\space";
        std::string s = "#\\";
        appendUtf8(s, *c);
        return s;
    }
    if (const auto* f = std::get_if<FunctionRef>(&a)) {
        std::string s = "#<function " + (*f)->displayName() + " (";
        for (std::size_t i = 0; i < (*f)->cellRanks.size(); ++i) {
            if (i) s += " ";
            s += (*f)->cellRanks[i].str();
        }
        return s + ")>";
    }
    const BoxRef& box = std::get<BoxRef>(a);
    std::string s = "(box (";
    for (std::size_t i = 0; i < box->witnesses.size(); ++i) {
        if (i) s += " ";
        const Witness& w = box->witnesses[i];
        if (w.sort == Witness::Sort::Dim) {
            s += std::to_string(w.dim);
        } else {
            s += "[";
            for (std::size_t k = 0; k < w.shapeDims.size(); ++k) {
                if (k) s += " ";
                s += std::to_string(w.shapeDims[k]);
            }
            s += "]";
        }
    }
    return s + ") " + formatValue(box->contents) + ")";
}

inline std::string formatArray(const ArrayValue& v, std::size_t depth) {
    if (v.isScalar()) return formatAtom(v.atoms[0]);
    if (v.atoms.empty()) {
        std::string s = "#(shape";
        for (std::size_t d : v.shape.dims) s += " " + std::to_string(d);
        return s + ")[]";
    }
    std::size_t rank = v.rank();
    std::string out = "[";
    if (rank == 1) {
        for (std::size_t i = 0; i < v.atoms.size(); ++i) {
            if (i) out += " ";
            out += formatAtom(v.atoms[i]);
        }
        return out + "]";
    }
    // separator: one newline between matrix rows, an extra blank line per
    // additional rank, then indentation under the opening bracket
    std::string sep(rank - 1, '\n');
    sep += std::string(depth + 1, ' ');
    Shape itemShape = v.shape.suffix(rank - 1);
    std::size_t block = itemShape.elementCount();
    for (std::size_t i = 0; i < v.shape.dims[0]; ++i) {
        if (i) out += sep;
        ArrayValue item(itemShape,
                        std::vector<Atom>(v.atoms.begin() + static_cast<std::ptrdiff_t>(i * block),
                                          v.atoms.begin() +
                                              static_cast<std::ptrdiff_t>((i + 1) * block)));
        out += formatArray(item, depth + 1);
    }
    return out + "]";
}

} // namespace detail

inline std::string formatValue(const ArrayValue& v) { return detail::formatArray(v, 0); }

} // namespace remora
