#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "remora/error.hpp"

namespace remora {

enum class TokKind {
    LParen,
    RParen,
    LBracket,
    RBracket,
    Symbol,
    Int,
    Float,
    Bool,
    Char,
    String,
    Tilde,
};

struct Token {
    TokKind kind;
    std::string text;       // original spelling (post keyword normalization for symbols)
    SourcePos pos;
    std::int64_t intValue = 0;
    double floatValue = 0.0;
    bool boolValue = false;
    char32_t charValue = 0;
    std::u32string stringValue; // decoded codepoints, escapes resolved
};

// Surface tree. Paren and Bracket are notationally distinct and stay so.
struct SurfaceForm {
    enum class Kind { Paren, Bracket, Leaf, Rerank };
    Kind kind;
    Token leaf;                       // Leaf only
    std::vector<SurfaceForm> children; // Paren/Bracket elements; Rerank: target
    std::vector<std::size_t> ranks;    // Rerank only, each a natural
    SourcePos pos;
};

namespace detail {

// Incremental UTF-8 decoder. Rejects overlong encodings and stray bytes.
class Utf8Cursor {
public:
    explicit Utf8Cursor(std::string_view src) : src_(src) {}

    bool done() const { return off_ >= src_.size(); }
    SourcePos pos() const { return {line_, col_}; }

    char32_t peek() {
        std::size_t tmp = off_;
        return decodeAt(tmp);
    }

    char32_t next() {
        char32_t c = decodeAt(off_);
        if (c == U'\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }

private:
    char32_t decodeAt(std::size_t& off) {
        const auto* b = reinterpret_cast<const unsigned char*>(src_.data());
        unsigned char c0 = b[off];
        if (c0 < 0x80) {
            off += 1;
            return c0;
        }
        int len;
        char32_t cp;
        if ((c0 & 0xE0) == 0xC0) {
            len = 2;
            cp = c0 & 0x1F;
        } else if ((c0 & 0xF0) == 0xE0) {
            len = 3;
            cp = c0 & 0x0F;
        } else if ((c0 & 0xF8) == 0xF0) {
            len = 4;
            cp = c0 & 0x07;
        } else {
            fail(Err::IllegalCodepoint, "invalid UTF-8 byte", pos());
        }
        if (off + len > src_.size())
            fail(Err::IllegalCodepoint, "truncated UTF-8 sequence", pos());
        for (int i = 1; i < len; ++i) {
            unsigned char cc = b[off + i];
            if ((cc & 0xC0) != 0x80)
                fail(Err::IllegalCodepoint, "invalid UTF-8 continuation byte", pos());
            cp = (cp << 6) | (cc & 0x3F);
        }
        static const char32_t minByLen[5] = {0, 0, 0x80, 0x800, 0x10000};
        if (cp < minByLen[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF))
            fail(Err::IllegalCodepoint, "invalid codepoint", pos());
        off += len;
        return cp;
    }

    std::string_view src_;
    std::size_t off_ = 0;
    std::size_t line_ = 1;
    std::size_t col_ = 1;
};

inline void appendUtf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

inline std::string toUtf8(const std::u32string& s) {
    std::string out;
    for (char32_t c : s) appendUtf8(out, c);
    return out;
}

inline bool isDelimiter(char32_t c) {
    return c == U'(' || c == U')' || c == U'[' || c == U']' || c == U';' ||
           c == U'"' || c == U'~' || c == U' ' || c == U'\t' || c == U'\r' ||
           c == U'\n';
}

inline bool isDigit(char32_t c) { return c >= U'0' && c <= U'9'; }

// Anything that can sit inside a symbol. Letters, digits, the ASCII operator
// characters the language uses, and any non-ASCII codepoint (λ, →, Π, ...).
inline bool isSymbolChar(char32_t c) {
    if (c >= 0x80) return true;
    if ((c >= U'a' && c <= U'z') || (c >= U'A' && c <= U'Z') || isDigit(c)) return true;
    switch (c) {
    case U'+': case U'-': case U'*': case U'/': case U'<': case U'>':
    case U'=': case U'?': case U'!': case U'@': case U'#': case U'_':
    case U'.': case U'\'':
        return true;
    default:
        return false;
    }
}

// Seven keywords have dual ASCII/Unicode spellings; the reader folds both to
// the ASCII one so the rest of the pipeline sees a single spelling.
inline std::string normalizeKeyword(const std::string& s) {
    if (s == "λ") return "fn";            // λ
    if (s == "Tλ") return "t-fn";         // Tλ
    if (s == "Iλ") return "i-fn";         // Iλ
    if (s == "→") return "->";            // →
    if (s == "∀") return "Forall";        // ∀
    if (s == "Π") return "Pi";            // Π
    if (s == "Σ") return "Sigma";         // Σ
    return s;
}

} // namespace detail

inline std::vector<Token> tokenize(std::string_view source) {
    using namespace detail;
    std::vector<Token> out;
    Utf8Cursor cur(source);

    auto pushSimple = [&](TokKind k, SourcePos p, std::string text) {
        Token t;
        t.kind = k;
        t.text = std::move(text);
        t.pos = p;
        out.push_back(std::move(t));
    };

    while (!cur.done()) {
        SourcePos p = cur.pos();
        char32_t c = cur.peek();
        if (c == U' ' || c == U'\t' || c == U'\r' || c == U'\n') {
            cur.next();
            continue;
        }
        if (c == U';') { // comment to end of line
            while (!cur.done() && cur.peek() != U'\n') cur.next();
            continue;
        }
        if (c == U'(') { cur.next(); pushSimple(TokKind::LParen, p, "("); continue; }
        if (c == U')') { cur.next(); pushSimple(TokKind::RParen, p, ")"); continue; }
        if (c == U'[') { cur.next(); pushSimple(TokKind::LBracket, p, "["); continue; }
        if (c == U']') { cur.next(); pushSimple(TokKind::RBracket, p, "]"); continue; }
        if (c == U'~') { cur.next(); pushSimple(TokKind::Tilde, p, "~"); continue; }
        if (c == U'"') {
            cur.next();
            std::u32string value;
            std::string text = "\"";
            bool closed = false;
            while (!cur.done()) {
                char32_t ch = cur.next();
                if (ch == U'"') {
                    closed = true;
                    break;
                }
                if (ch == U'\\') {
                    // escape support is an extension; only \\ and \" accepted
                    if (cur.done()) break;
                    char32_t esc = cur.next();
                    if (esc != U'\\' && esc != U'"')
                        fail(Err::BadCharLiteral, "unknown string escape", p);
                    value.push_back(esc);
                    text.push_back('\\');
                    appendUtf8(text, esc);
                    continue;
                }
                value.push_back(ch);
                appendUtf8(text, ch);
            }
            if (!closed) fail(Err::UnterminatedString, "string literal never closed", p);
            text += "\"";
            Token t;
            t.kind = TokKind::String;
            t.text = std::move(text);
            t.pos = p;
            t.stringValue = std::move(value);
            out.push_back(std::move(t));
            continue;
        }
        if (c == U'#') {
            cur.next();
            if (cur.done()) fail(Err::BadCharLiteral, "lone '#'", p);
            char32_t c2 = cur.next();
            if (c2 == U't' || c2 == U'f') {
                if (!cur.done() && !isDelimiter(cur.peek()))
                    fail(Err::BadCharLiteral, "garbage after boolean literal", p);
                Token t;
                t.kind = TokKind::Bool;
                t.text = c2 == U't' ? "#t" : "#f";
                t.pos = p;
                t.boolValue = (c2 == U't');
                out.push_back(std::move(t));
                continue;
            }
            if (c2 == U'\\') {
                if (cur.done()) fail(Err::BadCharLiteral, "dangling character literal", p);
                std::u32string name;
                name.push_back(cur.next());
                while (!cur.done() && !isDelimiter(cur.peek())) name.push_back(cur.next());
                char32_t value;
                if (name.size() == 1) {
                    value = name[0];
                } else if (name == U"space") {
                    value = U' ';
                } else {
                    fail(Err::BadCharLiteral, "unknown character name '" + toUtf8(name) + "'", p);
                }
                Token t;
                t.kind = TokKind::Char;
                t.text = "#\\" + toUtf8(name);
                t.pos = p;
                t.charValue = value;
                out.push_back(std::move(t));
                continue;
            }
            fail(Err::BadCharLiteral, "unknown '#' syntax", p);
        }

        // number or symbol
        bool negNumber = false;
        if (c == U'-') {
            // peek past the '-' to see whether a digit follows
            std::u32string probe;
            cur.next();
            if (!cur.done() && isDigit(cur.peek())) {
                negNumber = true;
            } else {
                // plain symbol starting with '-'
                std::string sym = "-";
                while (!cur.done() && isSymbolChar(cur.peek())) appendUtf8(sym, cur.next());
                if (!cur.done() && !isDelimiter(cur.peek()))
                    fail(Err::IllegalCodepoint, "character not allowed here", cur.pos());
                pushSimple(TokKind::Symbol, p, normalizeKeyword(sym));
                continue;
            }
        }
        if (negNumber || isDigit(c)) {
            std::string digits = negNumber ? "-" : "";
            while (!cur.done() && isDigit(cur.peek())) appendUtf8(digits, cur.next());
            bool isFloat = false;
            if (!cur.done() && cur.peek() == U'.') {
                cur.next();
                isFloat = true;
                digits.push_back('.');
                if (cur.done() || !isDigit(cur.peek()))
                    fail(Err::BadNumberLiteral, "digits required after decimal point", p);
                while (!cur.done() && isDigit(cur.peek())) appendUtf8(digits, cur.next());
            }
            if (!cur.done() && !isDelimiter(cur.peek()))
                fail(Err::BadNumberLiteral, "malformed numeral '" + digits + "...'", p);
            Token t;
            t.kind = isFloat ? TokKind::Float : TokKind::Int;
            t.text = digits;
            t.pos = p;
            if (isFloat) {
                t.floatValue = std::stod(digits);
            } else {
                try {
                    t.intValue = std::stoll(digits);
                } catch (const std::out_of_range&) {
                    fail(Err::BadNumberLiteral, "integer literal out of range", p);
                }
            }
            out.push_back(std::move(t));
            continue;
        }
        if (isSymbolChar(c)) {
            std::string sym;
            while (!cur.done() && isSymbolChar(cur.peek())) appendUtf8(sym, cur.next());
            pushSimple(TokKind::Symbol, p, normalizeKeyword(sym));
            continue;
        }
        fail(Err::IllegalCodepoint, "character not allowed here", p);
    }
    return out;
}

namespace detail {

class Parser {
public:
    explicit Parser(const std::vector<Token>& toks) : toks_(toks) {}

    std::vector<SurfaceForm> parseAll() {
        std::vector<SurfaceForm> forms;
        while (!done()) forms.push_back(parseForm());
        return forms;
    }

private:
    bool done() const { return i_ >= toks_.size(); }
    const Token& peek() const { return toks_[i_]; }
    const Token& next() { return toks_[i_++]; }

    SurfaceForm parseForm() {
        const Token& t = peek();
        switch (t.kind) {
        case TokKind::LParen:
            return parseList(TokKind::RParen, SurfaceForm::Kind::Paren);
        case TokKind::LBracket:
            return parseList(TokKind::RBracket, SurfaceForm::Kind::Bracket);
        case TokKind::RParen:
        case TokKind::RBracket:
            fail(Err::UnbalancedDelimiter, "unexpected closing delimiter", t.pos);
        case TokKind::Tilde:
            return parseRerank();
        default: {
            SurfaceForm f;
            f.kind = SurfaceForm::Kind::Leaf;
            f.leaf = next();
            f.pos = f.leaf.pos;
            return f;
        }
        }
    }

    SurfaceForm parseList(TokKind closer, SurfaceForm::Kind kind) {
        const Token& open = next();
        SurfaceForm f;
        f.kind = kind;
        f.pos = open.pos;
        while (true) {
            if (done())
                fail(Err::UnbalancedDelimiter, "unclosed delimiter", open.pos);
            if (peek().kind == TokKind::RParen || peek().kind == TokKind::RBracket) {
                const Token& close = next();
                if (close.kind != closer)
                    fail(Err::MismatchedDelimiter,
                         std::string("'") + open.text + "' closed by '" + close.text + "'",
                         close.pos);
                return f;
            }
            f.children.push_back(parseForm());
        }
    }

    // ~(r1 ... rn)form  or  ~[r1 ... rn]form
    SurfaceForm parseRerank() {
        const Token& tilde = next();
        if (done() || (peek().kind != TokKind::LParen && peek().kind != TokKind::LBracket))
            fail(Err::DanglingRerank, "'~' must be followed by a rank list", tilde.pos);
        SurfaceForm rankList = parseForm();
        if (rankList.children.empty())
            fail(Err::DanglingRerank, "rerank rank list is empty", tilde.pos);
        std::vector<std::size_t> ranks;
        for (const SurfaceForm& r : rankList.children) {
            if (r.kind != SurfaceForm::Kind::Leaf || r.leaf.kind != TokKind::Int ||
                r.leaf.intValue < 0)
                fail(Err::DanglingRerank, "rerank ranks must be naturals", r.pos);
            ranks.push_back(static_cast<std::size_t>(r.leaf.intValue));
        }
        if (done())
            fail(Err::DanglingRerank, "'~' rank list must be followed by a form", tilde.pos);
        SurfaceForm f;
        f.kind = SurfaceForm::Kind::Rerank;
        f.pos = tilde.pos;
        f.ranks = std::move(ranks);
        f.children.push_back(parseForm());
        return f;
    }

    const std::vector<Token>& toks_;
    std::size_t i_ = 0;
};

} // namespace detail

inline std::vector<SurfaceForm> parse(const std::vector<Token>& tokens) {
    return detail::Parser(tokens).parseAll();
}

inline std::vector<SurfaceForm> readForms(std::string_view source) {
    return parse(tokenize(source));
}

// Debug printer; output re-reads to a structurally identical tree.
inline std::string printSurface(const SurfaceForm& f) {
    switch (f.kind) {
    case SurfaceForm::Kind::Leaf: {
        const Token& t = f.leaf;
        switch (t.kind) {
        case TokKind::Int: return std::to_string(t.intValue);
        case TokKind::Float:
            return t.text; // original spelling is already canonical enough for debug
        case TokKind::Bool: return t.boolValue ? "#t" : "#f";
        case TokKind::Char: {
            if (t.charValue == U' ') return "#\\space";
            std::string s = "#\\";
            detail::appendUtf8(s, t.charValue);
            return s;
        }
        case TokKind::String: {
            std::string s = "\"";
            for (char32_t c : t.stringValue) {
                if (c == U'"' || c == U'\\') s.push_back('\\');
                detail::appendUtf8(s, c);
            }
            s += "\"";
            return s;
        }
        default: return t.text;
        }
    }
    case SurfaceForm::Kind::Paren:
    case SurfaceForm::Kind::Bracket: {
        bool paren = f.kind == SurfaceForm::Kind::Paren;
        std::string s(1, paren ? '(' : '[');
        for (std::size_t i = 0; i < f.children.size(); ++i) {
            if (i) s.push_back(' ');
            s += printSurface(f.children[i]);
        }
        s.push_back(paren ? ')' : ']');
        return s;
    }
    case SurfaceForm::Kind::Rerank: {
        std::string s = "~(";
        for (std::size_t i = 0; i < f.ranks.size(); ++i) {
            if (i) s.push_back(' ');
            s += std::to_string(f.ranks[i]);
        }
        s += ")";
        s += printSurface(f.children[0]);
        return s;
    }
    }
    return {};
}

// Structural equality on parsed values (token text is ignored).
inline bool surfaceEqual(const SurfaceForm& a, const SurfaceForm& b) {
    if (a.kind != b.kind) return false;
    if (a.kind == SurfaceForm::Kind::Leaf) {
        const Token& x = a.leaf;
        const Token& y = b.leaf;
        if (x.kind != y.kind) return false;
        switch (x.kind) {
        case TokKind::Int: return x.intValue == y.intValue;
        case TokKind::Float: return x.floatValue == y.floatValue;
        case TokKind::Bool: return x.boolValue == y.boolValue;
        case TokKind::Char: return x.charValue == y.charValue;
        case TokKind::String: return x.stringValue == y.stringValue;
        case TokKind::Symbol: return x.text == y.text;
        default: return true;
        }
    }
    if (a.ranks != b.ranks) return false;
    if (a.children.size() != b.children.size()) return false;
    for (std::size_t i = 0; i < a.children.size(); ++i)
        if (!surfaceEqual(a.children[i], b.children[i])) return false;
    return true;
}

} // namespace remora
