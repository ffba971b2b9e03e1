#pragma once

#include <atomic>
#include <string>
#include <vector>

#include "remora/ast.hpp"
#include "remora/reader.hpp"

namespace remora {

namespace detail {

inline std::atomic<std::uint64_t> freshCounter{0};

// '%' cannot appear in user symbols, so generated names can never collide.
inline std::string freshName(const char* stem) {
    return std::string("%") + stem + std::to_string(freshCounter.fetch_add(1));
}

inline bool isLeafSymbol(const SurfaceForm& f, const char* name) {
    return f.kind == SurfaceForm::Kind::Leaf && f.leaf.kind == TokKind::Symbol &&
           f.leaf.text == name;
}

inline bool isListForm(const SurfaceForm& f) {
    return f.kind == SurfaceForm::Kind::Paren || f.kind == SurfaceForm::Kind::Bracket;
}

inline const std::string& symbolName(const SurfaceForm& f, const char* what) {
    if (f.kind != SurfaceForm::Kind::Leaf || f.leaf.kind != TokKind::Symbol)
        fail(Err::MalformedForm, std::string("expected ") + what, f.pos);
    return f.leaf.text;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Index and type surface syntax (typed dialect; also used by boxes forms).

inline IndexPtr desugarIndex(const SurfaceForm& f);

// Splicing-shape bracket: dims and shapes in sequence, shapes spliced in.
inline IndexPtr desugarSpliceShape(const SurfaceForm& f) {
    std::vector<IndexPtr> parts;
    for (const SurfaceForm& c : f.children) {
        IndexPtr i = desugarIndex(c);
        if (std::holds_alternative<IndexAst::ShapeVar>(i->node) ||
            std::holds_alternative<IndexAst::ShapeLit>(i->node) ||
            std::holds_alternative<IndexAst::ShapeConcat>(i->node)) {
            parts.push_back(std::move(i));
        } else {
            parts.push_back(IndexAst::make(IndexAst::ShapeLit{{std::move(i)}}, c.pos));
        }
    }
    return IndexAst::make(IndexAst::ShapeConcat{std::move(parts)}, f.pos);
}

inline IndexPtr desugarIndex(const SurfaceForm& f) {
    switch (f.kind) {
    case SurfaceForm::Kind::Leaf: {
        const Token& t = f.leaf;
        if (t.kind == TokKind::Int) {
            if (t.intValue < 0)
                fail(Err::SortError, "dimensions are naturals", t.pos);
            return IndexAst::make(IndexAst::DimLit{static_cast<std::size_t>(t.intValue)}, t.pos);
        }
        if (t.kind == TokKind::Symbol) {
            if (!t.text.empty() && t.text[0] == '@')
                return IndexAst::make(IndexAst::ShapeVar{t.text}, t.pos);
            return IndexAst::make(IndexAst::DimVar{t.text}, t.pos);
        }
        fail(Err::SortError, "not an index", t.pos);
    }
    case SurfaceForm::Kind::Bracket:
        return desugarSpliceShape(f);
    case SurfaceForm::Kind::Paren: {
        if (f.children.empty())
            fail(Err::SortError, "empty index form", f.pos);
        const std::string& head = detail::symbolName(f.children[0], "index operator");
        std::vector<IndexPtr> rest;
        for (std::size_t i = 1; i < f.children.size(); ++i)
            rest.push_back(desugarIndex(f.children[i]));
        if (head == "+") return IndexAst::make(IndexAst::DimSum{std::move(rest)}, f.pos);
        if (head == "shape") return IndexAst::make(IndexAst::ShapeLit{std::move(rest)}, f.pos);
        if (head == "++") return IndexAst::make(IndexAst::ShapeConcat{std::move(rest)}, f.pos);
        fail(Err::SortError, "unknown index operator '" + head + "'", f.pos);
    }
    default:
        fail(Err::SortError, "not an index", f.pos);
    }
}

inline TypePtr desugarType(const SurfaceForm& f) {
    switch (f.kind) {
    case SurfaceForm::Kind::Leaf: {
        const Token& t = f.leaf;
        if (t.kind != TokKind::Symbol) fail(Err::KindError, "not a type", t.pos);
        if (t.text == "int") return TypeAst::make(TypeAst::Base{BaseType::Int}, t.pos);
        if (t.text == "float") return TypeAst::make(TypeAst::Base{BaseType::Float}, t.pos);
        if (t.text == "bool") return TypeAst::make(TypeAst::Base{BaseType::Bool}, t.pos);
        if (t.text == "char") return TypeAst::make(TypeAst::Base{BaseType::Char}, t.pos);
        if (!t.text.empty() && t.text[0] == '@')
            return TypeAst::make(TypeAst::ArrVar{t.text}, t.pos);
        return TypeAst::make(TypeAst::ElemVar{t.text}, t.pos);
    }
    case SurfaceForm::Kind::Bracket: {
        // [t i1 ... in]  ==  (A t [i1 ... in])
        if (f.children.empty()) fail(Err::KindError, "empty array type", f.pos);
        TypePtr elem = desugarType(f.children[0]);
        SurfaceForm shapePart = f;
        shapePart.children.erase(shapePart.children.begin());
        return TypeAst::make(TypeAst::Arr{std::move(elem), desugarSpliceShape(shapePart)}, f.pos);
    }
    case SurfaceForm::Kind::Paren: {
        if (f.children.empty()) fail(Err::KindError, "empty type form", f.pos);
        const std::string& head = detail::symbolName(f.children[0], "type constructor");
        if (head == "A") {
            if (f.children.size() != 3) fail(Err::KindError, "(A elem shape) takes two parts", f.pos);
            return TypeAst::make(
                TypeAst::Arr{desugarType(f.children[1]), desugarIndex(f.children[2])}, f.pos);
        }
        if (head == "->") {
            if (f.children.size() != 3 || !detail::isListForm(f.children[1]))
                fail(Err::KindError, "(-> (arg ...) result)", f.pos);
            TypeAst::Fn fn;
            for (const SurfaceForm& a : f.children[1].children) fn.args.push_back(desugarType(a));
            fn.result = desugarType(f.children[2]);
            return TypeAst::make(std::move(fn), f.pos);
        }
        if (head == "Forall") {
            if (f.children.size() != 3 || !detail::isListForm(f.children[1]))
                fail(Err::KindError, "(Forall (var ...) type)", f.pos);
            TypeAst::Forall fa;
            for (const SurfaceForm& v : f.children[1].children) {
                const std::string& n = detail::symbolName(v, "type variable");
                fa.vars.push_back({n, n.size() > 0 && n[0] == '@' ? TypeVarFlavor::Array
                                                                  : TypeVarFlavor::Elem});
            }
            fa.body = desugarType(f.children[2]);
            return TypeAst::make(std::move(fa), f.pos);
        }
        if (head == "Pi" || head == "Sigma") {
            if (f.children.size() != 3 || !detail::isListForm(f.children[1]))
                fail(Err::KindError, "(" + head + " (ivar ...) type)", f.pos);
            std::vector<IndexVarBinder> vars;
            for (const SurfaceForm& v : f.children[1].children) {
                const std::string& n = detail::symbolName(v, "index variable");
                vars.push_back({n, n.size() > 0 && n[0] == '@' ? IndexSort::Shape : IndexSort::Dim});
            }
            TypePtr body = desugarType(f.children[2]);
            if (head == "Pi")
                return TypeAst::make(TypeAst::Pi{std::move(vars), std::move(body)}, f.pos);
            return TypeAst::make(TypeAst::Sigma{std::move(vars), std::move(body)}, f.pos);
        }
        fail(Err::KindError, "unknown type constructor '" + head + "'", f.pos);
    }
    default:
        fail(Err::KindError, "not a type", f.pos);
    }
}

// ---------------------------------------------------------------------------
// Expressions.

inline ExprPtr desugar(const SurfaceForm& form);

namespace detail {

inline Atom literalAtom(const Token& t) {
    switch (t.kind) {
    case TokKind::Int: return Atom(t.intValue);
    case TokKind::Float: return Atom(t.floatValue);
    case TokKind::Bool: return Atom(t.boolValue);
    case TokKind::Char: return Atom(t.charValue);
    default: fail(Err::MalformedForm, "not a literal atom", t.pos);
    }
}

// Collapse a frame whose children are all array literals of one shape.
inline ExprPtr makeFrame(std::vector<std::size_t> dims, std::vector<ExprPtr> exprs,
                         SourcePos pos) {
    std::size_t want = 1;
    for (std::size_t d : dims) want *= d;
    if (exprs.size() != want)
        fail(Err::BadFrameArity, "frame of shape " + Shape(std::vector<std::size_t>(dims)).str() +
                                     " needs " + std::to_string(want) + " expressions, got " +
                                     std::to_string(exprs.size()),
             pos);
    bool allLits = true;
    for (const ExprPtr& e : exprs)
        if (!e->as<CoreExpr::ArrayLit>()) { allLits = false; break; }
    if (allLits) {
        Shape cellShape;
        if (!exprs.empty()) cellShape = exprs[0]->as<CoreExpr::ArrayLit>()->shape;
        for (const ExprPtr& e : exprs)
            if (e->as<CoreExpr::ArrayLit>()->shape != cellShape)
                fail(Err::RaggedLiteral, "array literal elements have different shapes: " +
                                             cellShape.str() + " vs " +
                                             e->as<CoreExpr::ArrayLit>()->shape.str(),
                     pos);
        CoreExpr::ArrayLit lit;
        lit.shape = Shape(std::vector<std::size_t>(dims)) + cellShape;
        for (const ExprPtr& e : exprs) {
            const auto* a = e->as<CoreExpr::ArrayLit>();
            lit.atoms.insert(lit.atoms.end(), a->atoms.begin(), a->atoms.end());
        }
        return CoreExpr::make(std::move(lit), pos);
    }
    return CoreExpr::make(CoreExpr::Frame{std::move(dims), std::move(exprs)}, pos);
}

inline std::vector<std::size_t> literalDims(const SurfaceForm& f) {
    if (f.kind != SurfaceForm::Kind::Bracket)
        fail(Err::MalformedForm, "expected a bracketed dimension list", f.pos);
    std::vector<std::size_t> dims;
    for (const SurfaceForm& c : f.children) {
        if (c.kind != SurfaceForm::Kind::Leaf || c.leaf.kind != TokKind::Int ||
            c.leaf.intValue < 0)
            fail(Err::MalformedForm, "dimensions must be natural numbers", c.pos);
        dims.push_back(static_cast<std::size_t>(c.leaf.intValue));
    }
    return dims;
}

inline LambdaParam desugarParam(const SurfaceForm& p) {
    if (p.kind == SurfaceForm::Kind::Leaf) {
        // bare name: scalar cell (seen in the lex< comparison lambda)
        return {symbolName(p, "parameter name"), CellRank::of(0), nullptr};
    }
    if (!isListForm(p) || p.children.size() != 2)
        fail(Err::MalformedForm, "parameter must be [name rank-or-type]", p.pos);
    LambdaParam out;
    out.name = symbolName(p.children[0], "parameter name");
    const SurfaceForm& ann = p.children[1];
    if (ann.kind == SurfaceForm::Kind::Leaf && ann.leaf.kind == TokKind::Int) {
        if (ann.leaf.intValue < 0)
            fail(Err::MalformedForm, "cell ranks are naturals", ann.pos);
        out.rank = CellRank::of(static_cast<std::size_t>(ann.leaf.intValue));
    } else if (isLeafSymbol(ann, "all")) {
        out.rank = CellRank::whole();
    } else {
        out.type = desugarType(ann);
    }
    return out;
}

inline std::vector<LambdaParam> desugarParamList(const SurfaceForm& list) {
    if (!isListForm(list))
        fail(Err::MalformedForm, "expected a parameter list", list.pos);
    std::vector<LambdaParam> params;
    for (const SurfaceForm& p : list.children) params.push_back(desugarParam(p));
    for (std::size_t i = 0; i < params.size(); ++i)
        for (std::size_t j = i + 1; j < params.size(); ++j)
            if (params[i].name == params[j].name)
                fail(Err::MalformedForm, "duplicate parameter '" + params[i].name + "'", list.pos);
    return params;
}

inline std::vector<CoreExpr::Binding> desugarBindings(const SurfaceForm& list, bool& sawRanked,
                                                      CoreExpr::Binding* rankedOut,
                                                      LambdaParam* rankedParam) {
    if (!isListForm(list)) fail(Err::MalformedForm, "expected a binding list", list.pos);
    std::vector<CoreExpr::Binding> out;
    sawRanked = false;
    for (const SurfaceForm& b : list.children) {
        if (!isListForm(b) || b.children.size() < 2 || b.children.size() > 3)
            fail(Err::MalformedForm, "binding must be (name expr) or (name rank expr)", b.pos);
        if (b.children.size() == 3) {
            // (name rank expr): a beta-redex of a ranked lambda
            if (sawRanked || list.children.size() != 1)
                fail(Err::MalformedForm, "ranked let binding must be the only binding", b.pos);
            sawRanked = true;
            *rankedParam = desugarParam(SurfaceForm{SurfaceForm::Kind::Bracket,
                                                    {},
                                                    {b.children[0], b.children[1]},
                                                    {},
                                                    b.pos});
            rankedOut->name = rankedParam->name;
            rankedOut->expr = desugar(b.children[2]);
            continue;
        }
        out.push_back({symbolName(b.children[0], "binding name"), desugar(b.children[1])});
    }
    return out;
}

} // namespace detail

// Rewrites ~(r1 .. rn)exp into the side-effect-safe eta-expansion
//   (let ((f exp)) (fn ([v1 r1] .. [vn rn]) (f v1 .. vn)))
inline ExprPtr desugarRerank(const std::vector<std::size_t>& ranks, ExprPtr target,
                             SourcePos pos) {
    std::string f = detail::freshName("f");
    CoreExpr::Lambda lam;
    CoreExpr::App call;
    call.fn = CoreExpr::make(CoreExpr::Var{f}, pos);
    for (std::size_t r : ranks) {
        std::string v = detail::freshName("v");
        lam.params.push_back({v, CellRank::of(r), nullptr});
        call.args.push_back(CoreExpr::make(CoreExpr::Var{v}, pos));
    }
    lam.body = CoreExpr::make(std::move(call), pos);
    CoreExpr::Let let;
    let.bindings.push_back({f, std::move(target)});
    let.body = CoreExpr::make(std::move(lam), pos);
    return CoreExpr::make(std::move(let), pos);
}

// (box ((ivar idx) ...) tau exp) => (boxes (ivar ...) tau [] ((idx ...) exp))
inline ExprPtr desugarBox(const SurfaceForm& f) {
    if (f.children.size() != 4 || !detail::isListForm(f.children[1]))
        fail(Err::MalformedBox, "(box ((ivar index) ...) type expr)", f.pos);
    CoreExpr::Boxes boxes;
    CoreExpr::BoxClause clause;
    for (const SurfaceForm& b : f.children[1].children) {
        if (!detail::isListForm(b) || b.children.size() != 2)
            fail(Err::MalformedBox, "box binder must pair an index variable with its witness",
                 b.pos);
        const std::string& n = detail::symbolName(b.children[0], "index variable");
        boxes.ivars.push_back(
            {n, !n.empty() && n[0] == '@' ? IndexSort::Shape : IndexSort::Dim});
        clause.witnesses.push_back(desugarIndex(b.children[1]));
    }
    boxes.declared = desugarType(f.children[2]);
    clause.expr = desugar(f.children[3]);
    boxes.clauses.push_back(std::move(clause));
    return CoreExpr::make(std::move(boxes), f.pos);
}

inline ExprPtr desugar(const SurfaceForm& form) {
    using detail::isLeafSymbol;
    using detail::isListForm;
    using detail::symbolName;

    switch (form.kind) {
    case SurfaceForm::Kind::Leaf: {
        const Token& t = form.leaf;
        if (t.kind == TokKind::Symbol)
            return CoreExpr::make(CoreExpr::Var{t.text}, t.pos);
        if (t.kind == TokKind::String) {
            CoreExpr::ArrayLit lit;
            lit.shape = Shape{t.stringValue.size()};
            for (char32_t c : t.stringValue) lit.atoms.emplace_back(c);
            return CoreExpr::make(std::move(lit), t.pos);
        }
        CoreExpr::ArrayLit lit;
        lit.atoms.push_back(detail::literalAtom(t));
        return CoreExpr::make(std::move(lit), t.pos);
    }

    case SurfaceForm::Kind::Bracket: {
        std::vector<ExprPtr> exprs;
        for (const SurfaceForm& c : form.children) exprs.push_back(desugar(c));
        return detail::makeFrame({form.children.size()}, std::move(exprs), form.pos);
    }

    case SurfaceForm::Kind::Rerank:
        return desugarRerank(form.ranks, desugar(form.children[0]), form.pos);

    case SurfaceForm::Kind::Paren:
        break;
    }

    const SurfaceForm& f = form;
    if (f.children.empty())
        fail(Err::MalformedForm, "empty application", f.pos);
    const SurfaceForm& head = f.children[0];

    if (head.kind == SurfaceForm::Kind::Leaf && head.leaf.kind == TokKind::Symbol) {
        const std::string& kw = head.leaf.text;

        if (kw == "array") {
            if (f.children.size() < 2)
                fail(Err::MalformedForm, "(array [dims] atom ...)", f.pos);
            std::vector<std::size_t> dims = detail::literalDims(f.children[1]);
            bool allAtoms = true;
            for (std::size_t i = 2; i < f.children.size(); ++i) {
                const SurfaceForm& c = f.children[i];
                if (c.kind != SurfaceForm::Kind::Leaf || c.leaf.kind == TokKind::Symbol ||
                    c.leaf.kind == TokKind::String) {
                    allAtoms = false;
                    break;
                }
            }
            if (allAtoms) {
                CoreExpr::ArrayLit lit;
                lit.shape = Shape(std::vector<std::size_t>(dims));
                for (std::size_t i = 2; i < f.children.size(); ++i)
                    lit.atoms.push_back(detail::literalAtom(f.children[i].leaf));
                if (lit.atoms.size() != lit.shape.elementCount())
                    fail(Err::BadFrameArity,
                         "array of shape " + lit.shape.str() + " needs " +
                             std::to_string(lit.shape.elementCount()) + " atoms, got " +
                             std::to_string(lit.atoms.size()),
                         f.pos);
                return CoreExpr::make(std::move(lit), f.pos);
            }
            // non-literal elements (e.g. lambda atoms): treat as a frame
            std::vector<ExprPtr> exprs;
            for (std::size_t i = 2; i < f.children.size(); ++i)
                exprs.push_back(desugar(f.children[i]));
            return detail::makeFrame(std::move(dims), std::move(exprs), f.pos);
        }

        if (kw == "frame") {
            if (f.children.size() < 2)
                fail(Err::MalformedForm, "(frame [dims] expr ...)", f.pos);
            std::vector<std::size_t> dims = detail::literalDims(f.children[1]);
            std::vector<ExprPtr> exprs;
            for (std::size_t i = 2; i < f.children.size(); ++i)
                exprs.push_back(desugar(f.children[i]));
            return detail::makeFrame(std::move(dims), std::move(exprs), f.pos);
        }

        if (kw == "fn") {
            if (f.children.size() != 3)
                fail(Err::MalformedForm, "(fn (params) body)", f.pos);
            CoreExpr::Lambda lam;
            lam.params = detail::desugarParamList(f.children[1]);
            lam.body = desugar(f.children[2]);
            return CoreExpr::make(std::move(lam), f.pos);
        }

        if (kw == "define") {
            if (f.children.size() < 3)
                fail(Err::MalformedForm, "(define name expr) or (define (name params...) body)",
                     f.pos);
            if (isListForm(f.children[1])) {
                // (define (f p ...) body) => (define f (fn (p ...) body))
                const SurfaceForm& sig = f.children[1];
                if (sig.children.empty() || f.children.size() != 3)
                    fail(Err::MalformedForm, "(define (name params...) body)", f.pos);
                CoreExpr::Lambda lam;
                SurfaceForm paramList = sig;
                paramList.children.erase(paramList.children.begin());
                lam.params = detail::desugarParamList(paramList);
                lam.body = desugar(f.children[2]);
                return CoreExpr::make(
                    CoreExpr::Define{symbolName(sig.children[0], "definition name"),
                                     CoreExpr::make(std::move(lam), f.pos)},
                    f.pos);
            }
            if (f.children.size() != 3)
                fail(Err::MalformedForm, "(define name expr)", f.pos);
            return CoreExpr::make(CoreExpr::Define{symbolName(f.children[1], "definition name"),
                                                   desugar(f.children[2])},
                                  f.pos);
        }

        if (kw == "if") {
            if (f.children.size() != 4)
                fail(Err::MalformedForm, "(if test then else)", f.pos);
            return CoreExpr::make(
                CoreExpr::If{desugar(f.children[1]), desugar(f.children[2]),
                             desugar(f.children[3])},
                f.pos);
        }

        if (kw == "cond") {
            CoreExpr::Cond cond;
            bool sawElse = false;
            for (std::size_t i = 1; i < f.children.size(); ++i) {
                const SurfaceForm& cl = f.children[i];
                if (!isListForm(cl) || cl.children.size() != 2)
                    fail(Err::MalformedForm, "cond clause must be (test expr)", cl.pos);
                if (isLeafSymbol(cl.children[0], "else")) {
                    if (i + 1 != f.children.size())
                        fail(Err::MalformedForm, "else clause must come last", cl.pos);
                    cond.elseBranch = desugar(cl.children[1]);
                    sawElse = true;
                    break;
                }
                cond.clauses.emplace_back(desugar(cl.children[0]), desugar(cl.children[1]));
            }
            if (!sawElse)
                fail(Err::MalformedForm, "cond requires an else clause", f.pos);
            return CoreExpr::make(std::move(cond), f.pos);
        }

        if (kw == "let" || kw == "let*") {
            if (f.children.size() != 3)
                fail(Err::MalformedForm, "(" + kw + " (bindings) body)", f.pos);
            bool ranked = false;
            CoreExpr::Binding rankedBinding;
            LambdaParam rankedParam;
            std::vector<CoreExpr::Binding> bindings =
                detail::desugarBindings(f.children[1], ranked, &rankedBinding, &rankedParam);
            ExprPtr body = desugar(f.children[2]);
            if (ranked) {
                // (let ((y r e)) body) is the beta-redex ((fn ([y r]) body) e)
                CoreExpr::Lambda lam;
                lam.params.push_back(rankedParam);
                lam.body = std::move(body);
                CoreExpr::App app;
                app.fn = CoreExpr::make(std::move(lam), f.pos);
                app.args.push_back(rankedBinding.expr);
                return CoreExpr::make(std::move(app), f.pos);
            }
            if (kw == "let")
                return CoreExpr::make(CoreExpr::Let{std::move(bindings), std::move(body)}, f.pos);
            return CoreExpr::make(CoreExpr::LetStar{std::move(bindings), std::move(body)}, f.pos);
        }

        if (kw == "t-fn") {
            if (f.children.size() != 3 || !isListForm(f.children[1]))
                fail(Err::MalformedForm, "(t-fn (tvars) body)", f.pos);
            CoreExpr::TLambda tl;
            for (const SurfaceForm& v : f.children[1].children) {
                const std::string& n = symbolName(v, "type variable");
                tl.vars.push_back({n, !n.empty() && n[0] == '@' ? TypeVarFlavor::Array
                                                                : TypeVarFlavor::Elem});
            }
            tl.body = desugar(f.children[2]);
            return CoreExpr::make(std::move(tl), f.pos);
        }

        if (kw == "i-fn") {
            if (f.children.size() != 3 || !isListForm(f.children[1]))
                fail(Err::MalformedForm, "(i-fn (ivars) body)", f.pos);
            CoreExpr::ILambda il;
            for (const SurfaceForm& v : f.children[1].children) {
                const std::string& n = symbolName(v, "index variable");
                il.vars.push_back(
                    {n, !n.empty() && n[0] == '@' ? IndexSort::Shape : IndexSort::Dim});
            }
            il.body = desugar(f.children[2]);
            return CoreExpr::make(std::move(il), f.pos);
        }

        if (kw == "t-app") {
            if (f.children.size() < 3)
                fail(Err::MalformedForm, "(t-app f type ...)", f.pos);
            CoreExpr::TApp ta;
            ta.fn = desugar(f.children[1]);
            for (std::size_t i = 2; i < f.children.size(); ++i)
                ta.typeArgs.push_back(desugarType(f.children[i]));
            return CoreExpr::make(std::move(ta), f.pos);
        }

        if (kw == "i-app") {
            if (f.children.size() < 3)
                fail(Err::MalformedForm, "(i-app f index ...)", f.pos);
            CoreExpr::IApp ia;
            ia.fn = desugar(f.children[1]);
            for (std::size_t i = 2; i < f.children.size(); ++i)
                ia.indexArgs.push_back(desugarIndex(f.children[i]));
            return CoreExpr::make(std::move(ia), f.pos);
        }

        if (kw == "boxes") {
            if (f.children.size() < 4 || !isListForm(f.children[1]))
                fail(Err::MalformedBox, "(boxes (ivars) type [dims] ((indices) expr) ...)", f.pos);
            CoreExpr::Boxes boxes;
            for (const SurfaceForm& v : f.children[1].children) {
                const std::string& n = symbolName(v, "index variable");
                boxes.ivars.push_back(
                    {n, !n.empty() && n[0] == '@' ? IndexSort::Shape : IndexSort::Dim});
            }
            boxes.declared = desugarType(f.children[2]);
            if (f.children[3].kind != SurfaceForm::Kind::Bracket)
                fail(Err::MalformedBox, "boxes shape must be a bracketed dimension list",
                     f.children[3].pos);
            for (const SurfaceForm& d : f.children[3].children)
                boxes.dims.push_back(desugarIndex(d));
            for (std::size_t i = 4; i < f.children.size(); ++i) {
                const SurfaceForm& cl = f.children[i];
                if (!isListForm(cl) || cl.children.size() != 2 || !isListForm(cl.children[0]))
                    fail(Err::MalformedBox, "boxes clause must be ((indices) expr)", cl.pos);
                CoreExpr::BoxClause clause;
                for (const SurfaceForm& w : cl.children[0].children)
                    clause.witnesses.push_back(desugarIndex(w));
                if (clause.witnesses.size() != boxes.ivars.size())
                    fail(Err::MalformedBox,
                         "clause supplies " + std::to_string(clause.witnesses.size()) +
                             " witnesses for " + std::to_string(boxes.ivars.size()) +
                             " index variables",
                         cl.pos);
                clause.expr = desugar(cl.children[1]);
                boxes.clauses.push_back(std::move(clause));
            }
            return CoreExpr::make(std::move(boxes), f.pos);
        }

        if (kw == "box") return desugarBox(f);

        if (kw == "unbox") {
            if (f.children.size() != 4 || !isListForm(f.children[2]) ||
                f.children[2].children.empty())
                fail(Err::MalformedForm, "(unbox subject (contents witnesses ...) body)", f.pos);
            CoreExpr::Unbox ub;
            ub.subject = desugar(f.children[1]);
            const SurfaceForm& binders = f.children[2];
            ub.contentsName = symbolName(binders.children[0], "contents binder");
            for (std::size_t i = 1; i < binders.children.size(); ++i)
                ub.witnessNames.push_back(symbolName(binders.children[i], "witness binder"));
            ub.body = desugar(f.children[3]);
            return CoreExpr::make(std::move(ub), f.pos);
        }
    }

    // plain application
    CoreExpr::App app;
    app.fn = desugar(f.children[0]);
    for (std::size_t i = 1; i < f.children.size(); ++i)
        app.args.push_back(desugar(f.children[i]));
    return CoreExpr::make(std::move(app), f.pos);
}

inline std::vector<ExprPtr> desugarProgram(const std::vector<SurfaceForm>& forms) {
    std::vector<ExprPtr> out;
    out.reserve(forms.size());
    for (const SurfaceForm& f : forms) out.push_back(desugar(f));
    return out;
}

} // namespace remora
