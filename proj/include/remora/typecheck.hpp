#pragma once

#include <map>
#include <set>
#include <string>

#include "remora/builtins.hpp"
#include "remora/desugar.hpp"
#include "remora/normalize.hpp"

namespace remora {

enum class Kind { Elem, Array };

struct TypeEnv {
    std::map<std::string, TypePtr> values;
    std::map<std::string, TypeVarFlavor> typeVars;
    std::map<std::string, IndexSort> indexVars;
};

namespace tc {

using detail::substIndex;
using detail::substTypeIdx;

// An element type written where an array type is expected means a scalar
// array of that element type.
inline TypePtr asArrayType(const TypePtr& t) {
    if (std::holds_alternative<TypeAst::Arr>(t->node) ||
        std::holds_alternative<TypeAst::ArrVar>(t->node))
        return t;
    return TypeAst::make(TypeAst::Arr{t, IndexAst::make(IndexAst::ShapeLit{})}, t->pos);
}

inline void sortCheckIndex(const IndexPtr& i, const TypeEnv& env, IndexSort expected);

inline IndexSort indexSortOf(const IndexPtr& i, const TypeEnv& env) {
    if (std::holds_alternative<IndexAst::DimLit>(i->node) ||
        std::holds_alternative<IndexAst::DimSum>(i->node))
        return IndexSort::Dim;
    if (std::holds_alternative<IndexAst::ShapeLit>(i->node) ||
        std::holds_alternative<IndexAst::ShapeConcat>(i->node))
        return IndexSort::Shape;
    if (const auto* v = std::get_if<IndexAst::DimVar>(&i->node)) {
        auto it = env.indexVars.find(v->name);
        if (it == env.indexVars.end())
            fail(Err::UnboundName, "unbound index variable '" + v->name + "'", i->pos);
        return it->second;
    }
    const auto& v = std::get<IndexAst::ShapeVar>(i->node);
    auto it = env.indexVars.find(v.name);
    if (it == env.indexVars.end())
        fail(Err::UnboundName, "unbound index variable '" + v.name + "'", i->pos);
    return it->second;
}

inline void sortCheckIndex(const IndexPtr& i, const TypeEnv& env, IndexSort expected) {
    if (const auto* s = std::get_if<IndexAst::DimSum>(&i->node)) {
        for (const IndexPtr& t : s->terms) sortCheckIndex(t, env, IndexSort::Dim);
    } else if (const auto* s2 = std::get_if<IndexAst::ShapeLit>(&i->node)) {
        for (const IndexPtr& d : s2->dims) sortCheckIndex(d, env, IndexSort::Dim);
    } else if (const auto* s3 = std::get_if<IndexAst::ShapeConcat>(&i->node)) {
        for (const IndexPtr& p : s3->parts) sortCheckIndex(p, env, IndexSort::Shape);
    }
    IndexSort actual = indexSortOf(i, env);
    if (actual != expected)
        fail(Err::SortError,
             std::string("expected a ") + (expected == IndexSort::Dim ? "dimension" : "shape") +
                 " index",
             i->pos);
}

inline Kind kindCheckType(const TypePtr& t, const TypeEnv& env) {
    if (std::holds_alternative<TypeAst::Base>(t->node)) return Kind::Elem;
    if (const auto* v = std::get_if<TypeAst::ElemVar>(&t->node)) {
        auto it = env.typeVars.find(v->name);
        if (it == env.typeVars.end())
            fail(Err::UnboundName, "unbound type variable '" + v->name + "'", t->pos);
        return Kind::Elem;
    }
    if (const auto* v = std::get_if<TypeAst::ArrVar>(&t->node)) {
        auto it = env.typeVars.find(v->name);
        if (it == env.typeVars.end())
            fail(Err::UnboundName, "unbound type variable '" + v->name + "'", t->pos);
        return Kind::Array;
    }
    if (const auto* a = std::get_if<TypeAst::Arr>(&t->node)) {
        if (kindCheckType(a->elem, env) != Kind::Elem)
            fail(Err::KindError, "array element type must be an element type", t->pos);
        sortCheckIndex(a->shape, env, IndexSort::Shape);
        return Kind::Array;
    }
    if (const auto* f = std::get_if<TypeAst::Fn>(&t->node)) {
        for (const TypePtr& arg : f->args) kindCheckType(arg, env);
        kindCheckType(f->result, env);
        return Kind::Elem;
    }
    if (const auto* fa = std::get_if<TypeAst::Forall>(&t->node)) {
        TypeEnv inner = env;
        for (const auto& v : fa->vars) inner.typeVars[v.name] = v.flavor;
        kindCheckType(fa->body, inner);
        return Kind::Elem;
    }
    if (const auto* pi = std::get_if<TypeAst::Pi>(&t->node)) {
        TypeEnv inner = env;
        for (const auto& v : pi->vars) inner.indexVars[v.name] = v.sort;
        kindCheckType(pi->body, inner);
        return Kind::Elem;
    }
    const auto& sg = std::get<TypeAst::Sigma>(t->node);
    TypeEnv inner = env;
    for (const auto& v : sg.vars) inner.indexVars[v.name] = v.sort;
    kindCheckType(sg.body, inner);
    return Kind::Elem;
}

// --- alpha-canonical renaming, so equality needs no binder maps -------------

inline TypePtr canonType(const TypePtr& t, std::size_t& counter) {
    if (const auto* a = std::get_if<TypeAst::Arr>(&t->node)) {
        TypePtr elem = canonType(a->elem, counter);
        return TypeAst::make(TypeAst::Arr{std::move(elem), a->shape}, t->pos);
    }
    if (const auto* f = std::get_if<TypeAst::Fn>(&t->node)) {
        TypeAst::Fn out;
        for (const TypePtr& arg : f->args) out.args.push_back(canonType(arg, counter));
        out.result = canonType(f->result, counter);
        return TypeAst::make(std::move(out), t->pos);
    }
    if (const auto* fa = std::get_if<TypeAst::Forall>(&t->node)) {
        std::map<std::string, TypePtr> tsub;
        std::vector<TypeVarBinder> vars;
        for (const auto& v : fa->vars) {
            std::string fresh = "#t" + std::to_string(counter++);
            vars.push_back({fresh, v.flavor});
            tsub[v.name] = v.flavor == TypeVarFlavor::Elem
                               ? TypeAst::make(TypeAst::ElemVar{fresh})
                               : TypeAst::make(TypeAst::ArrVar{fresh});
        }
        TypePtr body = canonType(substTypeIdx(fa->body, tsub, {}), counter);
        return TypeAst::make(TypeAst::Forall{std::move(vars), std::move(body)}, t->pos);
    }
    if (const auto* pi = std::get_if<TypeAst::Pi>(&t->node)) {
        std::map<std::string, IndexPtr> isub;
        std::vector<IndexVarBinder> vars;
        for (const auto& v : pi->vars) {
            std::string fresh = "#i" + std::to_string(counter++);
            vars.push_back({fresh, v.sort});
            isub[v.name] = v.sort == IndexSort::Dim
                               ? IndexAst::make(IndexAst::DimVar{fresh})
                               : IndexAst::make(IndexAst::ShapeVar{fresh});
        }
        TypePtr body = canonType(substTypeIdx(pi->body, {}, isub), counter);
        return TypeAst::make(TypeAst::Pi{std::move(vars), std::move(body)}, t->pos);
    }
    if (const auto* sg = std::get_if<TypeAst::Sigma>(&t->node)) {
        std::map<std::string, IndexPtr> isub;
        std::vector<IndexVarBinder> vars;
        for (const auto& v : sg->vars) {
            std::string fresh = "#i" + std::to_string(counter++);
            vars.push_back({fresh, v.sort});
            isub[v.name] = v.sort == IndexSort::Dim
                               ? IndexAst::make(IndexAst::DimVar{fresh})
                               : IndexAst::make(IndexAst::ShapeVar{fresh});
        }
        TypePtr body = canonType(substTypeIdx(sg->body, {}, isub), counter);
        return TypeAst::make(TypeAst::Sigma{std::move(vars), std::move(body)}, t->pos);
    }
    return t;
}

inline bool equalCanonArray(const TypePtr& a, const TypePtr& b);

inline bool equalCanonElem(const TypePtr& a, const TypePtr& b) {
    if (const auto* x = std::get_if<TypeAst::Base>(&a->node)) {
        const auto* y = std::get_if<TypeAst::Base>(&b->node);
        return y && x->base == y->base;
    }
    if (const auto* x = std::get_if<TypeAst::ElemVar>(&a->node)) {
        const auto* y = std::get_if<TypeAst::ElemVar>(&b->node);
        return y && x->name == y->name;
    }
    if (const auto* x = std::get_if<TypeAst::Fn>(&a->node)) {
        const auto* y = std::get_if<TypeAst::Fn>(&b->node);
        if (!y || x->args.size() != y->args.size()) return false;
        for (std::size_t i = 0; i < x->args.size(); ++i)
            if (!equalCanonArray(x->args[i], y->args[i])) return false;
        return equalCanonArray(x->result, y->result);
    }
    if (const auto* x = std::get_if<TypeAst::Forall>(&a->node)) {
        const auto* y = std::get_if<TypeAst::Forall>(&b->node);
        if (!y || x->vars.size() != y->vars.size()) return false;
        for (std::size_t i = 0; i < x->vars.size(); ++i)
            if (x->vars[i].flavor != y->vars[i].flavor ||
                x->vars[i].name != y->vars[i].name)
                return false;
        return equalCanonArray(x->body, y->body);
    }
    if (const auto* x = std::get_if<TypeAst::Pi>(&a->node)) {
        const auto* y = std::get_if<TypeAst::Pi>(&b->node);
        if (!y || x->vars.size() != y->vars.size()) return false;
        for (std::size_t i = 0; i < x->vars.size(); ++i)
            if (x->vars[i].sort != y->vars[i].sort || x->vars[i].name != y->vars[i].name)
                return false;
        return equalCanonArray(x->body, y->body);
    }
    if (const auto* x = std::get_if<TypeAst::Sigma>(&a->node)) {
        const auto* y = std::get_if<TypeAst::Sigma>(&b->node);
        if (!y || x->vars.size() != y->vars.size()) return false;
        for (std::size_t i = 0; i < x->vars.size(); ++i)
            if (x->vars[i].sort != y->vars[i].sort || x->vars[i].name != y->vars[i].name)
                return false;
        return equalCanonArray(x->body, y->body);
    }
    return false;
}

inline bool equalCanonArray(const TypePtr& a0, const TypePtr& b0) {
    TypePtr a = asArrayType(a0);
    TypePtr b = asArrayType(b0);
    if (const auto* x = std::get_if<TypeAst::ArrVar>(&a->node)) {
        const auto* y = std::get_if<TypeAst::ArrVar>(&b->node);
        return y && x->name == y->name;
    }
    const auto* x = std::get_if<TypeAst::Arr>(&a->node);
    const auto* y = std::get_if<TypeAst::Arr>(&b->node);
    if (!x || !y) return false;
    if (normalizeShape(x->shape) != normalizeShape(y->shape)) return false;
    return equalCanonElem(x->elem, y->elem);
}

} // namespace tc

// Structural equality up to alpha-renaming and index normalization.
inline bool typeEqual(const TypePtr& t1, const TypePtr& t2) {
    std::size_t c1 = 0, c2 = 0;
    return tc::equalCanonArray(tc::canonType(t1, c1), tc::canonType(t2, c2));
}

// ---------------------------------------------------------------------------
// Pretty-printing for diagnostics, with the surface sugar.

inline std::string printType(const TypePtr& t);

namespace tc {

inline std::string printElem(const TypePtr& t) {
    if (const auto* b = std::get_if<TypeAst::Base>(&t->node)) {
        switch (b->base) {
        case BaseType::Int: return "int";
        case BaseType::Float: return "float";
        case BaseType::Bool: return "bool";
        case BaseType::Char: return "char";
        }
    }
    if (const auto* v = std::get_if<TypeAst::ElemVar>(&t->node)) return v->name;
    if (const auto* f = std::get_if<TypeAst::Fn>(&t->node)) {
        std::string s = "(-> (";
        for (std::size_t i = 0; i < f->args.size(); ++i) {
            if (i) s += " ";
            s += printType(f->args[i]);
        }
        s += ") " + printType(f->result) + ")";
        return s;
    }
    auto binderList = [](const std::vector<IndexVarBinder>& vars) {
        std::string s = "(";
        for (std::size_t i = 0; i < vars.size(); ++i) {
            if (i) s += " ";
            s += vars[i].name;
        }
        return s + ")";
    };
    if (const auto* fa = std::get_if<TypeAst::Forall>(&t->node)) {
        std::string s = "(Forall (";
        for (std::size_t i = 0; i < fa->vars.size(); ++i) {
            if (i) s += " ";
            s += fa->vars[i].name;
        }
        return s + ") " + printType(fa->body) + ")";
    }
    if (const auto* pi = std::get_if<TypeAst::Pi>(&t->node))
        return "(Pi " + binderList(pi->vars) + " " + printType(pi->body) + ")";
    if (const auto* sg = std::get_if<TypeAst::Sigma>(&t->node))
        return "(Sigma " + binderList(sg->vars) + " " + printType(sg->body) + ")";
    return printType(t);
}

} // namespace tc

inline std::string printType(const TypePtr& t) {
    if (const auto* v = std::get_if<TypeAst::ArrVar>(&t->node)) return v->name;
    if (const auto* a = std::get_if<TypeAst::Arr>(&t->node)) {
        NormalShape s = normalizeShape(a->shape);
        if (s.segments.empty()) return tc::printElem(a->elem);
        return "[" + tc::printElem(a->elem) + " " + printNormalShape(s) + "]";
    }
    return tc::printElem(t); // element type standing for a scalar array
}

// ---------------------------------------------------------------------------
// The checker.

class TypeChecker {
public:
    TypeChecker() = default;

    // Check one top-level form, threading definitions through env.
    TypePtr check(const CoreExpr& e, TypeEnv& env) {
        using namespace tc;

        if (const auto* lit = e.as<CoreExpr::ArrayLit>()) return checkArrayLit(*lit, e.pos);

        if (const auto* fr = e.as<CoreExpr::Frame>()) {
            if (fr->exprs.empty())
                fail(Err::EmptyLiteralType,
                     "cannot infer the element type of an empty frame", e.pos);
            TypePtr cellT = asArrayType(check(*fr->exprs[0], env));
            for (std::size_t i = 1; i < fr->exprs.size(); ++i) {
                TypePtr t = asArrayType(check(*fr->exprs[i], env));
                if (!typeEqual(cellT, t))
                    fail(Err::CellTypeMismatch, "frame cells have different types: " +
                                                    printType(cellT) + " vs " + printType(t),
                         e.pos);
            }
            const auto* cell = std::get_if<TypeAst::Arr>(&cellT->node);
            if (!cell)
                fail(Err::CellTypeMismatch,
                     "frame cells must have a concrete array type", e.pos);
            std::vector<IndexPtr> dims;
            for (std::size_t d : fr->dims) dims.push_back(IndexAst::make(IndexAst::DimLit{d}));
            IndexPtr shape = IndexAst::make(IndexAst::ShapeConcat{
                {IndexAst::make(IndexAst::ShapeLit{std::move(dims)}), cell->shape}});
            return TypeAst::make(TypeAst::Arr{cell->elem, std::move(shape)}, e.pos);
        }

        if (const auto* v = e.as<CoreExpr::Var>()) {
            auto it = env.values.find(v->name);
            if (it == env.values.end())
                fail(Err::UnboundName, "unbound name '" + v->name + "'", e.pos);
            return it->second;
        }

        if (const auto* lam = e.as<CoreExpr::Lambda>()) {
            TypeAst::Fn fn;
            TypeEnv inner = env;
            for (const LambdaParam& p : lam->params) {
                if (!p.type)
                    fail(Err::UntypedParameter,
                         "parameter '" + p.name + "' needs a type in the typed dialect", e.pos);
                kindCheckType(p.type, env);
                TypePtr pt = asArrayType(p.type);
                fn.args.push_back(pt);
                inner.values[p.name] = pt;
            }
            fn.result = check(*lam->body, inner);
            return TypeAst::make(
                TypeAst::Arr{TypeAst::make(std::move(fn), e.pos),
                             IndexAst::make(IndexAst::ShapeLit{})},
                e.pos);
        }

        if (const auto* app = e.as<CoreExpr::App>()) {
            TypePtr fnT = check(*app->fn, env);
            std::vector<TypePtr> argTs;
            for (const ExprPtr& a : app->args) argTs.push_back(check(*a, env));
            return checkApplication(fnT, argTs, e.pos);
        }

        if (const auto* iff = e.as<CoreExpr::If>()) {
            checkScalarBool(*iff->test, env, e.pos);
            TypePtr thenT = check(*iff->thenBranch, env);
            TypePtr elseT = check(*iff->elseBranch, env);
            if (!typeEqual(thenT, elseT))
                fail(Err::BranchTypeMismatch, "if branches have different types: " +
                                                  printType(thenT) + " vs " + printType(elseT),
                     e.pos);
            return thenT;
        }

        if (const auto* cond = e.as<CoreExpr::Cond>()) {
            TypePtr out;
            for (const auto& [test, body] : cond->clauses) {
                checkScalarBool(*test, env, e.pos);
                TypePtr t = check(*body, env);
                if (out && !typeEqual(out, t))
                    fail(Err::BranchTypeMismatch, "cond branches have different types", e.pos);
                out = t;
            }
            TypePtr elseT = check(*cond->elseBranch, env);
            if (out && !typeEqual(out, elseT))
                fail(Err::BranchTypeMismatch, "cond branches have different types", e.pos);
            return elseT;
        }

        if (const auto* let = e.as<CoreExpr::Let>()) {
            TypeEnv inner = env;
            for (const auto& b : let->bindings) inner.values[b.name] = check(*b.expr, env);
            return check(*let->body, inner);
        }
        if (const auto* lets = e.as<CoreExpr::LetStar>()) {
            TypeEnv inner = env;
            for (const auto& b : lets->bindings) inner.values[b.name] = check(*b.expr, inner);
            return check(*lets->body, inner);
        }

        if (const auto* def = e.as<CoreExpr::Define>()) {
            TypePtr t = check(*def->expr, env);
            env.values[def->name] = t;
            return t;
        }

        if (const auto* tl = e.as<CoreExpr::TLambda>()) {
            TypeEnv inner = env;
            for (const auto& v : tl->vars) inner.typeVars[v.name] = v.flavor;
            TypePtr body = check(*tl->body, inner);
            return TypeAst::make(
                TypeAst::Arr{TypeAst::make(TypeAst::Forall{tl->vars, body}, e.pos),
                             IndexAst::make(IndexAst::ShapeLit{})},
                e.pos);
        }

        if (const auto* il = e.as<CoreExpr::ILambda>()) {
            TypeEnv inner = env;
            for (const auto& v : il->vars) inner.indexVars[v.name] = v.sort;
            TypePtr body = check(*il->body, inner);
            return TypeAst::make(
                TypeAst::Arr{TypeAst::make(TypeAst::Pi{il->vars, body}, e.pos),
                             IndexAst::make(IndexAst::ShapeLit{})},
                e.pos);
        }

        if (const auto* ta = e.as<CoreExpr::TApp>()) {
            TypePtr fnT = asArrayType(check(*ta->fn, env));
            const auto* arr = std::get_if<TypeAst::Arr>(&fnT->node);
            const TypeAst::Forall* fa =
                arr ? std::get_if<TypeAst::Forall>(&arr->elem->node) : nullptr;
            if (!fa)
                fail(Err::NotPolymorphic, "t-app on a value of type " + printType(fnT), e.pos);
            if (fa->vars.size() != ta->typeArgs.size())
                fail(Err::KindError, "wrong number of type arguments: " +
                                         std::to_string(fa->vars.size()) + " expected",
                     e.pos);
            std::map<std::string, TypePtr> tsub;
            for (std::size_t i = 0; i < fa->vars.size(); ++i) {
                Kind k = kindCheckType(ta->typeArgs[i], env);
                Kind want = fa->vars[i].flavor == TypeVarFlavor::Elem ? Kind::Elem : Kind::Array;
                if (k != want)
                    fail(Err::KindError,
                         "type argument " + std::to_string(i + 1) + " has the wrong kind",
                         e.pos);
                tsub[fa->vars[i].name] = ta->typeArgs[i];
            }
            TypePtr body = substTypeIdx(fa->body, tsub, {});
            return frameWrap(arr->shape, body, e.pos);
        }

        if (const auto* ia = e.as<CoreExpr::IApp>()) {
            TypePtr fnT = asArrayType(check(*ia->fn, env));
            const auto* arr = std::get_if<TypeAst::Arr>(&fnT->node);
            const TypeAst::Pi* pi = arr ? std::get_if<TypeAst::Pi>(&arr->elem->node) : nullptr;
            if (!pi)
                fail(Err::NotIndexed, "i-app on a value of type " + printType(fnT), e.pos);
            if (pi->vars.size() != ia->indexArgs.size())
                fail(Err::SortError, "wrong number of index arguments: " +
                                         std::to_string(pi->vars.size()) + " expected",
                     e.pos);
            std::map<std::string, IndexPtr> isub;
            for (std::size_t i = 0; i < pi->vars.size(); ++i) {
                sortCheckIndex(ia->indexArgs[i], env, pi->vars[i].sort);
                isub[pi->vars[i].name] = ia->indexArgs[i];
            }
            TypePtr body = substTypeIdx(pi->body, {}, isub);
            return frameWrap(arr->shape, body, e.pos);
        }

        if (const auto* boxes = e.as<CoreExpr::Boxes>()) return checkBoxes(*boxes, env, e.pos);
        if (const auto* ub = e.as<CoreExpr::Unbox>()) return checkUnbox(*ub, env, e.pos);

        fail(Err::MalformedForm, "form not valid in the typed dialect", e.pos);
    }

    // The static side of rank-polymorphic application: factor each argument's
    // shape into frame ++ declared cell shape, agree on the principal frame,
    // and rebuild the result shape.
    TypePtr checkApplication(const TypePtr& fnT0, const std::vector<TypePtr>& argTs,
                             SourcePos pos) {
        using namespace tc;
        TypePtr fnT = asArrayType(fnT0);
        const auto* fnArr = std::get_if<TypeAst::Arr>(&fnT->node);
        const TypeAst::Fn* fn = fnArr ? std::get_if<TypeAst::Fn>(&fnArr->elem->node) : nullptr;
        if (!fn)
            fail(Err::NotAFunction, "application of a value of type " + printType(fnT), pos);
        if (fn->args.size() != argTs.size())
            fail(Err::ArityMismatch, "function takes " + std::to_string(fn->args.size()) +
                                         " arguments, got " + std::to_string(argTs.size()),
                 pos);

        std::vector<NormalShape> frames;
        frames.push_back(normalizeShape(fnArr->shape));

        for (std::size_t i = 0; i < argTs.size(); ++i) {
            TypePtr declared = asArrayType(fn->args[i]);
            TypePtr actual = asArrayType(argTs[i]);
            if (const auto* dv = std::get_if<TypeAst::ArrVar>(&declared->node)) {
                // an abstract array type admits no frame: exact match only
                if (!typeEqual(declared, actual))
                    fail(Err::CellSuffixMismatch,
                         "argument " + std::to_string(i + 1) + " has type " +
                             printType(actual) + ", expected " + dv->name,
                         pos);
                frames.push_back(NormalShape{});
                continue;
            }
            const auto* decl = std::get_if<TypeAst::Arr>(&declared->node);
            const auto* act = std::get_if<TypeAst::Arr>(&actual->node);
            if (!act)
                fail(Err::CellSuffixMismatch,
                     "argument " + std::to_string(i + 1) + " has abstract type " +
                         printType(actual) + ", expected " + printType(declared),
                     pos);
            if (!equalCanonElemTop(decl->elem, act->elem))
                fail(Err::CellTypeMismatch,
                     "argument " + std::to_string(i + 1) + " has element type " +
                         tc::printElem(act->elem) + ", expected " + tc::printElem(decl->elem),
                     pos);
            NormalShape cellShape = normalizeShape(decl->shape);
            NormalShape argShape = normalizeShape(act->shape);
            frames.push_back(factorFrame(argShape, cellShape, i, pos));
        }

        const NormalShape* principal = &frames[0];
        for (const NormalShape& f : frames)
            if (f.segments.size() > principal->segments.size()) principal = &f;
        for (const NormalShape& f : frames)
            if (!isSegmentPrefix(f, *principal))
                fail(Err::FrameDisagreement,
                     "argument frame (" + printNormalShape(f) +
                         ") is not a prefix of the principal frame (" +
                         printNormalShape(*principal) + ")",
                     pos);

        TypePtr resultT = asArrayType(fn->result);
        if (std::get_if<TypeAst::ArrVar>(&resultT->node)) {
            if (principal->segments.empty()) return resultT;
            fail(Err::UnderdeterminedFactoring,
                 "cannot lift a function whose result type is abstract", pos);
        }
        const auto* res = std::get_if<TypeAst::Arr>(&resultT->node);
        IndexPtr shape = IndexAst::make(
            IndexAst::ShapeConcat{{shapeToIndex(*principal), res->shape}});
        return TypeAst::make(TypeAst::Arr{res->elem, std::move(shape)}, pos);
    }

    TypePtr checkBoxes(const CoreExpr::Boxes& boxes, TypeEnv& env, SourcePos pos) {
        using namespace tc;
        TypeEnv inner = env;
        for (const auto& v : boxes.ivars) inner.indexVars[v.name] = v.sort;
        kindCheckType(boxes.declared, inner);
        TypePtr declared = asArrayType(boxes.declared);

        std::vector<IndexPtr> dims;
        std::size_t product = 1;
        bool ground = true;
        for (const IndexPtr& d : boxes.dims) {
            sortCheckIndex(d, env, IndexSort::Dim);
            NormalDim nd = normalizeDim(d);
            if (nd.isLiteral())
                product *= nd.constant;
            else
                ground = false;
            dims.push_back(d);
        }
        if (ground && boxes.clauses.size() != product)
            fail(Err::BadFrameArity, "boxes needs " + std::to_string(product) +
                                         " clauses, got " +
                                         std::to_string(boxes.clauses.size()),
                 pos);

        for (const auto& clause : boxes.clauses) {
            if (clause.witnesses.size() != boxes.ivars.size())
                fail(Err::WitnessArity,
                     "clause supplies " + std::to_string(clause.witnesses.size()) +
                         " witnesses for " + std::to_string(boxes.ivars.size()) +
                         " index variables",
                     pos);
            std::map<std::string, IndexPtr> isub;
            for (std::size_t i = 0; i < boxes.ivars.size(); ++i) {
                sortCheckIndex(clause.witnesses[i], env, boxes.ivars[i].sort);
                isub[boxes.ivars[i].name] = clause.witnesses[i];
            }
            TypePtr want = substTypeIdx(declared, {}, isub);
            TypePtr got = check(*clause.expr, env);
            if (!typeEqual(want, got))
                fail(Err::ClauseTypeMismatch, "box contents have type " + printType(got) +
                                                  ", expected " + printType(want),
                     pos);
        }

        TypePtr sigma = TypeAst::make(TypeAst::Sigma{boxes.ivars, boxes.declared}, pos);
        return TypeAst::make(
            TypeAst::Arr{std::move(sigma), IndexAst::make(IndexAst::ShapeLit{dims})}, pos);
    }

    TypePtr checkUnbox(const CoreExpr::Unbox& ub, TypeEnv& env, SourcePos pos) {
        using namespace tc;
        TypePtr subjT = asArrayType(check(*ub.subject, env));
        const auto* arr = std::get_if<TypeAst::Arr>(&subjT->node);
        const TypeAst::Sigma* sg = arr ? std::get_if<TypeAst::Sigma>(&arr->elem->node) : nullptr;
        if (!sg)
            fail(Err::NotABox, "unbox subject has type " + printType(subjT), pos);
        if (ub.witnessNames.size() != sg->vars.size())
            fail(Err::WitnessArity, "box type abstracts " + std::to_string(sg->vars.size()) +
                                        " indices, unbox binds " +
                                        std::to_string(ub.witnessNames.size()),
                 pos);

        TypeEnv inner = env;
        std::map<std::string, IndexPtr> isub;
        for (std::size_t i = 0; i < sg->vars.size(); ++i) {
            const std::string& binder = ub.witnessNames[i];
            bool shapeSpelled = !binder.empty() && binder[0] == '@';
            if (shapeSpelled != (sg->vars[i].sort == IndexSort::Shape))
                fail(Err::SortError,
                     "witness binder '" + binder + "' does not match the index sort", pos);
            inner.indexVars[binder] = sg->vars[i].sort;
            isub[sg->vars[i].name] = sg->vars[i].sort == IndexSort::Dim
                                         ? IndexAst::make(IndexAst::DimVar{binder})
                                         : IndexAst::make(IndexAst::ShapeVar{binder});
        }
        inner.values[ub.contentsName] = substTypeIdx(asArrayType(sg->body), {}, isub);

        TypePtr bodyT = check(*ub.body, inner);
        std::set<std::string> escaping(ub.witnessNames.begin(), ub.witnessNames.end());
        if (mentionsIndexVars(bodyT, escaping))
            fail(Err::EscapingIndexVariable,
                 "unbox body type mentions a witness index variable", pos);
        return frameWrap(arr->shape, bodyT, pos);
    }

private:
    TypePtr checkArrayLit(const CoreExpr::ArrayLit& lit, SourcePos pos) {
        if (lit.atoms.empty())
            fail(Err::EmptyLiteralType,
                 "cannot infer the element type of an empty array literal", pos);
        auto baseOf = [&](const Atom& a) -> BaseType {
            if (std::holds_alternative<std::int64_t>(a)) return BaseType::Int;
            if (std::holds_alternative<double>(a)) return BaseType::Float;
            if (std::holds_alternative<bool>(a)) return BaseType::Bool;
            if (std::holds_alternative<char32_t>(a)) return BaseType::Char;
            fail(Err::CellTypeMismatch, "literal atoms must be base values", pos);
        };
        BaseType base = baseOf(lit.atoms[0]);
        for (const Atom& a : lit.atoms)
            if (baseOf(a) != base)
                fail(Err::CellTypeMismatch, "literal atoms have mixed base types", pos);
        std::vector<IndexPtr> dims;
        for (std::size_t d : lit.shape.dims) dims.push_back(IndexAst::make(IndexAst::DimLit{d}));
        return TypeAst::make(
            TypeAst::Arr{TypeAst::make(TypeAst::Base{base}, pos),
                         IndexAst::make(IndexAst::ShapeLit{std::move(dims)})},
            pos);
    }

    void checkScalarBool(const CoreExpr& test, TypeEnv& env, SourcePos pos) {
        TypePtr t = check(test, env);
        TypePtr want = TypeAst::make(TypeAst::Base{BaseType::Bool}, pos);
        if (!typeEqual(t, want))
            fail(Err::NonScalarCondition,
                 "condition must be a scalar boolean, got " + printType(t), pos);
    }

    static bool equalCanonElemTop(const TypePtr& a, const TypePtr& b) {
        std::size_t c1 = 0, c2 = 0;
        return tc::equalCanonElem(tc::canonType(a, c1), tc::canonType(b, c2));
    }

    static TypePtr frameWrap(const IndexPtr& frameShape, const TypePtr& t, SourcePos pos) {
        NormalShape frame = normalizeShape(frameShape);
        if (frame.segments.empty()) return t;
        TypePtr wrapped = tc::asArrayType(t);
        const auto* arr = std::get_if<TypeAst::Arr>(&wrapped->node);
        if (!arr)
            fail(Err::UnderdeterminedFactoring,
                 "cannot lift over a frame when the cell type is abstract", pos);
        IndexPtr shape =
            IndexAst::make(IndexAst::ShapeConcat{{shapeToIndex(frame), arr->shape}});
        return TypeAst::make(TypeAst::Arr{arr->elem, std::move(shape)}, pos);
    }

    // Match the declared cell shape against the tail of the argument's shape;
    // the remaining prefix is the argument's frame.
    NormalShape factorFrame(const NormalShape& argShape, const NormalShape& cellShape,
                            std::size_t argNo, SourcePos pos) {
        if (cellShape.segments.size() > argShape.segments.size())
            fail(Err::CellSuffixMismatch,
                 "argument " + std::to_string(argNo + 1) + " of shape (" +
                     printNormalShape(argShape) + ") cannot supply a cell of shape (" +
                     printNormalShape(cellShape) + ")",
                 pos);
        std::size_t offset = argShape.segments.size() - cellShape.segments.size();
        for (std::size_t k = 0; k < cellShape.segments.size(); ++k) {
            const auto& want = cellShape.segments[k];
            const auto& got = argShape.segments[offset + k];
            if (const auto* wv = std::get_if<std::string>(&want)) {
                const auto* gv = std::get_if<std::string>(&got);
                if (!gv || *gv != *wv)
                    fail(Err::UnderdeterminedFactoring,
                         "cell shape of argument " + std::to_string(argNo + 1) +
                             " ends in shape variable " + *wv +
                             "; instantiate it before applying",
                         pos);
            } else {
                const auto* gd = std::get_if<NormalDim>(&got);
                if (!gd || *gd != std::get<NormalDim>(want))
                    fail(Err::CellSuffixMismatch,
                         "argument " + std::to_string(argNo + 1) + " of shape (" +
                             printNormalShape(argShape) + ") does not end in cell shape (" +
                             printNormalShape(cellShape) + ")",
                         pos);
            }
        }
        NormalShape frame;
        frame.segments.assign(argShape.segments.begin(),
                              argShape.segments.begin() + static_cast<std::ptrdiff_t>(offset));
        return frame;
    }

    static bool isSegmentPrefix(const NormalShape& a, const NormalShape& b) {
        if (a.segments.size() > b.segments.size()) return false;
        for (std::size_t i = 0; i < a.segments.size(); ++i)
            if (!(a.segments[i] == b.segments[i])) return false;
        return true;
    }

    static bool mentionsIndexVars(const TypePtr& t, const std::set<std::string>& names) {
        bool found = false;
        walkType(t, names, found);
        return found;
    }

    static void walkIndex(const IndexPtr& i, const std::set<std::string>& names, bool& found) {
        if (const auto* v = std::get_if<IndexAst::DimVar>(&i->node)) {
            if (names.count(v->name)) found = true;
        } else if (const auto* v2 = std::get_if<IndexAst::ShapeVar>(&i->node)) {
            if (names.count(v2->name)) found = true;
        } else if (const auto* s = std::get_if<IndexAst::DimSum>(&i->node)) {
            for (const IndexPtr& x : s->terms) walkIndex(x, names, found);
        } else if (const auto* s2 = std::get_if<IndexAst::ShapeLit>(&i->node)) {
            for (const IndexPtr& x : s2->dims) walkIndex(x, names, found);
        } else if (const auto* s3 = std::get_if<IndexAst::ShapeConcat>(&i->node)) {
            for (const IndexPtr& x : s3->parts) walkIndex(x, names, found);
        }
    }

    static void walkType(const TypePtr& t, const std::set<std::string>& names, bool& found) {
        if (found) return;
        if (const auto* a = std::get_if<TypeAst::Arr>(&t->node)) {
            walkType(a->elem, names, found);
            walkIndex(a->shape, names, found);
        } else if (const auto* f = std::get_if<TypeAst::Fn>(&t->node)) {
            for (const TypePtr& x : f->args) walkType(x, names, found);
            walkType(f->result, names, found);
        } else if (const auto* fa = std::get_if<TypeAst::Forall>(&t->node)) {
            walkType(fa->body, names, found);
        } else if (const auto* pi = std::get_if<TypeAst::Pi>(&t->node)) {
            std::set<std::string> inner = names;
            for (const auto& v : pi->vars) inner.erase(v.name);
            walkType(pi->body, inner, found);
        } else if (const auto* sg = std::get_if<TypeAst::Sigma>(&t->node)) {
            std::set<std::string> inner = names;
            for (const auto& v : sg->vars) inner.erase(v.name);
            walkType(sg->body, inner, found);
        }
    }
};

// Parse one type from source text (test and signature helper).
inline TypePtr parseType(const std::string& source) {
    std::vector<SurfaceForm> forms = readForms(source);
    if (forms.size() != 1) fail(Err::KindError, "expected exactly one type");
    return desugarType(forms[0]);
}

// The typed-dialect signatures of every builtin.
inline const std::map<std::string, TypePtr>& builtinSignatures() {
    static const std::map<std::string, TypePtr> sigs = [] {
        std::map<std::string, TypePtr> m;
        for (const BuiltinDef& def : builtinTable()) m[def.id] = parseType(def.signature);
        return m;
    }();
    return sigs;
}

inline TypeEnv makeGlobalTypeEnv() {
    TypeEnv env;
    for (const auto& [name, sig] : builtinSignatures()) env.values[name] = tc::asArrayType(sig);
    return env;
}

} // namespace remora
