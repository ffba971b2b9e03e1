#pragma once

#include <algorithm>
#include <exception>
#include <map>
#include <optional>
#include <thread>
#include <vector>

#include "remora/ast.hpp"
#include "remora/env.hpp"
#include "remora/frame.hpp"

namespace remora {

// The dynamic and typed dialects share one evaluator; the dialect only
// changes which builtins wrap their result in a box (iota, indices-of,
// filter produce boxes in erased typed code).
enum class Dialect { Dynamic, Typed };

struct EvalConfig {
    Dialect dialect = Dialect::Dynamic;
    bool parallelCells = false;
};

namespace detail {

// Ground-index helpers: the dynamic dialect has no index world, so box
// dimensions and witnesses must be literal by evaluation time.
inline std::optional<std::size_t> groundDim(const IndexPtr& i) {
    if (const auto* l = std::get_if<IndexAst::DimLit>(&i->node)) return l->value;
    if (const auto* s = std::get_if<IndexAst::DimSum>(&i->node)) {
        std::size_t sum = 0;
        for (const IndexPtr& t : s->terms) {
            auto v = groundDim(t);
            if (!v) return std::nullopt;
            sum += *v;
        }
        return sum;
    }
    return std::nullopt;
}

inline std::optional<std::vector<std::size_t>> groundShape(const IndexPtr& i) {
    if (const auto* l = std::get_if<IndexAst::ShapeLit>(&i->node)) {
        std::vector<std::size_t> dims;
        for (const IndexPtr& d : l->dims) {
            auto v = groundDim(d);
            if (!v) return std::nullopt;
            dims.push_back(*v);
        }
        return dims;
    }
    if (const auto* c = std::get_if<IndexAst::ShapeConcat>(&i->node)) {
        std::vector<std::size_t> dims;
        for (const IndexPtr& p : c->parts) {
            auto v = groundShape(p);
            if (!v) return std::nullopt;
            dims.insert(dims.end(), v->begin(), v->end());
        }
        return dims;
    }
    return std::nullopt;
}

inline std::optional<Witness> groundWitness(const IndexPtr& i) {
    if (auto d = groundDim(i)) return Witness::ofDim(*d);
    if (auto s = groundShape(i)) return Witness::ofShape(std::move(*s));
    return std::nullopt;
}

// Rank of the array classified by a type, when the type pins it down.
// A shape variable (or whole-array variable) leaves the rank open.
inline std::optional<std::size_t> shapeRankOf(const IndexPtr& shape) {
    if (std::get_if<IndexAst::ShapeVar>(&shape->node)) return std::nullopt;
    if (const auto* l = std::get_if<IndexAst::ShapeLit>(&shape->node)) return l->dims.size();
    if (const auto* c = std::get_if<IndexAst::ShapeConcat>(&shape->node)) {
        std::size_t r = 0;
        for (const IndexPtr& p : c->parts) {
            auto pr = shapeRankOf(p);
            if (!pr) return std::nullopt;
            r += *pr;
        }
        return r;
    }
    return std::nullopt; // dim-sorted index in shape position; the checker rejects this
}

inline std::optional<std::size_t> typeRankOf(const TypePtr& t) {
    if (std::get_if<TypeAst::ArrVar>(&t->node)) return std::nullopt;
    if (const auto* a = std::get_if<TypeAst::Arr>(&t->node)) return shapeRankOf(a->shape);
    return 0; // element type in array position means a scalar array
}

inline IndexPtr substIndex(const IndexPtr& i, const std::map<std::string, IndexPtr>& sub) {
    if (const auto* v = std::get_if<IndexAst::DimVar>(&i->node)) {
        auto it = sub.find(v->name);
        return it != sub.end() ? it->second : i;
    }
    if (const auto* v = std::get_if<IndexAst::ShapeVar>(&i->node)) {
        auto it = sub.find(v->name);
        return it != sub.end() ? it->second : i;
    }
    if (const auto* s = std::get_if<IndexAst::DimSum>(&i->node)) {
        IndexAst::DimSum out;
        for (const IndexPtr& t : s->terms) out.terms.push_back(substIndex(t, sub));
        return IndexAst::make(std::move(out), i->pos);
    }
    if (const auto* s = std::get_if<IndexAst::ShapeLit>(&i->node)) {
        IndexAst::ShapeLit out;
        for (const IndexPtr& d : s->dims) out.dims.push_back(substIndex(d, sub));
        return IndexAst::make(std::move(out), i->pos);
    }
    if (const auto* s = std::get_if<IndexAst::ShapeConcat>(&i->node)) {
        IndexAst::ShapeConcat out;
        for (const IndexPtr& p : s->parts) out.parts.push_back(substIndex(p, sub));
        return IndexAst::make(std::move(out), i->pos);
    }
    return i;
}

inline TypePtr substTypeIdx(const TypePtr& t, const std::map<std::string, TypePtr>& tsub,
                            const std::map<std::string, IndexPtr>& isub) {
    if (const auto* v = std::get_if<TypeAst::ElemVar>(&t->node)) {
        auto it = tsub.find(v->name);
        return it != tsub.end() ? it->second : t;
    }
    if (const auto* v = std::get_if<TypeAst::ArrVar>(&t->node)) {
        auto it = tsub.find(v->name);
        return it != tsub.end() ? it->second : t;
    }
    if (const auto* a = std::get_if<TypeAst::Arr>(&t->node))
        return TypeAst::make(
            TypeAst::Arr{substTypeIdx(a->elem, tsub, isub), substIndex(a->shape, isub)}, t->pos);
    if (const auto* f = std::get_if<TypeAst::Fn>(&t->node)) {
        TypeAst::Fn out;
        for (const TypePtr& a : f->args) out.args.push_back(substTypeIdx(a, tsub, isub));
        out.result = substTypeIdx(f->result, tsub, isub);
        return TypeAst::make(std::move(out), t->pos);
    }
    if (const auto* fa = std::get_if<TypeAst::Forall>(&t->node)) {
        auto inner = tsub;
        for (const auto& v : fa->vars) inner.erase(v.name);
        return TypeAst::make(TypeAst::Forall{fa->vars, substTypeIdx(fa->body, inner, isub)},
                             t->pos);
    }
    if (const auto* pi = std::get_if<TypeAst::Pi>(&t->node)) {
        auto inner = isub;
        for (const auto& v : pi->vars) inner.erase(v.name);
        return TypeAst::make(TypeAst::Pi{pi->vars, substTypeIdx(pi->body, tsub, inner)}, t->pos);
    }
    if (const auto* sg = std::get_if<TypeAst::Sigma>(&t->node)) {
        auto inner = isub;
        for (const auto& v : sg->vars) inner.erase(v.name);
        return TypeAst::make(TypeAst::Sigma{sg->vars, substTypeIdx(sg->body, tsub, inner)},
                             t->pos);
    }
    return t;
}

} // namespace detail

class Evaluator;

// Defined alongside the builtin table in builtins.hpp.
ArrayValue callBuiltin(Evaluator& ev, const std::string& id,
                       const std::vector<ArrayValue>& cells, SourcePos pos);
const std::vector<CellRank>& builtinRanks(const std::string& id);
EnvPtr makeGlobalEnv();

class Evaluator {
public:
    explicit Evaluator(EvalConfig cfg = {}) : cfg_(cfg) {}

    const EvalConfig& config() const { return cfg_; }

    ArrayValue evaluate(const CoreExpr& e, const EnvPtr& env) {
        using namespace detail;

        if (const auto* lit = e.as<CoreExpr::ArrayLit>())
            return ArrayValue(lit->shape, lit->atoms);

        if (const auto* fr = e.as<CoreExpr::Frame>()) {
            std::vector<ArrayValue> parts;
            parts.reserve(fr->exprs.size());
            for (const ExprPtr& sub : fr->exprs) parts.push_back(evaluate(*sub, env));
            Shape frameShape{std::vector<std::size_t>(fr->dims)};
            std::optional<Shape> expected;
            if (parts.empty()) expected = Shape{};
            return collectFrame(frameShape, parts, expected);
        }

        if (const auto* v = e.as<CoreExpr::Var>()) {
            if (const ArrayValue* found = env->lookup(v->name)) return *found;
            fail(Err::UnboundVariable, "unbound variable '" + v->name + "'", e.pos);
        }

        if (const auto* app = e.as<CoreExpr::App>()) {
            ArrayValue fn = evaluate(*app->fn, env);
            std::vector<ArrayValue> args;
            args.reserve(app->args.size());
            for (const ExprPtr& a : app->args) args.push_back(evaluate(*a, env));
            return liftApply(fn, args, e.pos);
        }

        if (const auto* lam = e.as<CoreExpr::Lambda>())
            return ArrayValue::scalar(Atom(makeClosure(*lam, env, "")));

        if (const auto* iff = e.as<CoreExpr::If>()) {
            return evaluate(scalarBoolTest(*iff->test, env, e.pos) ? *iff->thenBranch
                                                                   : *iff->elseBranch,
                            env);
        }

        if (const auto* cond = e.as<CoreExpr::Cond>()) {
            for (const auto& [test, body] : cond->clauses)
                if (scalarBoolTest(*test, env, e.pos)) return evaluate(*body, env);
            return evaluate(*cond->elseBranch, env);
        }

        if (const auto* let = e.as<CoreExpr::Let>()) {
            EnvPtr inner = childEnv(env);
            for (const auto& b : let->bindings) inner->define(b.name, evaluate(*b.expr, env));
            return evaluate(*let->body, inner);
        }

        if (const auto* lets = e.as<CoreExpr::LetStar>()) {
            EnvPtr inner = childEnv(env);
            for (const auto& b : lets->bindings) inner->define(b.name, evaluate(*b.expr, inner));
            return evaluate(*lets->body, inner);
        }

        if (const auto* def = e.as<CoreExpr::Define>()) {
            ArrayValue value;
            if (const auto* lam = def->expr->as<CoreExpr::Lambda>())
                value = ArrayValue::scalar(Atom(makeClosure(*lam, env, def->name)));
            else
                value = evaluate(*def->expr, env);
            env->define(def->name, value);
            return value;
        }

        if (const auto* boxes = e.as<CoreExpr::Boxes>()) return evalBoxes(*boxes, env, e.pos);
        if (const auto* ub = e.as<CoreExpr::Unbox>()) return evalUnbox(*ub, env, e.pos);

        fail(Err::TypedFormInDynamicCode,
             "type and index forms must be erased before evaluation", e.pos);
    }

    // Rank-polymorphic application: split every participant (the function
    // array included) into a frame of cells, agree on the principal frame,
    // replicate stragglers, apply per cell, collect.
    ArrayValue liftApply(const ArrayValue& fnArr, const std::vector<ArrayValue>& args,
                         SourcePos pos = {}) {
        for (const Atom& a : fnArr.atoms)
            if (!std::holds_alternative<FunctionRef>(a))
                fail(Err::NotAFunction, "function position holds a non-function atom", pos);
        if (fnArr.atoms.empty())
            fail(Err::EmptyFrameUnknownCell, "cannot apply an empty array of functions", pos);

        const FunctionValue& first = *std::get<FunctionRef>(fnArr.atoms.front());
        for (const Atom& a : fnArr.atoms) {
            const FunctionValue& f = *std::get<FunctionRef>(a);
            if (f.cellRanks != first.cellRanks)
                fail(Err::HeterogeneousFunctionArray,
                     "functions in one application must share arity and cell ranks", pos);
        }
        if (args.size() != first.cellRanks.size())
            fail(Err::ArityMismatch, "function takes " + std::to_string(first.cellRanks.size()) +
                                         " arguments, got " + std::to_string(args.size()),
                 pos);

        // frames: the function position has scalar cells
        std::vector<Shape> frames;
        frames.push_back(fnArr.shape);
        for (std::size_t i = 0; i < args.size(); ++i) {
            CellRank r = first.cellRanks[i];
            if (r.all) {
                frames.push_back(Shape{});
            } else {
                if (r.rank > args[i].rank())
                    fail(Err::RankTooLow,
                         "argument " + std::to_string(i + 1) + " of rank " +
                             std::to_string(args[i].rank()) +
                             " cannot comprise a complete rank-" + std::to_string(r.rank) +
                             " cell",
                         pos);
                frames.push_back(args[i].shape.prefix(args[i].rank() - r.rank));
            }
        }

        const Shape* principal = &frames[0];
        for (const Shape& f : frames)
            if (f.rank() > principal->rank()) principal = &f;
        for (const Shape& f : frames)
            if (!f.isPrefixOf(*principal))
                fail(Err::FrameDisagreement, "argument frame " + f.str() +
                                                 " is not a prefix of the principal frame " +
                                                 principal->str(),
                     pos);

        std::vector<std::vector<ArrayValue>> cells;
        cells.push_back(replicateToFrame(fnArr, frames[0], *principal, CellRank::of(0)));
        for (std::size_t i = 0; i < args.size(); ++i)
            cells.push_back(
                replicateToFrame(args[i], frames[i + 1], *principal, first.cellRanks[i]));

        std::size_t n = principal->elementCount();
        if (n == 0) return collectFrame(*principal, {}, Shape{});

        std::vector<ArrayValue> results(n);
        auto applyAt = [&](std::size_t k) {
            const FunctionValue& fn = *std::get<FunctionRef>(cells[0][k].atoms[0]);
            std::vector<ArrayValue> argCells;
            argCells.reserve(args.size());
            for (std::size_t i = 0; i < args.size(); ++i) argCells.push_back(cells[i + 1][k]);
            results[k] = applyCell(fn, argCells, pos);
        };

        if (cfg_.parallelCells && n > 1 && !inParallelRegion()) {
            runParallel(n, applyAt);
        } else {
            for (std::size_t k = 0; k < n; ++k) applyAt(k);
        }
        return collectFrame(*principal, results);
    }

    // One cell-level application, past all frame machinery.
    ArrayValue applyCell(const FunctionValue& fn, const std::vector<ArrayValue>& cells,
                         SourcePos pos = {}) {
        if (fn.isBuiltin()) return callBuiltin(*this, fn.builtin().id, cells, pos);
        const auto& cl = fn.closure();
        EnvPtr env = childEnv(cl.env);
        for (std::size_t i = 0; i < cl.params.size(); ++i)
            env->define(cl.params[i].name, cells[i]);
        return evaluate(*cl.body, env);
    }

    // Translate a checked typed-dialect term to the dynamic core: drop type
    // and index applications, inline type/index abstractions, and turn
    // parameter types into cell ranks.
    static ExprPtr erase(const ExprPtr& e) {
        std::map<std::string, TypePtr> tsub;
        std::map<std::string, IndexPtr> isub;
        return eraseRec(e, tsub, isub);
    }

private:
    static FunctionRef makeClosure(const CoreExpr::Lambda& lam, const EnvPtr& env,
                                   std::string name) {
        FunctionValue fv;
        FunctionValue::Closure cl;
        for (const LambdaParam& p : lam.params) {
            if (!p.rank)
                fail(Err::TypedFormInDynamicCode,
                     "typed parameter '" + p.name + "' in dynamic code (erase first)");
            cl.params.push_back({p.name, *p.rank});
            fv.cellRanks.push_back(*p.rank);
        }
        cl.body = lam.body;
        cl.env = env;
        cl.name = std::move(name);
        fv.impl = std::move(cl);
        return std::make_shared<const FunctionValue>(std::move(fv));
    }

    bool scalarBoolTest(const CoreExpr& test, const EnvPtr& env, SourcePos pos) {
        ArrayValue v = evaluate(test, env);
        if (!v.isScalar() || !std::holds_alternative<bool>(v.atoms[0]))
            fail(Err::NonScalarCondition, "condition must evaluate to a scalar boolean", pos);
        return std::get<bool>(v.atoms[0]);
    }

    ArrayValue evalBoxes(const CoreExpr::Boxes& boxes, const EnvPtr& env, SourcePos pos) {
        std::vector<std::size_t> dims;
        for (const IndexPtr& d : boxes.dims) {
            auto v = detail::groundDim(d);
            if (!v) fail(Err::MalformedBox, "boxes shape must be literal at run time", pos);
            dims.push_back(*v);
        }
        Shape shape{std::vector<std::size_t>(dims)};
        if (boxes.clauses.size() != shape.elementCount())
            fail(Err::BadFrameArity, "boxes of shape " + shape.str() + " needs " +
                                         std::to_string(shape.elementCount()) + " clauses, got " +
                                         std::to_string(boxes.clauses.size()),
                 pos);
        std::vector<Atom> atoms;
        for (const auto& clause : boxes.clauses) {
            BoxValue box;
            for (std::size_t i = 0; i < clause.witnesses.size(); ++i) {
                auto w = detail::groundWitness(clause.witnesses[i]);
                if (!w) fail(Err::MalformedBox, "box witness must be literal at run time", pos);
                if (boxes.ivars[i].sort == IndexSort::Dim && w->sort != Witness::Sort::Dim)
                    fail(Err::SortError, "dimension witness expected", pos);
                if (boxes.ivars[i].sort == IndexSort::Shape && w->sort == Witness::Sort::Dim)
                    w = Witness::ofShape({w->dim}); // a lone dim is a one-axis shape
                box.witnesses.push_back(std::move(*w));
            }
            box.contents = evaluate(*clause.expr, env);
            atoms.emplace_back(std::make_shared<const BoxValue>(std::move(box)));
        }
        return ArrayValue(std::move(shape), std::move(atoms));
    }

    ArrayValue evalUnbox(const CoreExpr::Unbox& ub, const EnvPtr& env, SourcePos pos) {
        ArrayValue subject = evaluate(*ub.subject, env);
        std::vector<ArrayValue> results;
        results.reserve(subject.atoms.size());
        for (const Atom& a : subject.atoms) {
            const auto* box = std::get_if<BoxRef>(&a);
            if (!box) fail(Err::NotABox, "unbox subject must contain boxes", pos);
            if ((*box)->witnesses.size() != ub.witnessNames.size())
                fail(Err::WitnessArity,
                     "box carries " + std::to_string((*box)->witnesses.size()) +
                         " witnesses, unbox binds " + std::to_string(ub.witnessNames.size()),
                     pos);
            EnvPtr inner = childEnv(env);
            inner->define(ub.contentsName, (*box)->contents);
            for (std::size_t i = 0; i < ub.witnessNames.size(); ++i) {
                const Witness& w = (*box)->witnesses[i];
                if (w.sort == Witness::Sort::Dim) {
                    inner->define(ub.witnessNames[i],
                                  ArrayValue::scalar(Atom(static_cast<std::int64_t>(w.dim))));
                } else {
                    std::vector<std::int64_t> vs(w.shapeDims.begin(), w.shapeDims.end());
                    inner->define(ub.witnessNames[i],
                                  ArrayValue::ints(Shape{w.shapeDims.size()}, std::move(vs)));
                }
            }
            results.push_back(evaluate(*ub.body, inner));
        }
        std::optional<Shape> expected;
        if (results.empty()) expected = Shape{};
        return collectFrame(subject.shape, results, expected);
    }

    // --- parallel fan-out -------------------------------------------------

    static bool& inParallelFlag() {
        thread_local bool flag = false;
        return flag;
    }
    static bool inParallelRegion() { return inParallelFlag(); }

    template <typename F>
    void runParallel(std::size_t n, F&& applyAt) {
        std::size_t workers = std::min<std::size_t>(std::thread::hardware_concurrency(), n);
        if (workers < 2) {
            for (std::size_t k = 0; k < n; ++k) applyAt(k);
            return;
        }
        struct Failure {
            std::size_t index;
            std::exception_ptr error;
        };
        std::vector<std::optional<Failure>> failures(workers);
        std::vector<std::thread> threads;
        threads.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            threads.emplace_back([&, w] {
                inParallelFlag() = true;
                for (std::size_t k = w; k < n; k += workers) {
                    try {
                        applyAt(k);
                    } catch (...) {
                        failures[w] = Failure{k, std::current_exception()};
                        return;
                    }
                }
            });
        }
        for (auto& t : threads) t.join();
        // rethrow the failure of the lowest frame index so errors are
        // deterministic regardless of scheduling
        std::optional<Failure> first;
        for (auto& f : failures)
            if (f && (!first || f->index < first->index)) first = f;
        if (first) std::rethrow_exception(first->error);
    }

    // --- erasure ----------------------------------------------------------

    static ExprPtr eraseRec(const ExprPtr& e, std::map<std::string, TypePtr>& tsub,
                            std::map<std::string, IndexPtr>& isub) {
        using namespace detail;

        if (const auto* ta = e->as<CoreExpr::TApp>()) {
            if (const auto* tl = ta->fn->as<CoreExpr::TLambda>()) {
                auto inner = tsub;
                for (std::size_t i = 0; i < tl->vars.size() && i < ta->typeArgs.size(); ++i)
                    inner[tl->vars[i].name] = substTypeIdx(ta->typeArgs[i], tsub, isub);
                return eraseRec(tl->body, inner, isub);
            }
            return eraseRec(ta->fn, tsub, isub);
        }
        if (const auto* ia = e->as<CoreExpr::IApp>()) {
            if (const auto* il = ia->fn->as<CoreExpr::ILambda>()) {
                auto inner = isub;
                for (std::size_t i = 0; i < il->vars.size() && i < ia->indexArgs.size(); ++i)
                    inner[il->vars[i].name] = substIndex(ia->indexArgs[i], isub);
                return eraseRec(ia->fn->as<CoreExpr::ILambda>()->body, tsub, inner);
            }
            return eraseRec(ia->fn, tsub, isub);
        }
        if (const auto* tl = e->as<CoreExpr::TLambda>()) return eraseRec(tl->body, tsub, isub);
        if (const auto* il = e->as<CoreExpr::ILambda>()) return eraseRec(il->body, tsub, isub);

        if (const auto* lam = e->as<CoreExpr::Lambda>()) {
            CoreExpr::Lambda out;
            for (const LambdaParam& p : lam->params) {
                LambdaParam q;
                q.name = p.name;
                if (p.rank) {
                    q.rank = p.rank;
                } else {
                    TypePtr resolved = substTypeIdx(p.type, tsub, isub);
                    auto r = typeRankOf(resolved);
                    // a type whose rank the erased code cannot know (e.g. a
                    // bare @t) consumes its argument whole
                    q.rank = r ? CellRank::of(*r) : CellRank::whole();
                }
                out.params.push_back(std::move(q));
            }
            out.body = eraseRec(lam->body, tsub, isub);
            return CoreExpr::make(std::move(out), e->pos);
        }

        if (const auto* app = e->as<CoreExpr::App>()) {
            CoreExpr::App out;
            out.fn = eraseRec(app->fn, tsub, isub);
            for (const ExprPtr& a : app->args) out.args.push_back(eraseRec(a, tsub, isub));
            return CoreExpr::make(std::move(out), e->pos);
        }
        if (const auto* fr = e->as<CoreExpr::Frame>()) {
            CoreExpr::Frame out;
            out.dims = fr->dims;
            for (const ExprPtr& x : fr->exprs) out.exprs.push_back(eraseRec(x, tsub, isub));
            return CoreExpr::make(std::move(out), e->pos);
        }
        if (const auto* iff = e->as<CoreExpr::If>()) {
            return CoreExpr::make(CoreExpr::If{eraseRec(iff->test, tsub, isub),
                                               eraseRec(iff->thenBranch, tsub, isub),
                                               eraseRec(iff->elseBranch, tsub, isub)},
                                  e->pos);
        }
        if (const auto* cond = e->as<CoreExpr::Cond>()) {
            CoreExpr::Cond out;
            for (const auto& [t, b] : cond->clauses)
                out.clauses.emplace_back(eraseRec(t, tsub, isub), eraseRec(b, tsub, isub));
            out.elseBranch = eraseRec(cond->elseBranch, tsub, isub);
            return CoreExpr::make(std::move(out), e->pos);
        }
        if (const auto* let = e->as<CoreExpr::Let>()) {
            CoreExpr::Let out;
            for (const auto& b : let->bindings)
                out.bindings.push_back({b.name, eraseRec(b.expr, tsub, isub)});
            out.body = eraseRec(let->body, tsub, isub);
            return CoreExpr::make(std::move(out), e->pos);
        }
        if (const auto* lets = e->as<CoreExpr::LetStar>()) {
            CoreExpr::LetStar out;
            for (const auto& b : lets->bindings)
                out.bindings.push_back({b.name, eraseRec(b.expr, tsub, isub)});
            out.body = eraseRec(lets->body, tsub, isub);
            return CoreExpr::make(std::move(out), e->pos);
        }
        if (const auto* def = e->as<CoreExpr::Define>()) {
            return CoreExpr::make(CoreExpr::Define{def->name, eraseRec(def->expr, tsub, isub)},
                                  e->pos);
        }
        if (const auto* boxes = e->as<CoreExpr::Boxes>()) {
            CoreExpr::Boxes out;
            out.ivars = boxes->ivars;
            out.declared = boxes->declared; // kept only for printing; eval ignores it
            for (const IndexPtr& d : boxes->dims) out.dims.push_back(substIndex(d, isub));
            for (const auto& c : boxes->clauses) {
                CoreExpr::BoxClause clause;
                for (const IndexPtr& w : c.witnesses)
                    clause.witnesses.push_back(substIndex(w, isub));
                clause.expr = eraseRec(c.expr, tsub, isub);
                out.clauses.push_back(std::move(clause));
            }
            return CoreExpr::make(std::move(out), e->pos);
        }
        if (const auto* ub = e->as<CoreExpr::Unbox>()) {
            return CoreExpr::make(CoreExpr::Unbox{eraseRec(ub->subject, tsub, isub),
                                                  ub->contentsName, ub->witnessNames,
                                                  eraseRec(ub->body, tsub, isub)},
                                  e->pos);
        }
        return e; // ArrayLit, Var
    }

    EvalConfig cfg_;
};

} // namespace remora

#include "remora/builtins.hpp"
