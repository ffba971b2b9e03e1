#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "remora/value.hpp"

namespace remora {

struct IndexAst;
struct TypeAst;
using IndexPtr = std::shared_ptr<const IndexAst>;
using TypePtr = std::shared_ptr<const TypeAst>;

enum class IndexSort { Dim, Shape };

// Compile-time dimension/shape expressions: literals, variables, + on dims,
// ++ on shapes. Shape variables are spelled with a leading '@'.
struct IndexAst {
    struct DimLit { std::size_t value; };
    struct DimVar { std::string name; };
    struct DimSum { std::vector<IndexPtr> terms; };
    struct ShapeLit { std::vector<IndexPtr> dims; };
    struct ShapeVar { std::string name; };
    struct ShapeConcat { std::vector<IndexPtr> parts; };

    std::variant<DimLit, DimVar, DimSum, ShapeLit, ShapeVar, ShapeConcat> node;
    SourcePos pos;

    template <typename T>
    static IndexPtr make(T t, SourcePos p = {}) {
        return std::make_shared<IndexAst>(IndexAst{std::move(t), p});
    }
};

enum class BaseType { Int, Float, Bool, Char };

enum class TypeVarFlavor { Elem, Array };

struct TypeVarBinder {
    std::string name;
    TypeVarFlavor flavor; // array-type variables are spelled '@name'
};

struct IndexVarBinder {
    std::string name;
    IndexSort sort; // shape-index variables are spelled '@name'
};

// Types. Base/ElemVar/Fn/Forall/Pi/Sigma classify atoms; Arr classifies
// arrays; ArrVar stands for a whole array type. An element type written where
// an array type is expected means a scalar array of it (resolved by the
// checker, not here).
struct TypeAst {
    struct Base { BaseType base; };
    struct ElemVar { std::string name; };
    struct ArrVar { std::string name; };
    struct Arr { TypePtr elem; IndexPtr shape; };
    struct Fn { std::vector<TypePtr> args; TypePtr result; };
    struct Forall { std::vector<TypeVarBinder> vars; TypePtr body; };
    struct Pi { std::vector<IndexVarBinder> vars; TypePtr body; };
    struct Sigma { std::vector<IndexVarBinder> vars; TypePtr body; };

    std::variant<Base, ElemVar, ArrVar, Arr, Fn, Forall, Pi, Sigma> node;
    SourcePos pos;

    template <typename T>
    static TypePtr make(T t, SourcePos p = {}) {
        return std::make_shared<TypeAst>(TypeAst{std::move(t), p});
    }
};

struct CoreExpr;
using ExprPtr = std::shared_ptr<const CoreExpr>;

// A lambda parameter carries either a cell rank (dynamic dialect) or a type
// (typed dialect, erased to a rank before evaluation).
struct LambdaParam {
    std::string name;
    std::optional<CellRank> rank;
    TypePtr type; // null unless typed
};

// The seven-form core syntax plus the typed-dialect constructs.
struct CoreExpr {
    struct ArrayLit {
        Shape shape;
        std::vector<Atom> atoms; // only int/float/bool/char atoms arise here
    };
    struct Frame {
        std::vector<std::size_t> dims;
        std::vector<ExprPtr> exprs;
    };
    struct Var { std::string name; };
    struct App {
        ExprPtr fn;
        std::vector<ExprPtr> args;
    };
    struct Lambda {
        std::vector<LambdaParam> params;
        ExprPtr body;
    };
    struct If {
        ExprPtr test, thenBranch, elseBranch;
    };
    struct Cond {
        std::vector<std::pair<ExprPtr, ExprPtr>> clauses;
        ExprPtr elseBranch;
    };
    struct Binding {
        std::string name;
        ExprPtr expr;
    };
    struct Let {
        std::vector<Binding> bindings;
        ExprPtr body;
    };
    struct LetStar {
        std::vector<Binding> bindings;
        ExprPtr body;
    };
    struct Define {
        std::string name;
        ExprPtr expr;
    };
    struct TLambda {
        std::vector<TypeVarBinder> vars;
        ExprPtr body;
    };
    struct ILambda {
        std::vector<IndexVarBinder> vars;
        ExprPtr body;
    };
    struct TApp {
        ExprPtr fn;
        std::vector<TypePtr> typeArgs;
    };
    struct IApp {
        ExprPtr fn;
        std::vector<IndexPtr> indexArgs;
    };
    struct BoxClause {
        std::vector<IndexPtr> witnesses;
        ExprPtr expr;
    };
    struct Boxes {
        std::vector<IndexVarBinder> ivars;
        TypePtr declared;
        std::vector<IndexPtr> dims;
        std::vector<BoxClause> clauses;
    };
    struct Unbox {
        ExprPtr subject;
        std::string contentsName;
        std::vector<std::string> witnessNames;
        ExprPtr body;
    };

    std::variant<ArrayLit, Frame, Var, App, Lambda, If, Cond, Let, LetStar, Define,
                 TLambda, ILambda, TApp, IApp, Boxes, Unbox>
        node;
    SourcePos pos;

    template <typename T>
    static ExprPtr make(T t, SourcePos p = {}) {
        return std::make_shared<CoreExpr>(CoreExpr{std::move(t), p});
    }

    template <typename T>
    const T* as() const {
        return std::get_if<T>(&node);
    }
};

} // namespace remora
