#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace remora {

// Source coordinates, 1-based. Column counts codepoints, not bytes.
struct SourcePos {
    std::size_t line = 0;
    std::size_t column = 0;

    bool known() const { return line != 0; }
};

// Every failure an interpreter stage can signal. The names double as the
// stable diagnostic codes printed by the CLI and matched by corpus
// expectation files ("ERROR <code>").
enum class Err {
    // reader
    UnterminatedString,
    BadCharLiteral,
    IllegalCodepoint,
    BadNumberLiteral,
    UnbalancedDelimiter,
    MismatchedDelimiter,
    DanglingRerank,
    // desugar
    RaggedLiteral,
    BadFrameArity,
    MalformedBox,
    MalformedForm,
    // core model
    RankTooLow,
    CellShapeMismatch,
    EmptyFrameUnknownCell,
    // eval
    UnboundVariable,
    NonScalarCondition,
    TypedFormInDynamicCode,
    FrameDisagreement,
    NotAFunction,
    ArityMismatch,
    HeterogeneousFunctionArray,
    WitnessArity,
    NotABox,
    // builtins
    DivisionByZero,
    NegativeSqrt,
    TypeMismatchAtom,
    RankZeroAppend,
    TrailingShapeMismatch,
    RankZeroLength,
    NegativeDimension,
    RotationArity,
    EmptyDataSource,
    CountOutOfRange,
    IndexOutOfBounds,
    IndexTooLong,
    RankZeroSource,
    RegionOutOfBounds,
    SelectorLengthMismatch,
    RankZeroData,
    NegativeCount,
    EmptyReduce,
    // typecheck
    SortError,
    KindError,
    UnboundName,
    NotPolymorphic,
    NotIndexed,
    BranchTypeMismatch,
    CellTypeMismatch,
    CellSuffixMismatch,
    UnderdeterminedFactoring,
    ClauseTypeMismatch,
    EscapingIndexVariable,
    EmptyLiteralType,
    UntypedParameter,
    // cli
    MissingExpectation,
};

inline const char* errName(Err e) {
    switch (e) {
    case Err::UnterminatedString: return "UnterminatedString";
    case Err::BadCharLiteral: return "BadCharLiteral";
    case Err::IllegalCodepoint: return "IllegalCodepoint";
    case Err::BadNumberLiteral: return "BadNumberLiteral";
    case Err::UnbalancedDelimiter: return "UnbalancedDelimiter";
    case Err::MismatchedDelimiter: return "MismatchedDelimiter";
    case Err::DanglingRerank: return "DanglingRerank";
    case Err::RaggedLiteral: return "RaggedLiteral";
    case Err::BadFrameArity: return "BadFrameArity";
    case Err::MalformedBox: return "MalformedBox";
    case Err::MalformedForm: return "MalformedForm";
    case Err::RankTooLow: return "RankTooLow";
    case Err::CellShapeMismatch: return "CellShapeMismatch";
    case Err::EmptyFrameUnknownCell: return "EmptyFrameUnknownCell";
    case Err::UnboundVariable: return "UnboundVariable";
    case Err::NonScalarCondition: return "NonScalarCondition";
    case Err::TypedFormInDynamicCode: return "TypedFormInDynamicCode";
    case Err::FrameDisagreement: return "FrameDisagreement";
    case Err::NotAFunction: return "NotAFunction";
    case Err::ArityMismatch: return "ArityMismatch";
    case Err::HeterogeneousFunctionArray: return "HeterogeneousFunctionArray";
    case Err::WitnessArity: return "WitnessArity";
    case Err::NotABox: return "NotABox";
    case Err::DivisionByZero: return "DivisionByZero";
    case Err::NegativeSqrt: return "NegativeSqrt";
    case Err::TypeMismatchAtom: return "TypeMismatchAtom";
    case Err::RankZeroAppend: return "RankZeroAppend";
    case Err::TrailingShapeMismatch: return "TrailingShapeMismatch";
    case Err::RankZeroLength: return "RankZeroLength";
    case Err::NegativeDimension: return "NegativeDimension";
    case Err::RotationArity: return "RotationArity";
    case Err::EmptyDataSource: return "EmptyDataSource";
    case Err::CountOutOfRange: return "CountOutOfRange";
    case Err::IndexOutOfBounds: return "IndexOutOfBounds";
    case Err::IndexTooLong: return "IndexTooLong";
    case Err::RankZeroSource: return "RankZeroSource";
    case Err::RegionOutOfBounds: return "RegionOutOfBounds";
    case Err::SelectorLengthMismatch: return "SelectorLengthMismatch";
    case Err::RankZeroData: return "RankZeroData";
    case Err::NegativeCount: return "NegativeCount";
    case Err::EmptyReduce: return "EmptyReduce";
    case Err::SortError: return "SortError";
    case Err::KindError: return "KindError";
    case Err::UnboundName: return "UnboundName";
    case Err::NotPolymorphic: return "NotPolymorphic";
    case Err::NotIndexed: return "NotIndexed";
    case Err::BranchTypeMismatch: return "BranchTypeMismatch";
    case Err::CellTypeMismatch: return "CellTypeMismatch";
    case Err::CellSuffixMismatch: return "CellSuffixMismatch";
    case Err::UnderdeterminedFactoring: return "UnderdeterminedFactoring";
    case Err::ClauseTypeMismatch: return "ClauseTypeMismatch";
    case Err::EscapingIndexVariable: return "EscapingIndexVariable";
    case Err::EmptyLiteralType: return "EmptyLiteralType";
    case Err::UntypedParameter: return "UntypedParameter";
    case Err::MissingExpectation: return "MissingExpectation";
    }
    return "UnknownError";
}

class RemoraError : public std::runtime_error {
public:
    RemoraError(Err code, std::string message, SourcePos pos = {})
        : std::runtime_error(std::move(message)), code_(code), pos_(pos) {}

    Err code() const { return code_; }
    SourcePos pos() const { return pos_; }

    // "error[Code] line:col: message" (position omitted when unknown)
    std::string diagnostic() const {
        std::string out = "error[";
        out += errName(code_);
        out += "]";
        if (pos_.known()) {
            out += " " + std::to_string(pos_.line) + ":" + std::to_string(pos_.column);
        }
        out += ": ";
        out += what();
        return out;
    }

private:
    Err code_;
    SourcePos pos_;
};

[[noreturn]] inline void fail(Err code, std::string message, SourcePos pos = {}) {
    throw RemoraError(code, std::move(message), pos);
}

} // namespace remora
