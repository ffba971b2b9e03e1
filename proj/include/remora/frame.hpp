#pragma once

#include <optional>
#include <vector>

#include "remora/value.hpp"

namespace remora {

// An array viewed as a frame of cells: the cell shape is a suffix of the
// array's shape, the frame is the remaining prefix.

struct CellView {
    Shape frameShape;
    std::vector<ArrayValue> cells; // row-major frame order
};

inline CellView splitCells(const ArrayValue& a, CellRank cellRank) {
    if (cellRank.all)
        return {Shape{}, {a}};
    if (cellRank.rank > a.rank())
        fail(Err::RankTooLow, "argument of rank " + std::to_string(a.rank()) +
                                  " cannot supply a complete rank-" +
                                  std::to_string(cellRank.rank) + " cell");
    std::size_t frameRank = a.rank() - cellRank.rank;
    Shape frame = a.shape.prefix(frameRank);
    Shape cellShape = a.shape.suffix(cellRank.rank);
    std::size_t cellCount = frame.elementCount();
    std::size_t cellSize = cellShape.elementCount();
    std::vector<ArrayValue> cells;
    cells.reserve(cellCount);
    for (std::size_t i = 0; i < cellCount; ++i) {
        std::vector<Atom> atoms(a.atoms.begin() + static_cast<std::ptrdiff_t>(i * cellSize),
                                a.atoms.begin() + static_cast<std::ptrdiff_t>((i + 1) * cellSize));
        cells.emplace_back(cellShape, std::move(atoms));
    }
    return {std::move(frame), std::move(cells)};
}

// Assemble per-cell results back into a frame. All cells must share a shape;
// for a zero-extent frame there are no cells to inspect, so the caller must
// say what the cell shape would have been.
inline ArrayValue collectFrame(const Shape& frameShape, const std::vector<ArrayValue>& cells,
                               std::optional<Shape> expectedCellShape = std::nullopt) {
    Shape cellShape;
    if (!cells.empty()) {
        cellShape = cells.front().shape;
        for (const ArrayValue& c : cells)
            if (c.shape != cellShape)
                fail(Err::CellShapeMismatch, "result cells disagree in shape: " +
                                                 cellShape.str() + " vs " + c.shape.str());
        if (expectedCellShape && *expectedCellShape != cellShape)
            fail(Err::CellShapeMismatch, "result cells have shape " + cellShape.str() +
                                             ", expected " + expectedCellShape->str());
    } else {
        if (!expectedCellShape)
            fail(Err::EmptyFrameUnknownCell,
                 "cannot determine the cell shape of an empty frame");
        cellShape = *expectedCellShape;
    }
    ArrayValue out(frameShape + cellShape, {});
    out.atoms.reserve(frameShape.elementCount() * cellShape.elementCount());
    for (const ArrayValue& c : cells)
        out.atoms.insert(out.atoms.end(), c.atoms.begin(), c.atoms.end());
    return out;
}

// Replicate an argument whose frame is a (possibly proper) prefix of the
// principal frame: the cell for a principal index is found by dropping the
// index's unneeded suffix. Row-major, that repeats each cell over the product
// of the missing dimensions.
inline std::vector<ArrayValue> replicateToFrame(const ArrayValue& a, const Shape& ownFrame,
                                                const Shape& principal, CellRank cellRank) {
    CellView view = splitCells(a, cellRank);
    std::size_t repeat = 1;
    for (std::size_t i = ownFrame.rank(); i < principal.rank(); ++i)
        repeat *= principal.dims[i];
    if (repeat == 1 && ownFrame == principal) return std::move(view.cells);
    std::vector<ArrayValue> out;
    out.reserve(principal.elementCount());
    for (const ArrayValue& cell : view.cells)
        for (std::size_t r = 0; r < repeat; ++r) out.push_back(cell);
    return out;
}

// Row-major offset helpers shared by the indexing builtins.
inline std::size_t rowMajorOffset(const Shape& shape, const std::vector<std::size_t>& index) {
    std::size_t off = 0;
    for (std::size_t k = 0; k < index.size(); ++k) off = off * shape.dims[k] + index[k];
    // remaining axes contribute a block factor
    for (std::size_t k = index.size(); k < shape.rank(); ++k) off *= shape.dims[k];
    return off;
}

inline bool nextIndex(std::vector<std::size_t>& idx, const Shape& shape) {
    for (std::size_t k = shape.rank(); k-- > 0;) {
        if (++idx[k] < shape.dims[k]) return true;
        idx[k] = 0;
    }
    return false;
}

} // namespace remora
