#pragma once

// Finite cell complexes, integer-valued constructible functions on them and
// the Euler integral with respect to compactly supported Euler
// characteristic.

#include <algorithm>
#include <cstdint>
#include <memory>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "eulercalc/errors.hpp"

namespace eulercalc {

/// Opaque cell label.
struct CellId {
  std::uint64_t value = 0;
  friend bool operator==(CellId a, CellId b) { return a.value == b.value; }
  friend bool operator<(CellId a, CellId b) { return a.value < b.value; }
};

struct CellIdHash {
  std::size_t operator()(CellId id) const noexcept { return std::hash<std::uint64_t>{}(id.value); }
};

/// One relatively open cell; contributes (-1)^dim to the Euler integral.
struct Cell {
  CellId id;
  int dim = 0;
};

/// A disjoint partition of a space into open cells.
class FiniteCellComplex {
 public:
  FiniteCellComplex() = default;

  explicit FiniteCellComplex(std::vector<Cell> cells, int ambient_dim = 2)
      : cells_(std::move(cells)), ambient_dim_(ambient_dim) {
    index_.reserve(cells_.size());
    for (std::size_t i = 0; i < cells_.size(); ++i) {
      const Cell& c = cells_[i];
      if (c.dim < 0 || c.dim > ambient_dim_)
        throw StructuralError("cell dimension " + std::to_string(c.dim) +
                              " outside [0, " + std::to_string(ambient_dim_) + "]");
      if (!index_.emplace(c.id, i).second)
        throw StructuralError("duplicate cell id " + std::to_string(c.id.value));
    }
  }

  const std::vector<Cell>& cells() const { return cells_; }
  std::size_t size() const { return cells_.size(); }
  int ambient_dim() const { return ambient_dim_; }

  std::size_t index_of(CellId id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw StructuralError("unknown cell id " + std::to_string(id.value));
    return it->second;
  }

  bool contains(CellId id) const { return index_.count(id) != 0; }

 private:
  std::vector<Cell> cells_;
  std::unordered_map<CellId, std::size_t, CellIdHash> index_;
  int ambient_dim_ = 2;
};

/// h in CF(X): an integer weight on every open cell of a shared complex.
class ConstructibleFn {
 public:
  explicit ConstructibleFn(std::shared_ptr<const FiniteCellComplex> complex)
      : complex_(std::move(complex)), weights_(complex_->size(), 0) {}

  ConstructibleFn(std::shared_ptr<const FiniteCellComplex> complex, std::vector<std::int64_t> weights)
      : complex_(std::move(complex)), weights_(std::move(weights)) {
    if (weights_.size() != complex_->size())
      throw StructuralError("weight vector does not match complex size");
  }

  const FiniteCellComplex& complex() const { return *complex_; }
  const std::shared_ptr<const FiniteCellComplex>& complex_ptr() const { return complex_; }

  std::int64_t weight(CellId id) const { return weights_[complex_->index_of(id)]; }
  std::int64_t weight_at(std::size_t index) const { return weights_[index]; }
  const std::vector<std::int64_t>& weights() const { return weights_; }

  ConstructibleFn with_weight(CellId id, std::int64_t w) const {
    ConstructibleFn out = *this;
    out.weights_[complex_->index_of(id)] = w;
    return out;
  }

 private:
  std::shared_ptr<const FiniteCellComplex> complex_;
  std::vector<std::int64_t> weights_;
};

/// Sum of weight(c) * (-1)^dim(c) over all cells.
inline std::int64_t euler_integral(const ConstructibleFn& f) {
  std::int64_t total = 0;
  const auto& cells = f.complex().cells();
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const std::int64_t w = f.weight_at(i);
    total += (cells[i].dim % 2 == 0) ? w : -w;
  }
  return total;
}

inline ConstructibleFn pointwise_add(const ConstructibleFn& f, const ConstructibleFn& g) {
  if (f.complex_ptr() != g.complex_ptr()) throw StructuralError("cannot add functions on different complexes");
  std::vector<std::int64_t> w(f.weights());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] += g.weight_at(i);
  return ConstructibleFn(f.complex_ptr(), std::move(w));
}

inline ConstructibleFn pointwise_scale(const ConstructibleFn& f, std::int64_t k) {
  std::vector<std::int64_t> w(f.weights());
  for (auto& x : w) x *= k;
  return ConstructibleFn(f.complex_ptr(), std::move(w));
}

inline ConstructibleFn operator+(const ConstructibleFn& f, const ConstructibleFn& g) { return pointwise_add(f, g); }
inline ConstructibleFn operator*(std::int64_t k, const ConstructibleFn& f) { return pointwise_scale(f, k); }

/// Cubical structure of a rows x cols pixel grid. Cells are numbered
/// vertices first, then horizontal edges, vertical edges and squares.
///
/// Pixel (i, j) occupies [j, j+1] x [i, i+1]; vertex (i, j) sits at
/// column j, row i with 0 <= i <= rows, 0 <= j <= cols.
class CubicalGrid {
 public:
  CubicalGrid(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {
    if (rows == 0 || cols == 0) throw StructuralError("empty grid");
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  std::size_t vertex_count() const { return (rows_ + 1) * (cols_ + 1); }
  std::size_t hedge_count() const { return (rows_ + 1) * cols_; }
  std::size_t vedge_count() const { return rows_ * (cols_ + 1); }
  std::size_t square_count() const { return rows_ * cols_; }
  std::size_t cell_count() const { return vertex_count() + hedge_count() + vedge_count() + square_count(); }

  std::size_t vertex(std::size_t i, std::size_t j) const { return i * (cols_ + 1) + j; }
  /// Edge from vertex (i, j) to (i, j+1).
  std::size_t hedge(std::size_t i, std::size_t j) const { return vertex_count() + i * cols_ + j; }
  /// Edge from vertex (i, j) to (i+1, j).
  std::size_t vedge(std::size_t i, std::size_t j) const { return vertex_count() + hedge_count() + i * (cols_ + 1) + j; }
  std::size_t square(std::size_t i, std::size_t j) const {
    return vertex_count() + hedge_count() + vedge_count() + i * cols_ + j;
  }

  int dim_of(std::size_t cell) const {
    if (cell < vertex_count()) return 0;
    if (cell < vertex_count() + hedge_count() + vedge_count()) return 1;
    return 2;
  }

  /// Codimension-one faces of a cell.
  std::vector<std::size_t> facets(std::size_t cell) const {
    if (cell < vertex_count()) return {};
    std::size_t k = cell - vertex_count();
    if (k < hedge_count()) {
      std::size_t i = k / cols_, j = k % cols_;
      return {vertex(i, j), vertex(i, j + 1)};
    }
    k -= hedge_count();
    if (k < vedge_count()) {
      std::size_t i = k / (cols_ + 1), j = k % (cols_ + 1);
      return {vertex(i, j), vertex(i + 1, j)};
    }
    k -= vedge_count();
    std::size_t i = k / cols_, j = k % cols_;
    return {hedge(i, j), hedge(i + 1, j), vedge(i, j), vedge(i, j + 1)};
  }

  /// Adds every face of every marked cell.
  std::vector<bool> closure(std::vector<bool> marked) const {
    // Squares, then edges, then vertices: facets always have lower index
    // blocks, so a single descending pass suffices.
    for (std::size_t c = cell_count(); c-- > 0;) {
      if (!marked[c]) continue;
      for (std::size_t f : facets(c)) marked[f] = true;
    }
    return marked;
  }

  std::shared_ptr<const FiniteCellComplex> complex() const {
    std::vector<Cell> cells;
    cells.reserve(cell_count());
    for (std::size_t c = 0; c < cell_count(); ++c) cells.push_back(Cell{CellId{c}, dim_of(c)});
    return std::make_shared<const FiniteCellComplex>(std::move(cells), 2);
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
};

/// Reads an integer grid as a union of closed pixels: squares carry their
/// pixel value, lower-dimensional cells the maximum over adjacent pixels.
inline ConstructibleFn cubical_from_mask(const std::vector<std::vector<std::int64_t>>& grid) {
  if (grid.empty() || grid.front().empty()) throw StructuralError("empty grid");
  const std::size_t rows = grid.size();
  const std::size_t cols = grid.front().size();
  for (const auto& row : grid)
    if (row.size() != cols) throw StructuralError("grid rows have different lengths");

  CubicalGrid cg(rows, cols);
  constexpr std::int64_t kUnset = INT64_MIN;
  std::vector<std::int64_t> w(cg.cell_count(), kUnset);
  auto raise = [&](std::size_t cell, std::int64_t v) { w[cell] = (w[cell] == kUnset) ? v : std::max(w[cell], v); };

  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const std::int64_t v = grid[i][j];
      w[cg.square(i, j)] = v;
      raise(cg.hedge(i, j), v);
      raise(cg.hedge(i + 1, j), v);
      raise(cg.vedge(i, j), v);
      raise(cg.vedge(i, j + 1), v);
      raise(cg.vertex(i, j), v);
      raise(cg.vertex(i, j + 1), v);
      raise(cg.vertex(i + 1, j), v);
      raise(cg.vertex(i + 1, j + 1), v);
    }
  }
  return ConstructibleFn(cg.complex(), std::move(w));
}

/// Indicator of a set of cells on a grid complex.
inline ConstructibleFn indicator(const CubicalGrid& cg, std::shared_ptr<const FiniteCellComplex> complex,
                                 const std::vector<bool>& cells) {
  std::vector<std::int64_t> w(cg.cell_count(), 0);
  for (std::size_t c = 0; c < w.size(); ++c) w[c] = cells[c] ? 1 : 0;
  return ConstructibleFn(std::move(complex), std::move(w));
}

}  // namespace eulercalc
