#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "fwdflat/scalar.hpp"

namespace fwdflat {

using Row = std::vector<Scalar>;
using Matrix = std::vector<Row>;

/// Row space kept in echelon form over the field of rational functions.
///
/// Every stored row has a pivot entry equal to one and zeros in the pivot
/// columns of all rows stored before it. Pivot selection is the first entry
/// that is not identically zero, which makes results deterministic.
class RowSpace {
 public:
  explicit RowSpace(std::size_t columns) : columns_(columns) {}

  std::size_t columns() const { return columns_; }
  std::size_t rank() const { return rows_.size(); }
  const Matrix& rows() const { return rows_; }
  const std::vector<std::size_t>& pivots() const { return pivots_; }

  /// Residual of `row` after elimination against the stored rows.
  Row reduce(Row row) const;
  /// Adds `row`; returns false (and stores nothing) when it is already in the span.
  bool add(const Row& row);
  bool contains(const Row& row) const;

 private:
  std::size_t columns_;
  Matrix rows_;
  std::vector<std::size_t> pivots_;
};

struct Echelon {
  Matrix rows;                      // reduced rows, pivot entries equal one
  std::vector<std::size_t> pivots;  // pivot column of each row
};

/// Reduced row echelon form. Pivot columns are searched in `column_order`
/// (natural order when empty); zero rows are dropped.
Echelon reduced_echelon(const Matrix& m, std::size_t columns, const std::vector<std::size_t>& column_order = {});

std::size_t generic_rank(const Matrix& rows, std::size_t columns);
std::size_t generic_rank(const Matrix& rows);

/// Indices of the rows that increase the rank when scanned in order.
std::vector<std::size_t> independent_rows(const Matrix& rows, std::size_t columns);

/// Basis of the right kernel {c : m c = 0}, one vector per free column.
Matrix kernel_basis(const Matrix& m, std::size_t columns);

Matrix transpose(const Matrix& m, std::size_t columns);

/// Indices of a maximal subset of rows that are linearly independent over the
/// rational constants (not over the function field).
std::vector<std::size_t> constant_independent_rows(const Matrix& rows);

bool is_zero_row(const Row& row);

}  // namespace fwdflat
