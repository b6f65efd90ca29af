#include "fwdflat/linalg.hpp"

#include <map>
#include <numeric>

namespace fwdflat {

bool is_zero_row(const Row& row) {
  for (const auto& s : row)
    if (!s.is_zero()) return false;
  return true;
}

Row RowSpace::reduce(Row row) const {
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    const Scalar factor = row[pivots_[i]];
    if (factor.is_zero()) continue;
    const Row& base = rows_[i];
    for (std::size_t c = 0; c < columns_; ++c) {
      if (base[c].is_zero()) continue;
      row[c] = row[c] - factor * base[c];
    }
  }
  return row;
}

bool RowSpace::add(const Row& row) {
  Row r = reduce(row);
  std::size_t pivot = columns_;
  for (std::size_t c = 0; c < columns_; ++c) {
    if (!r[c].is_zero()) {
      pivot = c;
      break;
    }
  }
  if (pivot == columns_) return false;
  const Scalar inv = Scalar(1) / r[pivot];
  for (auto& s : r)
    if (!s.is_zero()) s = s * inv;
  rows_.push_back(std::move(r));
  pivots_.push_back(pivot);
  return true;
}

bool RowSpace::contains(const Row& row) const {
  return is_zero_row(reduce(row));
}

Echelon reduced_echelon(const Matrix& m, std::size_t columns, const std::vector<std::size_t>& column_order) {
  std::vector<std::size_t> order = column_order;
  if (order.empty()) {
    order.resize(columns);
    std::iota(order.begin(), order.end(), 0);
  }
  Matrix a = m;
  Echelon out;
  std::size_t next = 0;
  for (std::size_t col : order) {
    std::size_t r = next;
    while (r < a.size() && a[r][col].is_zero()) ++r;
    if (r == a.size()) continue;
    std::swap(a[next], a[r]);
    const Scalar inv = Scalar(1) / a[next][col];
    for (auto& s : a[next])
      if (!s.is_zero()) s = s * inv;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (i == next || a[i][col].is_zero()) continue;
      const Scalar factor = a[i][col];
      for (std::size_t c = 0; c < columns; ++c) {
        if (a[next][c].is_zero()) continue;
        a[i][c] = a[i][c] - factor * a[next][c];
      }
    }
    out.pivots.push_back(col);
    ++next;
    if (next == a.size()) break;
  }
  a.resize(next);
  out.rows = std::move(a);
  return out;
}

std::size_t generic_rank(const Matrix& rows, std::size_t columns) {
  RowSpace space(columns);
  for (const auto& r : rows) space.add(r);
  return space.rank();
}

std::size_t generic_rank(const Matrix& rows) {
  return rows.empty() ? 0 : generic_rank(rows, rows.front().size());
}

std::vector<std::size_t> independent_rows(const Matrix& rows, std::size_t columns) {
  RowSpace space(columns);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (space.add(rows[i])) out.push_back(i);
  return out;
}

Matrix kernel_basis(const Matrix& m, std::size_t columns) {
  Echelon e = reduced_echelon(m, columns);
  std::vector<bool> is_pivot(columns, false);
  for (auto p : e.pivots) is_pivot[p] = true;
  Matrix basis;
  for (std::size_t free = 0; free < columns; ++free) {
    if (is_pivot[free]) continue;
    Row v(columns);
    v[free] = Scalar(1);
    for (std::size_t i = 0; i < e.rows.size(); ++i) v[e.pivots[i]] = -e.rows[i][free];
    basis.push_back(std::move(v));
  }
  return basis;
}

Matrix transpose(const Matrix& m, std::size_t columns) {
  Matrix t(columns, Row(m.size()));
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < columns; ++j) t[j][i] = m[i][j];
  return t;
}

namespace {

// Rank of rational vectors by plain Gaussian elimination; rows are sparse maps.
class ConstantRowSpace {
 public:
  bool add(std::map<std::size_t, mpq_class> row) {
    for (const auto& [pivot, base] : rows_) {
      auto it = row.find(pivot);
      if (it == row.end()) continue;
      const mpq_class f = it->second;
      for (const auto& [c, v] : base) {
        mpq_class& slot = row[c];
        slot -= f * v;
        if (sgn(slot) == 0) row.erase(c);
      }
    }
    if (row.empty()) return false;
    const std::size_t pivot = row.begin()->first;
    const mpq_class inv = 1 / row.begin()->second;
    for (auto& [c, v] : row) v *= inv;
    rows_.emplace_back(pivot, std::move(row));
    return true;
  }

 private:
  std::vector<std::pair<std::size_t, std::map<std::size_t, mpq_class>>> rows_;
};

}  // namespace

std::vector<std::size_t> constant_independent_rows(const Matrix& rows) {
  // Bring every entry over one common denominator; a constant linear relation
  // among the rows is then a relation among polynomial coefficient vectors.
  Poly common(1);
  for (const auto& r : rows)
    for (const auto& s : r) {
      if (s.is_polynomial()) continue;
      Poly g = gcd(common, s.den());
      common = common * *exact_divide(s.den(), g);
    }
  struct SlotLess {
    bool operator()(const std::pair<std::size_t, Monomial>& a, const std::pair<std::size_t, Monomial>& b) const {
      if (a.first != b.first) return a.first < b.first;
      return compare(a.second, b.second) < 0;
    }
  };
  std::map<std::pair<std::size_t, Monomial>, std::size_t, SlotLess> slots;
  auto slot = [&](std::size_t col, const Monomial& m) {
    auto key = std::make_pair(col, m);
    auto it = slots.find(key);
    if (it != slots.end()) return it->second;
    const std::size_t id = slots.size();
    slots.emplace(std::move(key), id);
    return id;
  };
  ConstantRowSpace space;
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::map<std::size_t, mpq_class> vec;
    for (std::size_t c = 0; c < rows[i].size(); ++c) {
      const Scalar& s = rows[i][c];
      if (s.is_zero()) continue;
      Poly p = s.num() * *exact_divide(common, s.den());
      for (const auto& t : p.terms()) vec[slot(c, t.mono)] += t.coef;
    }
    std::erase_if(vec, [](const auto& kv) { return sgn(kv.second) == 0; });
    if (space.add(std::move(vec))) out.push_back(i);
  }
  return out;
}

}  // namespace fwdflat
