#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <tuple>
#include <utility>
#include <vector>

#include "l2hecke/error.hpp"
#include "l2hecke/exactmath/rational.hpp"

namespace l2hecke {

/// Dense row-major matrix of exact rationals.
class RationalMatrix {
 public:
  RationalMatrix() = default;
  RationalMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, BigRational(0)) {}

  static RationalMatrix identity(std::size_t n) {
    RationalMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  BigRational& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const BigRational& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<BigRational> data_;
};

/// Rank by exact rational Gaussian elimination. Pivot choice is the first
/// nonzero entry of the current column, scanning rows top to bottom.
inline std::size_t exact_rank(RationalMatrix m) {
  std::size_t rank = 0;
  for (std::size_t c = 0; c < m.cols() && rank < m.rows(); ++c) {
    std::size_t pivot = rank;
    while (pivot < m.rows() && m(pivot, c) == 0) ++pivot;
    if (pivot == m.rows()) continue;
    if (pivot != rank)
      for (std::size_t k = c; k < m.cols(); ++k) std::swap(m(pivot, k), m(rank, k));
    for (std::size_t r = rank + 1; r < m.rows(); ++r) {
      if (m(r, c) == 0) continue;
      BigRational f = m(r, c) / m(rank, c);
      for (std::size_t k = c; k < m.cols(); ++k) m(r, k) -= f * m(rank, k);
    }
    ++rank;
  }
  return rank;
}

/// Basis of the right kernel from the reduced row echelon form: one vector
/// per free column, equal to 1 there and 0 on the other free columns.
inline std::vector<std::vector<BigRational>> exact_kernel_basis(RationalMatrix m) {
  std::vector<std::size_t> pivots;
  std::size_t rank = 0;
  for (std::size_t c = 0; c < m.cols() && rank < m.rows(); ++c) {
    std::size_t pivot = rank;
    while (pivot < m.rows() && m(pivot, c) == 0) ++pivot;
    if (pivot == m.rows()) continue;
    if (pivot != rank)
      for (std::size_t k = 0; k < m.cols(); ++k) std::swap(m(pivot, k), m(rank, k));
    const BigRational inv = 1 / m(rank, c);
    for (std::size_t k = c; k < m.cols(); ++k) m(rank, k) *= inv;
    for (std::size_t r = 0; r < m.rows(); ++r) {
      if (r == rank || m(r, c) == 0) continue;
      const BigRational f = m(r, c);
      for (std::size_t k = c; k < m.cols(); ++k) m(r, k) -= f * m(rank, k);
    }
    pivots.push_back(c);
    ++rank;
  }
  std::vector<bool> is_pivot(m.cols(), false);
  for (std::size_t c : pivots) is_pivot[c] = true;
  std::vector<std::vector<BigRational>> basis;
  for (std::size_t f = 0; f < m.cols(); ++f) {
    if (is_pivot[f]) continue;
    std::vector<BigRational> v(m.cols(), BigRational(0));
    v[f] = 1;
    for (std::size_t i = 0; i < pivots.size(); ++i) v[pivots[i]] = -m(i, f);
    basis.push_back(std::move(v));
  }
  return basis;
}

/// Inverse by Gauss-Jordan elimination; throws if singular.
inline RationalMatrix exact_inverse(RationalMatrix m) {
  if (m.rows() != m.cols()) throw Error(ErrorKind::DimensionMismatch, "inverse of a non-square matrix");
  const std::size_t n = m.rows();
  RationalMatrix inv = RationalMatrix::identity(n);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t pivot = c;
    while (pivot < n && m(pivot, c) == 0) ++pivot;
    if (pivot == n) throw Error(ErrorKind::DimensionMismatch, "singular matrix");
    for (std::size_t k = 0; k < n; ++k) {
      std::swap(m(pivot, k), m(c, k));
      std::swap(inv(pivot, k), inv(c, k));
    }
    const BigRational p = 1 / m(c, c);
    for (std::size_t k = 0; k < n; ++k) {
      m(c, k) *= p;
      inv(c, k) *= p;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || m(r, c) == 0) continue;
      const BigRational f = m(r, c);
      for (std::size_t k = 0; k < n; ++k) {
        m(r, k) -= f * m(c, k);
        inv(r, k) -= f * inv(c, k);
      }
    }
  }
  return inv;
}

/// cols - rank, computed without any floating point.
inline std::size_t exact_nullity(const RationalMatrix& m) { return m.cols() - exact_rank(m); }

/// Compressed sparse row matrix of 64-bit integers. Operator coefficient
/// matrices live in this form; entries are exact.
class SparseIntMatrix {
 public:
  struct Entry {
    std::size_t row;
    std::size_t col;
    std::int64_t value;
  };

  SparseIntMatrix() = default;
  SparseIntMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), row_ptr_(rows + 1, 0) {}

  /// Duplicate (row, col) entries are summed; zeros are dropped.
  static SparseIntMatrix from_entries(std::size_t rows, std::size_t cols, std::vector<Entry> entries) {
    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) { return std::tie(a.row, a.col) < std::tie(b.row, b.col); });
    SparseIntMatrix m(rows, cols);
    for (std::size_t i = 0; i < entries.size();) {
      const Entry& e = entries[i];
      if (e.row >= rows || e.col >= cols) throw Error(ErrorKind::DimensionMismatch, "sparse entry out of range");
      std::int64_t sum = 0;
      std::size_t j = i;
      for (; j < entries.size() && entries[j].row == e.row && entries[j].col == e.col; ++j) sum += entries[j].value;
      if (sum != 0) {
        m.col_idx_.push_back(e.col);
        m.values_.push_back(sum);
        ++m.row_ptr_[e.row + 1];
      }
      i = j;
    }
    for (std::size_t r = 0; r < rows; ++r) m.row_ptr_[r + 1] += m.row_ptr_[r];
    return m;
  }

  static SparseIntMatrix from_dense(const std::vector<std::vector<std::int64_t>>& dense) {
    std::vector<Entry> entries;
    std::size_t cols = dense.empty() ? 0 : dense.front().size();
    for (std::size_t r = 0; r < dense.size(); ++r) {
      if (dense[r].size() != cols) throw Error(ErrorKind::DimensionMismatch, "ragged dense matrix");
      for (std::size_t c = 0; c < cols; ++c)
        if (dense[r][c] != 0) entries.push_back({r, c, dense[r][c]});
    }
    return from_entries(dense.size(), cols, std::move(entries));
  }

  static SparseIntMatrix identity(std::size_t n) {
    std::vector<Entry> entries;
    for (std::size_t i = 0; i < n; ++i) entries.push_back({i, i, 1});
    return from_entries(n, n, std::move(entries));
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nonzeros() const { return values_.size(); }

  /// Column indices and values of row r, ascending by column.
  std::pair<const std::size_t*, const std::int64_t*> row(std::size_t r) const {
    return {col_idx_.data() + row_ptr_[r], values_.data() + row_ptr_[r]};
  }
  std::size_t row_size(std::size_t r) const { return row_ptr_[r + 1] - row_ptr_[r]; }

  std::int64_t at(std::size_t r, std::size_t c) const {
    auto begin = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[r]);
    auto end = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[r + 1]);
    auto it = std::lower_bound(begin, end, c);
    if (it == end || *it != c) return 0;
    return values_[static_cast<std::size_t>(it - col_idx_.begin())];
  }

  std::vector<Entry> entries() const {
    std::vector<Entry> out;
    out.reserve(values_.size());
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) out.push_back({r, col_idx_[k], values_[k]});
    return out;
  }

  std::vector<std::vector<std::int64_t>> to_dense() const {
    std::vector<std::vector<std::int64_t>> d(rows_, std::vector<std::int64_t>(cols_, 0));
    for (const auto& e : entries()) d[e.row][e.col] = e.value;
    return d;
  }

  /// Principal submatrix on the given (sorted, distinct) index set.
  SparseIntMatrix principal_submatrix(const std::vector<std::size_t>& keep) const {
    std::vector<std::size_t> position(std::max(rows_, cols_), SIZE_MAX);
    for (std::size_t i = 0; i < keep.size(); ++i) position[keep[i]] = i;
    std::vector<Entry> out;
    for (std::size_t i = 0; i < keep.size(); ++i) {
      auto [cols, vals] = row(keep[i]);
      for (std::size_t k = 0; k < row_size(keep[i]); ++k)
        if (position[cols[k]] != SIZE_MAX) out.push_back({i, position[cols[k]], vals[k]});
    }
    return from_entries(keep.size(), keep.size(), std::move(out));
  }

  /// Largest absolute row sum (the induced infinity norm).
  std::int64_t max_abs_row_sum() const {
    std::int64_t best = 0;
    for (std::size_t r = 0; r < rows_; ++r) {
      std::int64_t s = 0;
      for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) s += values_[k] < 0 ? -values_[k] : values_[k];
      best = std::max(best, s);
    }
    return best;
  }

  RationalMatrix to_rational() const {
    RationalMatrix m(rows_, cols_);
    for (const auto& e : entries()) m(e.row, e.col) = BigRational(static_cast<long>(e.value));
    return m;
  }

  friend bool operator==(const SparseIntMatrix& a, const SparseIntMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.row_ptr_ == b.row_ptr_ && a.col_idx_ == b.col_idx_ &&
           a.values_ == b.values_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::size_t> col_idx_;
  std::vector<std::int64_t> values_;
};

/// Product of two sparse integer matrices; throws on int64 overflow.
inline SparseIntMatrix multiply(const SparseIntMatrix& a, const SparseIntMatrix& b) {
  if (a.cols() != b.rows()) throw Error(ErrorKind::DimensionMismatch, "matrix product shape mismatch");
  std::vector<SparseIntMatrix::Entry> out;
  std::vector<std::int64_t> acc(b.cols(), 0);
  std::vector<std::size_t> touched;
  for (std::size_t r = 0; r < a.rows(); ++r) {
    auto [acols, avals] = a.row(r);
    for (std::size_t i = 0; i < a.row_size(r); ++i) {
      auto [bcols, bvals] = b.row(acols[i]);
      for (std::size_t j = 0; j < b.row_size(acols[i]); ++j) {
        std::int64_t prod = 0;
        if (__builtin_mul_overflow(avals[i], bvals[j], &prod) ||
            __builtin_add_overflow(acc[bcols[j]], prod, &acc[bcols[j]]))
          throw Error(ErrorKind::Internal, "integer overflow in sparse product");
        touched.push_back(bcols[j]);
      }
    }
    std::sort(touched.begin(), touched.end());
    touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
    for (std::size_t c : touched) {
      if (acc[c] != 0) out.push_back({r, c, acc[c]});
      acc[c] = 0;
    }
    touched.clear();
  }
  return SparseIntMatrix::from_entries(a.rows(), b.cols(), std::move(out));
}

}  // namespace l2hecke
