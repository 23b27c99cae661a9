#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace sspde {

/// Square matrix in compressed-row form. Column indices are sorted within each row; entries that
/// are not stored are exactly zero.
class SparseRows {
 public:
  SparseRows() = default;

  /// Builds from per-row (column, value) lists; columns are sorted and must be unique.
  static SparseRows from_rows(std::size_t n, std::vector<std::vector<std::pair<std::size_t, double>>> rows) {
    if (rows.size() != n) rows.resize(n);
    SparseRows m;
    m.n_ = n;
    m.row_ptr_.assign(1, 0);
    m.row_ptr_.reserve(n + 1);
    for (auto& row : rows) {
      std::sort(row.begin(), row.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
      for (const auto& [col, value] : row) {
        m.cols_.push_back(col);
        m.values_.push_back(value);
      }
      m.row_ptr_.push_back(m.cols_.size());
    }
    return m;
  }

  static SparseRows dense(std::size_t n, const std::vector<double>& row_major) {
    std::vector<std::vector<std::pair<std::size_t, double>>> rows(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) rows[i].emplace_back(j, row_major[i * n + j]);
    }
    return from_rows(n, std::move(rows));
  }

  std::size_t size() const noexcept { return n_; }
  std::size_t nonzeros() const noexcept { return values_.size(); }

  std::span<const std::size_t> row_cols(std::size_t i) const {
    return {cols_.data() + row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]};
  }
  std::span<const double> row_values(std::size_t i) const {
    return {values_.data() + row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]};
  }

  double at(std::size_t i, std::size_t j) const {
    const auto cols = row_cols(i);
    const auto it = std::lower_bound(cols.begin(), cols.end(), j);
    if (it == cols.end() || *it != j) return 0.0;
    return values_[row_ptr_[i] + static_cast<std::size_t>(it - cols.begin())];
  }

  /// Largest number of stored entries in a row.
  std::size_t max_row_length() const {
    std::size_t len = 0;
    for (std::size_t i = 0; i < n_; ++i) len = std::max(len, row_ptr_[i + 1] - row_ptr_[i]);
    return len;
  }

  void scale(double s) {
    for (double& v : values_) v *= s;
  }

 private:
  std::size_t n_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::size_t> cols_;
  std::vector<double> values_;
};

}  // namespace sspde
