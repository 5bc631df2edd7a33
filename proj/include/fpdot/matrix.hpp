#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fpdot/errors.hpp"
#include "fpdot/numeric.hpp"

namespace fpdot {

/// Dense row-major matrix of doubles. Desk-scale: no sparse storage.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  /// Builds from nested rows; rejects ragged input.
  static Matrix from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw DimensionMismatch("matrix needs at least one row");
    Matrix m(rows.size(), rows[0].size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != m.cols_) {
        throw DimensionMismatch("row " + std::to_string(i) + " has length " +
                                std::to_string(rows[i].size()) + ", expected " +
                                std::to_string(m.cols_));
      }
      for (std::size_t j = 0; j < m.cols_; ++j) m(i, j) = rows[i][j];
    }
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> flat() { return data_; }
  std::span<const double> flat() const { return data_; }

  bool same_shape(const Matrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  double total() const { return kahan_sum(flat()); }

  std::vector<double> row_sums() const {
    std::vector<double> out(rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      out[i] = kahan_sum(std::span<const double>(&data_[i * cols_], cols_));
    return out;
  }

  std::vector<double> col_sums() const {
    std::vector<double> out(cols_, 0.0);
    std::vector<double> carry(cols_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i) {
      for (std::size_t j = 0; j < cols_; ++j) {
        double y = data_[i * cols_ + j] - carry[j];
        double t = out[j] + y;
        carry[j] = (t - out[j]) - y;
        out[j] = t;
      }
    }
    return out;
  }

  Matrix transposed() const {
    Matrix out(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
    return out;
  }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> data_;
};

/// Elementwise max |a - b|; shapes must agree.
inline double max_abs_difference(const Matrix& a, const Matrix& b) {
  if (!a.same_shape(b)) throw DimensionMismatch("max_abs_difference: shapes differ");
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    double d = a.flat()[k] - b.flat()[k];
    if (d < 0) d = -d;
    if (d > worst) worst = d;
  }
  return worst;
}

}  // namespace fpdot
