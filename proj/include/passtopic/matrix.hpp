#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace passtopic {

// Dense row-major matrix of doubles. Small on purpose: the corpora here are a
// few dozen rows by a few hundred columns.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  std::vector<double> column(std::size_t c) const;

  const std::vector<double>& data() const { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix multiply(const Matrix& a, const Matrix& b);
// aᵀ·b and a·bᵀ without materialising the transpose.
Matrix multiply_at_b(const Matrix& a, const Matrix& b);
Matrix multiply_a_bt(const Matrix& a, const Matrix& b);

double frobenius_norm(const Matrix& a);
// ‖a − b·c‖_F
double residual_norm(const Matrix& a, const Matrix& b, const Matrix& c);

}  // namespace passtopic
