#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "nncp/rng.hpp"

namespace nncp {

/// Dense row-major matrix of doubles. The only storage type used for model
/// parameters, gradients, and GMM statistics.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(std::size_t r, std::size_t c) {
    return data_[r * cols_ + c];
  }
  double operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  double* row(std::size_t r) { return data_.data() + r * cols_; }
  const double* row(std::size_t r) const { return data_.data() + r * cols_; }

  std::span<const double> values() const { return data_; }
  std::span<double> values() { return data_; }

  void fill(double value);
  bool all_finite() const;

  bool operator==(const Matrix& other) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Matrix product. Parallelized over output rows with OpenMP when the
/// operand sizes make it worthwhile; bit-identical to reference::matmul
/// because each output element accumulates in the same k-order either way.
Matrix matmul(const Matrix& a, const Matrix& b);

/// Elementwise max(0, x).
Matrix relu(const Matrix& m);

Matrix transpose(const Matrix& m);

/// Entries i.i.d. uniform in [lo, hi), filled in row-major draw order.
Matrix sample_uniform(Rng& rng, double lo, double hi, std::size_t rows,
                      std::size_t cols);

/// Entries i.i.d. standard normal, row-major draw order.
Matrix sample_gaussian(Rng& rng, std::size_t rows, std::size_t cols);

/// Orthogonal matrix from the QR factorization (modified Gram-Schmidt,
/// positive R diagonal) of a fresh Gaussian draw.
Matrix random_orthogonal(Rng& rng, std::size_t n);

namespace reference {
/// Plain triple-loop product kept as the serial oracle for the OpenMP
/// kernel; exercised by tests and by the benchmark target.
Matrix matmul(const Matrix& a, const Matrix& b);
}  // namespace reference

// Serial kernels for the recurrence hot loops. These run inside regions that
// are already parallel over papers, so they stay single-threaded.

/// y = w * x, with w of shape (rows x cols), x of length cols.
void matvec(const Matrix& w, const double* x, double* y);

/// dx += w^T * dy, with dy of length rows, dx of length cols.
void matvec_transpose_add(const Matrix& w, const double* dy, double* dx);

/// g += a * b^T, with a of length g.rows(), b of length g.cols().
void outer_add(Matrix& g, const double* a, const double* b);

}  // namespace nncp
