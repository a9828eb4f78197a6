#include "nncp/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nncp/errors.hpp"

namespace nncp {

namespace {

// Below this many multiply-adds the OpenMP fork costs more than it saves.
constexpr std::size_t kParallelMatmulWork = 1u << 18;

void check_matmul_shapes(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: inner dimensions disagree (" +
                     std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                     " * " + std::to_string(b.rows()) + "x" +
                     std::to_string(b.cols()) + ")");
  }
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw ShapeError("Matrix: data length must equal rows * cols");
  }
}

void Matrix::fill(double value) {
  std::fill(data_.begin(), data_.end(), value);
}

bool Matrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](double v) { return std::isfinite(v); });
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  check_matmul_shapes(a, b);
  Matrix out(a.rows(), b.cols());
  const std::size_t rows = a.rows();
  const std::size_t inner = a.cols();
  const std::size_t cols = b.cols();
  const std::size_t work = rows * inner * cols;

  // Each output row is independent; within a row every element accumulates
  // in ascending k, so the result matches the serial reference bit for bit.
#pragma omp parallel for schedule(static) if (work >= kParallelMatmulWork)
  for (long long ri = 0; ri < static_cast<long long>(rows); ++ri) {
    const auto i = static_cast<std::size_t>(ri);
    double* out_row = out.row(i);
    const double* a_row = a.row(i);
    for (std::size_t k = 0; k < inner; ++k) {
      const double aik = a_row[k];
      const double* b_row = b.row(k);
      for (std::size_t j = 0; j < cols; ++j) {
        out_row[j] += aik * b_row[j];
      }
    }
  }
  return out;
}

namespace reference {

Matrix matmul(const Matrix& a, const Matrix& b) {
  check_matmul_shapes(a, b);
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double* a_row = a.row(i);
    double* out_row = out.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a_row[k];
      const double* b_row = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) {
        out_row[j] += aik * b_row[j];
      }
    }
  }
  return out;
}

}  // namespace reference

Matrix relu(const Matrix& m) {
  Matrix out(m.rows(), m.cols());
  const double* src = m.data();
  double* dst = out.data();
  for (std::size_t i = 0; i < m.size(); ++i) {
    dst[i] = src[i] > 0.0 ? src[i] : 0.0;
  }
  return out;
}

Matrix transpose(const Matrix& m) {
  Matrix out(m.cols(), m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      out(j, i) = m(i, j);
    }
  }
  return out;
}

Matrix sample_uniform(Rng& rng, double lo, double hi, std::size_t rows,
                      std::size_t cols) {
  if (!(lo < hi)) {
    throw ArgumentError("sample_uniform: lo must be < hi");
  }
  Matrix out(rows, cols);
  double* dst = out.data();
  for (std::size_t i = 0; i < out.size(); ++i) {
    dst[i] = rng.uniform(lo, hi);
  }
  return out;
}

Matrix sample_gaussian(Rng& rng, std::size_t rows, std::size_t cols) {
  Matrix out(rows, cols);
  double* dst = out.data();
  for (std::size_t i = 0; i < out.size(); ++i) {
    dst[i] = rng.normal();
  }
  return out;
}

Matrix random_orthogonal(Rng& rng, std::size_t n) {
  Matrix q = sample_gaussian(rng, n, n);
  // Modified Gram-Schmidt over columns. R's diagonal is the column norm,
  // hence positive, which fixes the sign convention.
  for (std::size_t j = 0; j < n; ++j) {
    while (true) {
      for (std::size_t prev = 0; prev < j; ++prev) {
        double dot = 0.0;
        for (std::size_t i = 0; i < n; ++i) dot += q(i, prev) * q(i, j);
        for (std::size_t i = 0; i < n; ++i) q(i, j) -= dot * q(i, prev);
      }
      double norm_sq = 0.0;
      for (std::size_t i = 0; i < n; ++i) norm_sq += q(i, j) * q(i, j);
      if (norm_sq > 1e-24) {
        const double inv = 1.0 / std::sqrt(norm_sq);
        for (std::size_t i = 0; i < n; ++i) q(i, j) *= inv;
        break;
      }
      // Degenerate column (astronomically unlikely): redraw and retry.
      for (std::size_t i = 0; i < n; ++i) q(i, j) = rng.normal();
    }
  }
  return q;
}

void matvec(const Matrix& w, const double* x, double* y) {
  const std::size_t rows = w.rows();
  const std::size_t cols = w.cols();
  for (std::size_t i = 0; i < rows; ++i) {
    const double* w_row = w.row(i);
    double acc = 0.0;
    for (std::size_t j = 0; j < cols; ++j) acc += w_row[j] * x[j];
    y[i] = acc;
  }
}

void matvec_transpose_add(const Matrix& w, const double* dy, double* dx) {
  const std::size_t rows = w.rows();
  const std::size_t cols = w.cols();
  for (std::size_t i = 0; i < rows; ++i) {
    const double* w_row = w.row(i);
    const double dyi = dy[i];
    for (std::size_t j = 0; j < cols; ++j) dx[j] += w_row[j] * dyi;
  }
}

void outer_add(Matrix& g, const double* a, const double* b) {
  const std::size_t rows = g.rows();
  const std::size_t cols = g.cols();
  for (std::size_t i = 0; i < rows; ++i) {
    double* g_row = g.row(i);
    const double ai = a[i];
    for (std::size_t j = 0; j < cols; ++j) g_row[j] += ai * b[j];
  }
}

}  // namespace nncp
