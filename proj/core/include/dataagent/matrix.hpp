#pragma once

#include <cstddef>
#include <vector>

namespace da {

// Dense row-major 2-D array of doubles. The universal numeric carrier for
// features, logits, probabilities and network parameters.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;  // rows * cols, row-major

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  double* row(std::size_t r) { return data.data() + r * cols; }
  const double* row(std::size_t r) const { return data.data() + r * cols; }

  bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }

  void fill(double v) { std::fill(data.begin(), data.end(), v); }
};

bool operator==(const Matrix& a, const Matrix& b);

// out[i][j] = sum_k a[i][k] * b_t[j][k]   (a: N x K, b_t: M x K -> N x M)
Matrix matmul_nt(const Matrix& a, const Matrix& b_t);

// true iff every entry is finite
bool all_finite(const Matrix& m);
bool all_finite(const std::vector<double>& v);

// throws std::runtime_error if any entry is non-finite; `what` names the op
void require_finite(const Matrix& m, const char* what);

}  // namespace da
