#include "dataagent/matrix.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace da {

bool operator==(const Matrix& a, const Matrix& b) {
  return a.rows == b.rows && a.cols == b.cols && a.data == b.data;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b_t) {
  if (a.cols != b_t.cols) {
    throw std::invalid_argument("matmul_nt: inner dims differ (" + std::to_string(a.cols) +
                                " vs " + std::to_string(b_t.cols) + ")");
  }
  Matrix out(a.rows, b_t.rows);
  for (std::size_t i = 0; i < a.rows; ++i) {
    const double* ai = a.row(i);
    double* oi = out.row(i);
    for (std::size_t j = 0; j < b_t.rows; ++j) {
      const double* bj = b_t.row(j);
      double acc = 0.0;
      for (std::size_t k = 0; k < a.cols; ++k) acc += ai[k] * bj[k];
      oi[j] = acc;
    }
  }
  return out;
}

bool all_finite(const Matrix& m) { return all_finite(m.data); }

bool all_finite(const std::vector<double>& v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

void require_finite(const Matrix& m, const char* what) {
  if (!all_finite(m)) {
    throw std::runtime_error(std::string(what) + ": non-finite entry");
  }
}

}  // namespace da
