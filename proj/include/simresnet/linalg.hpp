#pragma once

#include <cstddef>
#include <vector>

namespace simresnet {

using Vec = std::vector<double>;

// Dense row-major matrix. Sizes here are tiny (N <= 12), so no BLAS.
struct Mat {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Mat() = default;
  Mat(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  bool same_shape(const Mat& other) const {
    return rows == other.rows && cols == other.cols;
  }
};

// out = scale * (A x) + y
inline void matvec_scaled_add(const Mat& a, const Vec& x, double scale,
                              const Vec& y, Vec& out) {
  for (std::size_t i = 0; i < a.rows; ++i) {
    double acc = 0.0;
    const double* row = &a.data[i * a.cols];
    for (std::size_t j = 0; j < a.cols; ++j) acc += row[j] * x[j];
    out[i] = scale * acc + y[i];
  }
}

inline double dot(const Vec& a, const Vec& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

}  // namespace simresnet
