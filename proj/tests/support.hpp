#pragma once

#include <random>

#include "maisac/common.hpp"

namespace maisac::testing {

// Box-Muller on the fixed 53-bit mapping, so draws are identical everywhere.
class Gaussian {
 public:
  explicit Gaussian(std::uint64_t seed) : gen_(seed) {}

  double real() {
    const double u1 = 1.0 - unit_uniform(gen_);
    const double u2 = unit_uniform(gen_);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * unit_uniform(gen_); }
  Complex complex() { return {real() / std::sqrt(2.0), real() / std::sqrt(2.0)}; }

  CMatrix matrix(int rows, int cols) {
    CMatrix m(rows, cols);
    for (int j = 0; j < cols; ++j)
      for (int i = 0; i < rows; ++i) m(i, j) = complex();
    return m;
  }
  CVector vector(int n) { return matrix(n, 1).col(0); }
  CVector unit_vector(int n) {
    const CVector v = vector(n);
    return v / v.norm();
  }
  CMatrix hermitian(int n) {
    const CMatrix a = matrix(n, n);
    return 0.5 * (a + a.adjoint());
  }
  CMatrix positive_definite(int n, double floor = 0.1) {
    const CMatrix a = matrix(n, n);
    return a * a.adjoint() + floor * CMatrix::Identity(n, n);
  }
  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

inline double relative_error(const CMatrix& a, const CMatrix& b) {
  const double scale = std::max(a.norm(), b.norm());
  return scale == 0.0 ? 0.0 : (a - b).norm() / scale;
}

}  // namespace maisac::testing
