#include "commex/tensor.hpp"

#include <cmath>

namespace commex {

Matrix glorot_uniform(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      m(i, j) = (2.0 * uniform01(rng) - 1.0) * limit;
    }
  }
  return m;
}

bool all_finite(const Matrix& m) { return m.allFinite(); }

}  // namespace commex
