#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "commex/rng.hpp"

namespace commex {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Uniform in +-sqrt(6 / (rows + cols)), drawn row-major from `rng`.
Matrix glorot_uniform(Eigen::Index rows, Eigen::Index cols, Rng& rng);

bool all_finite(const Matrix& m);

}  // namespace commex
