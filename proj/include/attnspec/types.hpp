#pragma once

#include <Eigen/Dense>

namespace attnspec {

// Dense matrices are row-major double throughout; exported layouts and the
// sampling fill order both follow this convention.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

}  // namespace attnspec
