#pragma once

#include <Eigen/Dense>

namespace srl {

// Row-major so that a sequence of token vectors is a contiguous n x d block.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowVector = Eigen::Matrix<double, 1, Eigen::Dynamic>;

}  // namespace srl
