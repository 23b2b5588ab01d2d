#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <vector>

namespace rcbench {

/// Row-major so that each sample is a contiguous span for the SIMD kernels.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

using Label = int;
using Labels = std::vector<Label>;
using IndexList = std::vector<std::size_t>;

}  // namespace rcbench
