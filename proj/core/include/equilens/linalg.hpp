#pragma once

#include <Eigen/Core>

namespace equilens {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

}  // namespace equilens
