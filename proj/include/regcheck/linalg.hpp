#pragma once

#include <Eigen/Dense>

namespace regcheck {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

}  // namespace regcheck
