#pragma once

#include <Eigen/Dense>

namespace trajlab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using VecCRef = Eigen::Ref<const Eigen::VectorXd>;
using MatCRef = Eigen::Ref<const Eigen::MatrixXd>;

}  // namespace trajlab
