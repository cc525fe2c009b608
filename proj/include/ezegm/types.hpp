#pragma once

#include <Eigen/Dense>

namespace ezegm {

using Index = Eigen::Index;

template <class Scalar>
using ArrayX = Eigen::Array<Scalar, Eigen::Dynamic, 1>;
template <class Scalar>
using ArrayXX = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <class Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <class Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using ArrayXd = ArrayX<double>;
using ArrayXXd = ArrayXX<double>;
using MatrixXd = MatrixX<double>;
using VectorXd = VectorX<double>;

}  // namespace ezegm
