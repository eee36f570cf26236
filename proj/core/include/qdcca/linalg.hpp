#pragma once

#include <complex>

#include <Eigen/Dense>

namespace qdcca {

using Real = double;
using Complex = std::complex<double>;

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

}  // namespace qdcca
