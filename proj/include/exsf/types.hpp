#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace exsf {

using cdouble = std::complex<double>;

/// Point in R^3, meters.
using Position3 = Eigen::Vector3d;
using PositionList = std::vector<Position3>;

using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;

}  // namespace exsf
