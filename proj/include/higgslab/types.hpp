#pragma once
#include <Eigen/Dense>
#include <complex>

namespace higgslab {

using cplx = std::complex<double>;
using Mat5 = Eigen::Matrix<double, 5, 5>;
using Vec5 = Eigen::Matrix<double, 5, 1>;
using CMat5 = Eigen::Matrix<cplx, 5, 5>;
using CVec5 = Eigen::Matrix<cplx, 5, 1>;

}  // namespace higgslab
