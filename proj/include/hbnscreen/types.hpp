#pragma once

#include <complex>
#include <Eigen/Dense>

namespace hbn {

using Real = double;
using Complex = std::complex<double>;
using Vec2 = Eigen::Vector2d;
using VectorX = Eigen::VectorXd;
using MatrixX = Eigen::MatrixXd;
using MatrixXc = Eigen::MatrixXcd;

// hc in eV*nm, used for every energy <-> wavelength conversion.
inline constexpr double kEvNm = 1239.84193;

inline constexpr const char* kVersion = "hbnscreen 0.1.0";

} // namespace hbn
