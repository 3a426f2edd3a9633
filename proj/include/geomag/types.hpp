#ifndef GEOMAG_TYPES_HPP
#define GEOMAG_TYPES_HPP

#include <complex>

#include <Eigen/Dense>

namespace geomag {

using Vec3 = Eigen::Vector3d;
using CVec3 = Eigen::Vector3cd;
using Mat3 = Eigen::Matrix3d;
using CMat3 = Eigen::Matrix3cd;
using Complex = std::complex<double>;

} // namespace geomag

#endif
