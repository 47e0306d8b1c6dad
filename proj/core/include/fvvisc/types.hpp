#pragma once

#include <cstdint>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace fvvisc {

using Index = std::int32_t;

inline constexpr Index kNoNeighbor = -1;

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Five-component vector: a primitive state (rho, u, v, w, T), a flux, or a residual.
using Vec5 = Eigen::Matrix<double, 5, 1>;
using Mat5 = Eigen::Matrix<double, 5, 5>;

/// Spatial gradient of all five primitive variables; column v holds grad(w_v).
using StateGradient = Eigen::Matrix<double, 3, 5>;

namespace var {
inline constexpr int kDensity = 0;
inline constexpr int kVelocityX = 1;
inline constexpr int kVelocityY = 2;
inline constexpr int kVelocityZ = 3;
inline constexpr int kTemperature = 4;
}  // namespace var

}  // namespace fvvisc
