#pragma once

#include <Eigen/Dense>

namespace phdnet {

// State is [x, y, vx, vy]; measurements are 2D positions.
using Vec2 = Eigen::Vector2d;
using Vec4 = Eigen::Vector4d;
using Mat2 = Eigen::Matrix2d;
using Mat4 = Eigen::Matrix4d;
using Mat42 = Eigen::Matrix<double, 4, 2>;

using MeasurementSet = std::vector<Vec2>;

inline constexpr double kPi = 3.14159265358979323846;

}  // namespace phdnet
