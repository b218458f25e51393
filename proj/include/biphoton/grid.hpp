#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>

namespace biphoton {

// Row-major throughout: index (row = y, col = x), matching the on-disk
// frame layout and the (δy, δx) lag-grid layout.
using GridD = Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using GridC =
    Eigen::Array<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using GridU16 =
    Eigen::Array<std::uint16_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using GridI = Eigen::Array<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using Vec2 = Eigen::Vector2d;

}  // namespace biphoton
