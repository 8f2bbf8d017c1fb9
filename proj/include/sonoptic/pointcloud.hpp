#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <vector>

namespace sonoptic {

/// 3D points in pixel-grid units; z >= 0 is height above the seabed.
struct PointCloud {
    std::vector<Eigen::Vector3d> points;

    bool empty() const noexcept { return points.empty(); }
    std::size_t size() const noexcept { return points.size(); }
};

}  // namespace sonoptic
