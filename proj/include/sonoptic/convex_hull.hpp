#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <optional>
#include <vector>

namespace sonoptic {

/// Indices of the input points that are vertices of their 3D convex hull
/// (quickhull). Returns nullopt when the input is degenerate: fewer than
/// four points, or all points collinear/coplanar within tolerance.
std::optional<std::vector<std::size_t>> convex_hull_vertices(
    const std::vector<Eigen::Vector3d>& points);

}  // namespace sonoptic
