#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <vector>

#include "sonoptic/image.hpp"
#include "sonoptic/pointcloud.hpp"
#include "sonoptic/region.hpp"

namespace sonoptic {

/// Highlight orientations of the paired images and the rotation that takes
/// the optical object onto the SAS object's orientation.
struct AlignmentParams {
    double theta_sas_deg;
    double theta_opt_deg;
    double delta_deg;  // folded to (-90, 90]
};

/// Binary highlight/shadow maps in the SAS pixel frame; the two sets are
/// always disjoint.
struct SyntheticSasMaps {
    BinaryGrid highlight;
    BinaryGrid shadow;
};

// Flip-radius margin of the hidden-point-removal operator.
constexpr double kHprFlipMargin = 1.1;

/// Simplified height recovery: one point per highlight pixel, z rescaled
/// min-max from intensity to [0, height_scale]; uniform-intensity regions
/// map to a flat plateau at height_scale / 2. The cloud's (x, y) centroid
/// is moved to the origin. height_scale is in the caller's length unit
/// (pass height_m / pixel_spacing_m to get pixel units).
PointCloud shape_from_shading(const RoiImage& roi, const SegmentationMap& seg,
                              double height_scale);

AlignmentParams compute_alignment(const SegmentationMap& sas_seg,
                                  const SegmentationMap& opt_seg);

/// Rotates each point about the z-axis by delta:
/// (x cos d + y sin d, -x sin d + y cos d, z). An isometry.
PointCloud align_cloud(const PointCloud& cloud, const AlignmentParams& params);

/// Translates each point by the SAS highlight centroid (mu_x, mu_y, 0).
PointCloud position_cloud(const PointCloud& cloud, const RegionStats& sas_highlight_stats);

/// Hidden point removal by spherical flipping + convex hull membership.
/// Degenerate clouds (too small, coplanar) fall back to all-visible.
PointCloud hpr_visible(const PointCloud& cloud, const Eigen::Vector3d& viewpoint);
std::vector<std::size_t> hpr_visible_indices(const PointCloud& cloud,
                                             const Eigen::Vector3d& viewpoint);

/// Renders a positioned cloud into binary SAS maps. Highlight cells hold at
/// least one sensor-visible point; each visible point at ground range r and
/// height h casts shadow over ranges (r, r + h*r/(A-h)] in its along-track
/// column. Throws ObjectAboveSensor when any point reaches the sensor
/// altitude.
SyntheticSasMaps render_sas_maps(const PointCloud& cloud, const SensorGeometry& geom,
                                 int out_width, int out_height);

/// Full optic-to-SAS chain for one pair: height recovery, alignment,
/// positioning, rendering at the SAS ROI dimensions.
SyntheticSasMaps transform_pair(const ImagePair& pair, double height_scale_m);

SegmentationMap maps_to_segmentation(const SyntheticSasMaps& maps);

}  // namespace sonoptic
