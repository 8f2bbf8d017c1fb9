#pragma once

#include <Eigen/Core>
#include <cstdint>

#include "sonoptic/image.hpp"

namespace sonoptic {

/// Second-moment statistics of a labeled pixel region. The covariance is
/// the population covariance (divide by pixel count) of pixel coordinates.
struct RegionStats {
    Eigen::Vector2d centroid;     // (mu_x, mu_y), pixel coordinates
    Eigen::Matrix2d covariance;   // symmetric PSD, pixel^2
    std::int64_t pixel_count;
};

/// Principal-axis orientation of a region. Angles follow the right-handed
/// mathematical convention (image y negated) and are folded to [0, 180).
/// Near-equal eigenvalues set isotropy_flag and force angle_deg to 0;
/// consumers treat flagged orientations as "no rotation correction".
struct Orientation {
    double angle_deg;
    double major_eigenvalue;
    double minor_eigenvalue;
    bool isotropy_flag;
};

RegionStats region_stats(const BinaryGrid& region);
RegionStats region_stats(const SegmentationMap& seg, RegionLabel region);

Orientation orientation_of(const RegionStats& stats);

// Angle folding helpers. Axial angles are 180-degree periodic.
double fold_axial_deg(double angle_deg);        // -> [0, 180)
double fold_signed_90_deg(double angle_deg);    // -> (-90, 90]
double fold_hso_deg(double angle_deg);          // -> [0, 90]

}  // namespace sonoptic
