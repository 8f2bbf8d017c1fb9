#include "sonoptic/region.hpp"

#include <cmath>
#include <numbers>

namespace sonoptic {
namespace {

constexpr double kIsotropyRatio = 0.02;

const char* region_name(RegionLabel label) {
    switch (label) {
        case RegionLabel::Background: return "Background";
        case RegionLabel::Highlight: return "Highlight";
        case RegionLabel::Shadow: return "Shadow";
    }
    return "?";
}

}  // namespace

double fold_axial_deg(double angle_deg) {
    double r = std::fmod(angle_deg, 180.0);
    if (r < 0.0) r += 180.0;
    return r == 180.0 ? 0.0 : r;
}

double fold_signed_90_deg(double angle_deg) {
    double r = std::fmod(angle_deg, 180.0);
    if (r > 90.0) r -= 180.0;
    if (r <= -90.0) r += 180.0;
    return r;
}

double fold_hso_deg(double angle_deg) {
    const double r = fold_axial_deg(std::abs(angle_deg));
    return r > 90.0 ? 180.0 - r : r;
}

RegionStats region_stats(const BinaryGrid& region) {
    double sum_x = 0.0, sum_y = 0.0;
    std::int64_t n = 0;
    for (int y = 0; y < region.height(); ++y) {
        for (int x = 0; x < region.width(); ++x) {
            if (!region.at(x, y)) continue;
            sum_x += x;
            sum_y += y;
            ++n;
        }
    }
    if (n == 0) throw EmptyRegion("region has no pixels");

    const double mu_x = sum_x / n;
    const double mu_y = sum_y / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (int y = 0; y < region.height(); ++y) {
        for (int x = 0; x < region.width(); ++x) {
            if (!region.at(x, y)) continue;
            const double dx = x - mu_x;
            const double dy = y - mu_y;
            sxx += dx * dx;
            sxy += dx * dy;
            syy += dy * dy;
        }
    }
    RegionStats stats;
    stats.centroid = Eigen::Vector2d(mu_x, mu_y);
    stats.covariance << sxx / n, sxy / n, sxy / n, syy / n;
    stats.pixel_count = n;
    return stats;
}

RegionStats region_stats(const SegmentationMap& seg, RegionLabel region) {
    if (seg.count(region) == 0) {
        throw EmptyRegion(std::string(region_name(region)) + " region is empty");
    }
    return region_stats(seg.mask(region));
}

Orientation orientation_of(const RegionStats& stats) {
    const double a = stats.covariance(0, 0);
    const double b = stats.covariance(0, 1);
    const double c = stats.covariance(1, 1);

    // Closed-form eigenvalues of the 2x2 symmetric matrix.
    const double half_trace = 0.5 * (a + c);
    const double disc = std::hypot(0.5 * (a - c), b);
    const double eig_major = half_trace + disc;
    const double eig_minor = std::max(half_trace - disc, 0.0);

    Orientation out;
    out.major_eigenvalue = eig_major;
    out.minor_eigenvalue = eig_minor;
    out.isotropy_flag = (eig_major - eig_minor) < kIsotropyRatio * std::max(eig_major, 1e-12);
    if (out.isotropy_flag) {
        out.angle_deg = 0.0;  // arbitrary axis; flag tells consumers to skip rotation
        return out;
    }

    // Major eigenvector: (b, lambda - a) and (lambda - c, b) are both valid;
    // pick the larger for stability.
    Eigen::Vector2d v1(b, eig_major - a);
    Eigen::Vector2d v2(eig_major - c, b);
    const Eigen::Vector2d v = v1.squaredNorm() >= v2.squaredNorm() ? v1 : v2;

    // Image y grows downward; angles are reported with y negated so that a
    // mathematically counter-clockwise rotation increases the angle.
    const double rad = std::atan2(-v.y(), v.x());
    out.angle_deg = fold_axial_deg(rad * 180.0 / std::numbers::pi);
    return out;
}

}  // namespace sonoptic
