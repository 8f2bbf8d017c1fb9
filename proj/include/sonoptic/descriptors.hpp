#pragma once

#include <Eigen/Core>
#include <array>
#include <utility>

#include "sonoptic/image.hpp"
#include "sonoptic/region.hpp"

namespace sonoptic {

constexpr int kProfileSamples = 180;   // 1 degree steps over [0, 180)
constexpr int kWaveletScales = 32;     // dyadic grid 2^(k/4), k = 0..31
constexpr int kCurvatureOrder = 3;     // polynomial order of the highlight fit
constexpr int kFeatureLength = 9;

/// Normalized orientation sum over the angle grid 0..179 degrees; the
/// maximum value is exactly 1.
struct OrientationProfile {
    std::array<double, kProfileSamples> values;
};

struct MorletParams {
    double bandwidth = 1.5;          // sigma_b
    double central_frequency = 1.0;  // omega_0
};

/// Wavelet coefficient matrix of an orientation profile plus the skewness
/// of its scale- and translation-axis marginals.
struct WaveletFeatures {
    double skew_scale;
    double skew_translation;
    Eigen::MatrixXd coefficients;  // kWaveletScales x kProfileSamples
};

/// Fixed-length per-image descriptor. hc always has unit Euclidean norm.
struct FeatureVector {
    double theta_max_deg = 0.0;
    double theta_min_deg = 0.0;
    double skew_scale = 0.0;
    double skew_translation = 0.0;
    double hso_deg = 90.0;
    std::array<double, kCurvatureOrder + 1> hc{1.0, 0.0, 0.0, 0.0};

    Eigen::Matrix<double, kFeatureLength, 1> to_vector() const;
    static FeatureVector from_vector(const Eigen::Matrix<double, kFeatureLength, 1>& v);
};

struct ExtractedFeatures {
    FeatureVector features;
    bool shadow_missing = false;
};

/// Count of shadow pixels on the digital line of orientation theta through
/// the shadow centroid. A cell belongs to the line iff the perpendicular
/// distance from its center to the infinite line is < 0.5 cells.
double orientation_sum(const BinaryGrid& shadow, double theta_deg);

OrientationProfile orientation_profile(const BinaryGrid& shadow);

/// (theta_max, theta_min): smallest angles attaining the profile's maximum
/// and minimum.
std::pair<double, double> extremal_angles(const OrientationProfile& profile);

/// Morlet wavelet psi_{a,b}(t) =
///   (1/sqrt(sigma_b * a)) * exp(-0.5 ((t-b)/a)^2) * cos(2 pi omega_0 (t-b)/a).
double morlet(double t, double scale, double translation, const MorletParams& params = {});

WaveletFeatures wavelet_features(const OrientationProfile& profile,
                                 const MorletParams& params = {});

/// |theta_s - theta_h| folded to [0, 90]; isotropy-flagged inputs return 90
/// (symmetric-object convention).
double hso(const Orientation& theta_shadow, const Orientation& theta_highlight);

/// Unit-norm coefficients of the degree-`order` polynomial least-squares
/// fit of the highlight's left boundary, x(y), over the normalized row
/// coordinate y' in [0,1]. Sign-canonicalized: first nonzero coefficient
/// is non-negative.
Eigen::VectorXd highlight_curvature(const BinaryGrid& highlight, int order = kCurvatureOrder);

/// Assembles the full 9-component feature vector. An empty shadow yields
/// the fill convention (theta_max = theta_min = 0, skews 0, HSO 90) with
/// shadow_missing set.
ExtractedFeatures extract_features(const BinaryGrid& highlight, const BinaryGrid& shadow,
                                   const MorletParams& params = {});

}  // namespace sonoptic
