#include "sonoptic/descriptors.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace sonoptic {

Eigen::Matrix<double, kFeatureLength, 1> FeatureVector::to_vector() const {
    Eigen::Matrix<double, kFeatureLength, 1> v;
    v << theta_max_deg, theta_min_deg, skew_scale, skew_translation, hso_deg, hc[0], hc[1],
        hc[2], hc[3];
    return v;
}

FeatureVector FeatureVector::from_vector(const Eigen::Matrix<double, kFeatureLength, 1>& v) {
    FeatureVector f;
    f.theta_max_deg = v(0);
    f.theta_min_deg = v(1);
    f.skew_scale = v(2);
    f.skew_translation = v(3);
    f.hso_deg = v(4);
    f.hc = {v(5), v(6), v(7), v(8)};
    return f;
}

double orientation_sum(const BinaryGrid& shadow, double theta_deg) {
    const RegionStats stats = region_stats(shadow);  // throws EmptyRegion when empty
    const double rad = theta_deg * std::numbers::pi / 180.0;
    // y negated: the digital line follows the reported angle convention.
    const double dx = std::cos(rad);
    const double dy = -std::sin(rad);
    std::int64_t count = 0;
    for (int y = 0; y < shadow.height(); ++y) {
        for (int x = 0; x < shadow.width(); ++x) {
            if (!shadow.at(x, y)) continue;
            const double px = x - stats.centroid.x();
            const double py = y - stats.centroid.y();
            if (std::abs(px * dy - py * dx) < 0.5) ++count;
        }
    }
    return static_cast<double>(count);
}

OrientationProfile orientation_profile(const BinaryGrid& shadow) {
    OrientationProfile profile{};
    double max_value = 0.0;
    for (int i = 0; i < kProfileSamples; ++i) {
        profile.values[i] = orientation_sum(shadow, static_cast<double>(i));
        max_value = std::max(max_value, profile.values[i]);
    }
    if (max_value <= 0.0) {
        throw EmptyShadow("orientation sum is identically zero");
    }
    for (double& v : profile.values) v /= max_value;
    return profile;
}

std::pair<double, double> extremal_angles(const OrientationProfile& profile) {
    int arg_max = 0, arg_min = 0;
    for (int i = 1; i < kProfileSamples; ++i) {
        if (profile.values[i] > profile.values[arg_max]) arg_max = i;
        if (profile.values[i] < profile.values[arg_min]) arg_min = i;
    }
    return {static_cast<double>(arg_max), static_cast<double>(arg_min)};
}

double morlet(double t, double scale, double translation, const MorletParams& params) {
    const double u = (t - translation) / scale;
    return 1.0 / std::sqrt(params.bandwidth * scale) * std::exp(-0.5 * u * u) *
           std::cos(2.0 * std::numbers::pi * params.central_frequency * u);
}

namespace {

double skewness(const Eigen::VectorXd& values) {
    const double n = static_cast<double>(values.size());
    const double mean = values.mean();
    double m2 = 0.0, m3 = 0.0;
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        const double d = values(i) - mean;
        m2 += d * d;
        m3 += d * d * d;
    }
    m2 /= n;
    m3 /= n;
    if (m2 <= 1e-300) return 0.0;
    return m3 / std::pow(m2, 1.5);
}

}  // namespace

WaveletFeatures wavelet_features(const OrientationProfile& profile, const MorletParams& params) {
    WaveletFeatures out;
    out.coefficients.resize(kWaveletScales, kProfileSamples);

    // The wavelet depends only on (t - b), so one table over the offset
    // range covers every (scale, translation) pair.
    constexpr int kOffsets = 2 * kProfileSamples - 1;
    std::vector<double> table(static_cast<std::size_t>(kWaveletScales) * kOffsets);
    for (int k = 0; k < kWaveletScales; ++k) {
        const double scale = std::pow(2.0, k / 4.0);
        for (int off = -(kProfileSamples - 1); off <= kProfileSamples - 1; ++off) {
            table[static_cast<std::size_t>(k) * kOffsets + (off + kProfileSamples - 1)] =
                morlet(static_cast<double>(off), scale, 0.0, params);
        }
    }
    for (int k = 0; k < kWaveletScales; ++k) {
        const double* row = table.data() + static_cast<std::size_t>(k) * kOffsets;
        for (int b = 0; b < kProfileSamples; ++b) {
            double acc = 0.0;
            for (int t = 0; t < kProfileSamples; ++t) {
                acc += profile.values[t] * row[t - b + kProfileSamples - 1];
            }
            out.coefficients(k, b) = acc;
        }
    }

    const Eigen::VectorXd scale_marginal = out.coefficients.rowwise().mean();
    const Eigen::VectorXd translation_marginal = out.coefficients.colwise().mean();
    out.skew_scale = skewness(scale_marginal);
    out.skew_translation = skewness(translation_marginal);
    return out;
}

double hso(const Orientation& theta_shadow, const Orientation& theta_highlight) {
    if (theta_shadow.isotropy_flag || theta_highlight.isotropy_flag) {
        return 90.0;  // symmetric-object convention
    }
    return fold_hso_deg(theta_shadow.angle_deg - theta_highlight.angle_deg);
}

Eigen::VectorXd highlight_curvature(const BinaryGrid& highlight, int order) {
    if (order < 0) throw InvalidArgument("polynomial order must be non-negative");

    // Left boundary: leftmost highlight column per occupied row.
    std::vector<int> rows;
    std::vector<int> left_col;
    for (int y = 0; y < highlight.height(); ++y) {
        for (int x = 0; x < highlight.width(); ++x) {
            if (highlight.at(x, y)) {
                rows.push_back(y);
                left_col.push_back(x);
                break;
            }
        }
    }
    if (rows.empty()) throw EmptyHighlight("no highlight pixels to fit");
    const int n = static_cast<int>(rows.size());
    if (n < order + 1) {
        throw RankDeficientFit("highlight spans " + std::to_string(n) +
                               " rows; a degree-" + std::to_string(order) +
                               " fit needs at least " + std::to_string(order + 1));
    }

    const double y_min = rows.front();
    const double y_max = rows.back();
    const double span = std::max(y_max - y_min, 1.0);
    Eigen::MatrixXd design(n, order + 1);
    Eigen::VectorXd rhs(n);
    for (int i = 0; i < n; ++i) {
        const double t = (rows[i] - y_min) / span;
        double power = 1.0;
        for (int j = 0; j <= order; ++j) {
            design(i, j) = power;
            power *= t;
        }
        rhs(i) = left_col[i];
    }
    Eigen::VectorXd q = design.colPivHouseholderQr().solve(rhs);

    const double norm = q.norm();
    if (norm < 1e-12) {
        // Boundary pinned at column zero; fall back to the canonical
        // constant-edge vector.
        Eigen::VectorXd canonical = Eigen::VectorXd::Zero(order + 1);
        canonical(0) = 1.0;
        return canonical;
    }
    q /= norm;
    for (Eigen::Index i = 0; i < q.size(); ++i) {
        if (std::abs(q(i)) > 1e-12) {
            if (q(i) < 0.0) q = -q;
            break;
        }
    }
    return q;
}

ExtractedFeatures extract_features(const BinaryGrid& highlight, const BinaryGrid& shadow,
                                   const MorletParams& params) {
    if (!highlight.any()) throw EmptyHighlight("feature extraction needs highlight pixels");

    ExtractedFeatures out;
    const Orientation theta_h = orientation_of(region_stats(highlight));

    bool shadow_usable = shadow.any();
    if (shadow_usable) {
        try {
            const OrientationProfile profile = orientation_profile(shadow);
            const auto [theta_max, theta_min] = extremal_angles(profile);
            const WaveletFeatures wavelets = wavelet_features(profile, params);
            const Orientation theta_s = orientation_of(region_stats(shadow));
            out.features.theta_max_deg = theta_max;
            out.features.theta_min_deg = theta_min;
            out.features.skew_scale = wavelets.skew_scale;
            out.features.skew_translation = wavelets.skew_translation;
            out.features.hso_deg = hso(theta_s, theta_h);
        } catch (const EmptyShadow&) {
            shadow_usable = false;  // degenerate profile: treat as missing
        }
    }
    if (!shadow_usable) {
        out.features.theta_max_deg = 0.0;
        out.features.theta_min_deg = 0.0;
        out.features.skew_scale = 0.0;
        out.features.skew_translation = 0.0;
        out.features.hso_deg = 90.0;
        out.shadow_missing = true;
    }

    const Eigen::VectorXd hc = highlight_curvature(highlight, kCurvatureOrder);
    for (int i = 0; i <= kCurvatureOrder; ++i) out.features.hc[i] = hc(i);
    return out;
}

}  // namespace sonoptic
