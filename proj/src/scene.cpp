#include "sonoptic/scene.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

namespace sonoptic {
namespace {

// Intensity prototypes used both to synthesize the images and to segment
// them back; label noise therefore grows with noise_level exactly as a
// threshold-based segmenter would behave.
constexpr double kSasBackground = 0.45;
constexpr double kSasHighlight = 0.85;
constexpr double kSasShadow = 0.10;
constexpr double kOptBackground = 0.25;
constexpr double kOptObjectBase = 0.45;
constexpr double kOptObjectGain = 0.50;

struct GaussianBump {
    double along_m;
    double perp_m;
    double sigma_m;
    double amplitude;
};

// Object shape sampled once per scene so that both views render the same
// body; only the in-plane orientation differs between views.
struct ObjectShape {
    ObjectType type;
    double size_m;
    double height_m;
    std::vector<GaussianBump> bumps;  // boulder only
};

ObjectShape make_shape(const SceneSpec& spec, Rng& rng) {
    ObjectShape shape;
    shape.type = spec.object_type;
    shape.size_m = spec.size_m;
    shape.height_m = spec.height_m;
    if (spec.object_type == ObjectType::Boulder) {
        const int bumps = static_cast<int>(rng.uniform_int(3, 6));
        for (int i = 0; i < bumps; ++i) {
            GaussianBump b;
            b.along_m = rng.uniform(-0.3, 0.3) * spec.size_m;
            b.perp_m = rng.uniform(-0.3, 0.3) * spec.size_m;
            b.sigma_m = rng.uniform(0.16, 0.30) * spec.size_m;
            b.amplitude = rng.uniform(0.5, 1.0);
            shape.bumps.push_back(b);
        }
    }
    return shape;
}

// Height above seabed (meters) at object-frame coordinates (along, perp).
double shape_height(const ObjectShape& shape, double along_m, double perp_m) {
    switch (shape.type) {
        case ObjectType::Manta: {  // truncated cone
            const double rb = 0.5 * shape.size_m;
            const double rt = 0.45 * rb;
            const double d = std::hypot(along_m, perp_m);
            if (d <= rt) return shape.height_m;
            if (d <= rb) return shape.height_m * (rb - d) / (rb - rt);
            return 0.0;
        }
        case ObjectType::Cylinder: {  // half-buried pipe on the seabed
            const double half_len = 0.5 * shape.size_m;
            const double radius = shape.height_m;
            if (std::abs(along_m) > half_len || std::abs(perp_m) > radius) return 0.0;
            const double u = perp_m / radius;
            return shape.height_m * std::sqrt(std::max(1.0 - u * u, 0.0));
        }
        case ObjectType::Boulder: {
            double z = 0.0;
            for (const GaussianBump& b : shape.bumps) {
                const double da = along_m - b.along_m;
                const double dp = perp_m - b.perp_m;
                z += b.amplitude * std::exp(-0.5 * (da * da + dp * dp) / (b.sigma_m * b.sigma_m));
            }
            return z;  // unnormalized; rasterize() rescales and trims the skirt
        }
    }
    return 0.0;
}

// Heights in meters on the pixel grid, object rotated to orientation_deg.
std::vector<double> rasterize(const ObjectShape& shape, double orientation_deg,
                              const SceneSpec& spec) {
    const double phi = orientation_deg * std::numbers::pi / 180.0;
    const double c = std::cos(phi);
    const double s = std::sin(phi);
    const double spacing = spec.sensor.pixel_spacing_m;
    std::vector<double> heights(static_cast<std::size_t>(spec.width) * spec.height, 0.0);
    double peak = 0.0;
    for (int y = 0; y < spec.height; ++y) {
        for (int x = 0; x < spec.width; ++x) {
            const double dx = (x - spec.center_x_px) * spacing;
            const double dy = (y - spec.center_y_px) * spacing;
            // y negated: orientation follows the reported angle convention.
            const double along = dx * c - dy * s;
            const double perp = -dx * s - dy * c;
            const double z = shape_height(shape, along, perp);
            heights[static_cast<std::size_t>(y) * spec.width + x] = z;
            peak = std::max(peak, z);
        }
    }
    if (shape.type == ObjectType::Boulder && peak > 0.0) {
        // Trim the Gaussian skirt to give the boulder a compact footprint,
        // then rescale so the summit reaches height_m.
        const double cut = 0.15 * peak;
        for (double& z : heights) z = std::max(z - cut, 0.0);
        const double scale = shape.height_m / (peak - cut);
        for (double& z : heights) z *= scale;
    }
    return heights;
}

double range_of_column(int x, const SceneSpec& spec) {
    const double cells = spec.sensor.look_direction == LookDirection::Right
                             ? static_cast<double>(x)
                             : static_cast<double>(spec.width - 1 - x);
    return spec.sensor.range_origin_m + cells * spec.sensor.pixel_spacing_m;
}

struct SasTruth {
    BinaryGrid highlight;
    BinaryGrid shadow;
};

// Exact per-row occlusion and shadow geometry over the true height field.
SasTruth sas_truth_maps(const std::vector<double>& heights, const SceneSpec& spec) {
    const double altitude = spec.sensor.altitude_m;
    const int w = spec.width;
    SasTruth truth{BinaryGrid(w, spec.height), BinaryGrid(w, spec.height)};

    const bool right = spec.sensor.look_direction == LookDirection::Right;
    for (int y = 0; y < spec.height; ++y) {
        double best_key = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < w; ++i) {
            const int x = right ? i : w - 1 - i;  // walk in increasing range
            const double h = heights[static_cast<std::size_t>(y) * w + x];
            if (h <= 1e-9) continue;
            const double r = range_of_column(x, spec);
            if (r <= 0.0) continue;
            // A surface cell is insonified iff its shadow would outreach
            // every nearer cell's shadow (equivalently, the ray clears them).
            const double key = r / (altitude - h);
            if (key > best_key) {
                truth.highlight.set(x, y);
                best_key = key;
            }
            // Shadow interval (r, r * A / (A - h)] marked from every surface
            // cell; occluded cells are covered by their occluder's interval.
            const double end_m = r * altitude / (altitude - h);
            for (int j = i + 1; j < w; ++j) {
                const int sx = right ? j : w - 1 - j;
                const double sr = range_of_column(sx, spec);
                if (sr > end_m + 1e-12) break;
                truth.shadow.set(sx, y);
            }
        }
    }
    for (int y = 0; y < spec.height; ++y) {
        for (int x = 0; x < w; ++x) {
            if (truth.highlight.at(x, y) && truth.shadow.at(x, y)) truth.shadow.set(x, y, false);
        }
    }
    return truth;
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

RoiImage sas_intensity(const SasTruth& truth, const SceneSpec& spec, Rng& rng) {
    std::vector<double> img(static_cast<std::size_t>(spec.width) * spec.height);
    for (int y = 0; y < spec.height; ++y) {
        for (int x = 0; x < spec.width; ++x) {
            double base = kSasBackground;
            if (truth.highlight.at(x, y)) {
                base = kSasHighlight;
            } else if (truth.shadow.at(x, y)) {
                base = kSasShadow;
            }
            img[static_cast<std::size_t>(y) * spec.width + x] =
                clamp01(base + rng.gaussian(0.0, spec.noise_level));
        }
    }
    return RoiImage(spec.width, spec.height, std::move(img), Modality::Sas);
}

SegmentationMap segment_sas(const RoiImage& roi) {
    std::vector<RegionLabel> labels(roi.data().size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const double v = roi.data()[i];
        const double d_bg = std::abs(v - kSasBackground);
        const double d_hl = std::abs(v - kSasHighlight);
        const double d_sh = std::abs(v - kSasShadow);
        if (d_hl < d_bg && d_hl <= d_sh) {
            labels[i] = RegionLabel::Highlight;
        } else if (d_sh < d_bg) {
            labels[i] = RegionLabel::Shadow;
        } else {
            labels[i] = RegionLabel::Background;
        }
    }
    return SegmentationMap(roi.width(), roi.height(), std::move(labels));
}

RoiImage optical_intensity(const std::vector<double>& heights, const SceneSpec& spec, Rng& rng) {
    const int w = spec.width, h = spec.height;
    const double spacing = spec.sensor.pixel_spacing_m;
    const auto height_at = [&](int x, int y) {
        x = std::clamp(x, 0, w - 1);
        y = std::clamp(y, 0, h - 1);
        return heights[static_cast<std::size_t>(y) * w + x];
    };
    std::vector<double> img(static_cast<std::size_t>(w) * h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double base = kOptBackground;
            if (height_at(x, y) > 0.0) {
                // Overhead Lambertian shading of the surface normal.
                const double gx = (height_at(x + 1, y) - height_at(x - 1, y)) / (2.0 * spacing);
                const double gy = (height_at(x, y + 1) - height_at(x, y - 1)) / (2.0 * spacing);
                const double nz = 1.0 / std::sqrt(1.0 + gx * gx + gy * gy);
                base = kOptObjectBase + kOptObjectGain * nz;
            }
            img[static_cast<std::size_t>(y) * w + x] =
                clamp01(base + rng.gaussian(0.0, spec.noise_level));
        }
    }
    return RoiImage(w, h, std::move(img), Modality::Optical);
}

SegmentationMap segment_optical(const RoiImage& roi) {
    std::vector<RegionLabel> labels(roi.data().size());
    const double threshold = 0.5 * (kOptBackground + kOptObjectBase + kOptObjectGain * 0.5);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        labels[i] = roi.data()[i] > threshold ? RegionLabel::Highlight : RegionLabel::Background;
    }
    return SegmentationMap(roi.width(), roi.height(), std::move(labels));
}

struct SceneSides {
    RoiImage sas_roi;
    SegmentationMap sas_seg;
    RoiImage opt_roi;
    SegmentationMap opt_seg;
};

SceneSides generate_sides(const SceneSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);
    const ObjectShape shape = make_shape(spec, rng);

    const std::vector<double> sas_heights = rasterize(shape, spec.sas_orientation_deg, spec);
    const SasTruth truth = sas_truth_maps(sas_heights, spec);
    RoiImage sas_roi = sas_intensity(truth, spec, rng);
    SegmentationMap sas_seg = segment_sas(sas_roi);

    const std::vector<double> opt_heights = rasterize(shape, spec.opt_orientation_deg, spec);
    RoiImage opt_roi = optical_intensity(opt_heights, spec, rng);
    SegmentationMap opt_seg = segment_optical(opt_roi);

    return SceneSides{std::move(sas_roi), std::move(sas_seg), std::move(opt_roi),
                      std::move(opt_seg)};
}

ImagePair splice_pair(const SceneSpec& sas_side, const SceneSpec& optical_side,
                      std::optional<Label> label) {
    SceneSides a = generate_sides(sas_side);
    SceneSides b = generate_sides(optical_side);
    return ImagePair(std::move(a.sas_roi), std::move(a.sas_seg), std::move(b.opt_roi),
                     std::move(b.opt_seg), label, sas_side.sensor);
}

}  // namespace

Label object_label(ObjectType type) {
    switch (type) {
        case ObjectType::Manta: return Label::M;
        case ObjectType::Cylinder: return Label::C;
        case ObjectType::Boulder: return Label::N;
    }
    return Label::U;
}

void SceneSpec::validate() const {
    if (width < kMinRoiDim || height < kMinRoiDim) {
        throw InvalidSpec("scene grid must be at least " + std::to_string(kMinRoiDim) +
                          " pixels in each axis");
    }
    if (!(size_m > 0.0) || !(height_m > 0.0)) {
        throw InvalidSpec("object size and height must be positive");
    }
    if (!(noise_level >= 0.0)) throw InvalidSpec("noise level must be non-negative");
    if (!(sensor.altitude_m > 0.0) || !(sensor.pixel_spacing_m > 0.0)) {
        throw InvalidSpec("sensor altitude and pixel spacing must be positive");
    }
    if (height_m >= sensor.altitude_m) {
        throw InvalidSpec("object height must stay below the sensor altitude");
    }
    if (center_x_px < 0.0 || center_x_px >= width || center_y_px < 0.0 || center_y_px >= height) {
        throw InvalidSpec("object center lies outside the grid");
    }
}

ImagePair generate_scene(const SceneSpec& spec) {
    return splice_pair(spec, spec, object_label(spec.object_type));
}

ImagePair generate_mismatched_pair(const SceneSpec& sas_side, const SceneSpec& optical_side) {
    if (sas_side.object_type == optical_side.object_type) {
        throw InvalidSpec("mismatched pair requires two different object types");
    }
    return splice_pair(sas_side, optical_side, Label::U);
}

void BenchmarkConfig::validate() const {
    if (per_class < 1) throw InvalidSpec("per_class must be at least 1");
    if (mismatched_per_class < 0 || mismatched_per_class > per_class) {
        throw InvalidSpec("mismatched_per_class must lie in [0, per_class]");
    }
    if (!(noise_level >= 0.0)) throw InvalidSpec("noise level must be non-negative");
    if (corrupt_fraction < 0.0 || corrupt_fraction > 1.0) {
        throw InvalidSpec("corrupt_fraction must lie in [0, 1]");
    }
    if (!(corrupt_factor >= 1.0)) throw InvalidSpec("corrupt_factor must be at least 1");
}

SceneSpec random_scene_spec(ObjectType type, Rng& rng, const BenchmarkConfig& config) {
    SceneSpec spec;
    spec.object_type = type;
    spec.width = config.width;
    spec.height = config.height;
    spec.noise_level = config.noise_level;
    spec.sensor = config.sensor;
    spec.center_x_px = 0.38 * config.width + rng.uniform(-5.0, 5.0);
    spec.center_y_px = 0.50 * config.height + rng.uniform(-5.0, 5.0);
    // Cylinders image near broadside (axis close to along-track), matching
    // how survey missions run past elongated targets.
    spec.sas_orientation_deg =
        type == ObjectType::Cylinder ? 90.0 + rng.uniform(-30.0, 30.0) : rng.uniform(0.0, 180.0);
    spec.opt_orientation_deg = rng.uniform(0.0, 180.0);
    switch (type) {
        case ObjectType::Manta:
            spec.size_m = rng.uniform(1.8, 2.4);
            spec.height_m = rng.uniform(0.45, 0.60);
            break;
        case ObjectType::Cylinder:
            spec.size_m = rng.uniform(1.8, 2.8);
            spec.height_m = rng.uniform(0.40, 0.55);
            break;
        case ObjectType::Boulder:
            spec.size_m = rng.uniform(1.6, 2.6);
            spec.height_m = rng.uniform(0.35, 0.70);
            break;
    }
    spec.seed = rng.next_u64();
    return spec;
}

std::vector<ImagePair> make_benchmark(const BenchmarkConfig& config) {
    config.validate();
    Rng rng(config.seed);

    const std::array<ObjectType, 3> types{ObjectType::Manta, ObjectType::Cylinder,
                                          ObjectType::Boulder};
    std::array<std::vector<SceneSpec>, 3> specs;
    for (std::size_t t = 0; t < types.size(); ++t) {
        for (int i = 0; i < config.per_class; ++i) {
            specs[t].push_back(random_scene_spec(types[t], rng, config));
        }
    }

    const auto corruption = [&](SceneSpec& sas_side, SceneSpec& opt_side) {
        if (config.corrupt_fraction <= 0.0) return;
        if (rng.uniform() >= config.corrupt_fraction) return;
        if (rng.uniform() < 0.5) {
            sas_side.noise_level *= config.corrupt_factor;
        } else {
            opt_side.noise_level *= config.corrupt_factor;
        }
    };

    std::vector<ImagePair> pairs;
    const int matched = config.per_class - config.mismatched_per_class;
    for (std::size_t t = 0; t < types.size(); ++t) {
        for (int i = 0; i < matched; ++i) {
            SceneSpec sas_side = specs[t][static_cast<std::size_t>(i)];
            SceneSpec opt_side = sas_side;
            corruption(sas_side, opt_side);
            pairs.push_back(splice_pair(sas_side, opt_side, object_label(types[t])));
        }
    }
    // Cross-pair the remaining scenes into mismatched (U) pairs: the SAS
    // side of each donor meets the optical side of the next type's donor.
    for (std::size_t t = 0; t < types.size(); ++t) {
        const std::size_t other = (t + 1) % types.size();
        for (int i = matched; i < config.per_class; ++i) {
            SceneSpec sas_side = specs[t][static_cast<std::size_t>(i)];
            SceneSpec opt_side = specs[other][static_cast<std::size_t>(i)];
            corruption(sas_side, opt_side);
            pairs.push_back(splice_pair(sas_side, opt_side, Label::U));
        }
    }
    return pairs;
}

}  // namespace sonoptic
