#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sonoptic/image.hpp"
#include "sonoptic/rng.hpp"

namespace sonoptic {

enum class ObjectType { Manta, Cylinder, Boulder };

Label object_label(ObjectType type);

/// Fully describes one synthetic scene; the seed determines every random
/// draw, so equal specs produce bit-identical pairs.
struct SceneSpec {
    ObjectType object_type = ObjectType::Manta;
    double center_x_px = 40.0;
    double center_y_px = 48.0;
    double sas_orientation_deg = 0.0;   // object orientation in the SAS view
    double opt_orientation_deg = 0.0;   // object orientation in the optical view
    double size_m = 2.0;                // footprint major dimension
    double height_m = 0.5;
    double noise_level = 0.05;          // std of additive intensity noise
    SensorGeometry sensor;
    int width = 96;
    int height = 96;
    std::uint64_t seed = 0;

    void validate() const;  // throws InvalidSpec
};

/// Renders the matched SAS/optical pair for one object. The SAS view casts
/// its shadow from flat-seabed side-look geometry; the optical view is an
/// overhead Lambertian shading of the same shape. Segmentations are
/// derived from the noisy intensities by nearest-prototype labeling, so
/// label noise grows with noise_level.
ImagePair generate_scene(const SceneSpec& spec);

/// Mismatched pair (label U): SAS side of one scene, optical side of
/// another with a different object type.
ImagePair generate_mismatched_pair(const SceneSpec& sas_side, const SceneSpec& optical_side);

struct BenchmarkConfig {
    int per_class = 50;              // scenes per true class before mismatch pairing
    int mismatched_per_class = 12;   // scenes per class diverted into U pairs
    double noise_level = 0.05;
    int width = 96;
    int height = 96;
    SensorGeometry sensor;
    std::uint64_t seed = 0;
    // Corruption benchmark: a random side of each selected pair is
    // regenerated with noise_level * corrupt_factor.
    double corrupt_fraction = 0.0;
    double corrupt_factor = 5.0;

    void validate() const;
};

SceneSpec random_scene_spec(ObjectType type, Rng& rng, const BenchmarkConfig& config);

/// Default synthetic benchmark: per_class scenes per {M, C, N}, of which
/// mismatched_per_class per class are cross-paired into U pairs.
std::vector<ImagePair> make_benchmark(const BenchmarkConfig& config);

}  // namespace sonoptic
