#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sonoptic/error.hpp"

namespace sonoptic {

enum class Modality { Optical, Sas };

enum class RegionLabel : std::uint8_t { Background = 0, Highlight = 1, Shadow = 2 };

enum class LookDirection { Left, Right };

// Four-way decision label; U doubles as "modalities do not match".
enum class Label : int { M = 0, C = 1, N = 2, U = 3 };

constexpr int kLabelCount = 4;
constexpr int kMinRoiDim = 8;

Label parse_label(const std::string& text);
char label_char(Label label);
const char* label_name(Label label);

/// Single-channel intensity grid for one modality. Intensities are stored
/// row-major in [0,1]; construction validates range and minimum size.
class RoiImage {
public:
    RoiImage(int width, int height, std::vector<double> intensities, Modality modality);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    Modality modality() const noexcept { return modality_; }

    double at(int x, int y) const { return intensities_[static_cast<std::size_t>(y) * width_ + x]; }
    const std::vector<double>& data() const noexcept { return intensities_; }

private:
    int width_;
    int height_;
    std::vector<double> intensities_;
    Modality modality_;
};

/// Binary pixel mask used for highlight/shadow maps.
class BinaryGrid {
public:
    BinaryGrid() : width_(0), height_(0) {}
    BinaryGrid(int width, int height);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }

    bool at(int x, int y) const { return mask_[static_cast<std::size_t>(y) * width_ + x] != 0; }
    void set(int x, int y, bool value = true) {
        mask_[static_cast<std::size_t>(y) * width_ + x] = value ? 1 : 0;
    }
    bool in_bounds(int x, int y) const noexcept {
        return x >= 0 && x < width_ && y >= 0 && y < height_;
    }

    std::int64_t count() const noexcept;
    bool any() const noexcept { return count() > 0; }

    bool operator==(const BinaryGrid&) const = default;

private:
    int width_;
    int height_;
    std::vector<std::uint8_t> mask_;
};

/// Per-pixel ternary label plane; the single source of truth for the
/// highlight and shadow binary maps.
class SegmentationMap {
public:
    SegmentationMap(int width, int height, std::vector<RegionLabel> labels);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }

    RegionLabel at(int x, int y) const { return labels_[static_cast<std::size_t>(y) * width_ + x]; }
    const std::vector<RegionLabel>& data() const noexcept { return labels_; }

    std::int64_t count(RegionLabel label) const noexcept;
    BinaryGrid mask(RegionLabel label) const;
    BinaryGrid highlight_mask() const { return mask(RegionLabel::Highlight); }
    BinaryGrid shadow_mask() const { return mask(RegionLabel::Shadow); }

private:
    int width_;
    int height_;
    std::vector<RegionLabel> labels_;
};

/// Per-acquisition sonar geometry. Ranges are ground ranges in meters;
/// the near image edge sits at range_origin_m.
struct SensorGeometry {
    double altitude_m = 5.0;
    double range_origin_m = 18.0;
    double pixel_spacing_m = 0.15;
    LookDirection look_direction = LookDirection::Right;

    void validate() const;
};

/// A paired SAS / optical observation of one object.
struct ImagePair {
    ImagePair(RoiImage sas_roi, SegmentationMap sas_seg, RoiImage opt_roi,
              SegmentationMap opt_seg, std::optional<Label> ground_truth,
              SensorGeometry geometry);

    RoiImage sas_roi;
    SegmentationMap sas_seg;
    RoiImage opt_roi;
    SegmentationMap opt_seg;
    std::optional<Label> ground_truth;
    SensorGeometry geometry;
};

}  // namespace sonoptic
