#include "sonoptic/image.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sonoptic {

Label parse_label(const std::string& text) {
    if (text == "M") return Label::M;
    if (text == "C") return Label::C;
    if (text == "N") return Label::N;
    if (text == "U") return Label::U;
    throw UnknownLabel("'" + text + "' is not one of M/C/N/U");
}

char label_char(Label label) {
    switch (label) {
        case Label::M: return 'M';
        case Label::C: return 'C';
        case Label::N: return 'N';
        case Label::U: return 'U';
    }
    return '?';
}

const char* label_name(Label label) {
    switch (label) {
        case Label::M: return "M";
        case Label::C: return "C";
        case Label::N: return "N";
        case Label::U: return "U";
    }
    return "?";
}

RoiImage::RoiImage(int width, int height, std::vector<double> intensities, Modality modality)
    : width_(width), height_(height), intensities_(std::move(intensities)), modality_(modality) {
    if (width_ < kMinRoiDim || height_ < kMinRoiDim) {
        throw DimensionTooSmall("ROI is " + std::to_string(width_) + "x" + std::to_string(height_) +
                                "; minimum is " + std::to_string(kMinRoiDim) + " in each axis");
    }
    if (intensities_.size() != static_cast<std::size_t>(width_) * height_) {
        throw InvalidArgument("intensity buffer size does not match dimensions");
    }
    for (double v : intensities_) {
        if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
            throw InvalidArgument("intensity " + std::to_string(v) + " outside [0,1]");
        }
    }
}

BinaryGrid::BinaryGrid(int width, int height)
    : width_(width), height_(height),
      mask_(static_cast<std::size_t>(width) * height, 0) {
    if (width <= 0 || height <= 0) {
        throw InvalidArgument("binary grid dimensions must be positive");
    }
}

std::int64_t BinaryGrid::count() const noexcept {
    return std::accumulate(mask_.begin(), mask_.end(), std::int64_t{0});
}

SegmentationMap::SegmentationMap(int width, int height, std::vector<RegionLabel> labels)
    : width_(width), height_(height), labels_(std::move(labels)) {
    if (width_ <= 0 || height_ <= 0) {
        throw InvalidArgument("segmentation dimensions must be positive");
    }
    if (labels_.size() != static_cast<std::size_t>(width_) * height_) {
        throw InvalidArgument("label buffer size does not match dimensions");
    }
}

std::int64_t SegmentationMap::count(RegionLabel label) const noexcept {
    return std::count(labels_.begin(), labels_.end(), label);
}

BinaryGrid SegmentationMap::mask(RegionLabel label) const {
    BinaryGrid grid(width_, height_);
    for (int y = 0; y < height_; ++y) {
        for (int x = 0; x < width_; ++x) {
            if (at(x, y) == label) grid.set(x, y);
        }
    }
    return grid;
}

void SensorGeometry::validate() const {
    if (!(altitude_m > 0.0)) throw InvalidArgument("sensor altitude must be positive");
    if (!(pixel_spacing_m > 0.0)) throw InvalidArgument("pixel spacing must be positive");
    if (!std::isfinite(range_origin_m)) throw InvalidArgument("range origin must be finite");
}

ImagePair::ImagePair(RoiImage sas_roi_in, SegmentationMap sas_seg_in, RoiImage opt_roi_in,
                     SegmentationMap opt_seg_in, std::optional<Label> ground_truth_in,
                     SensorGeometry geometry_in)
    : sas_roi(std::move(sas_roi_in)), sas_seg(std::move(sas_seg_in)),
      opt_roi(std::move(opt_roi_in)), opt_seg(std::move(opt_seg_in)),
      ground_truth(ground_truth_in), geometry(geometry_in) {
    if (sas_roi.modality() != Modality::Sas || opt_roi.modality() != Modality::Optical) {
        throw InvalidArgument("image pair modality tags inconsistent with slots");
    }
    if (sas_seg.width() != sas_roi.width() || sas_seg.height() != sas_roi.height()) {
        throw DimensionMismatch("SAS segmentation does not match its ROI dimensions");
    }
    if (opt_seg.width() != opt_roi.width() || opt_seg.height() != opt_roi.height()) {
        throw DimensionMismatch("optical segmentation does not match its ROI dimensions");
    }
    geometry.validate();
}

}  // namespace sonoptic
