#pragma once

#include <string>

#include "sonoptic/image.hpp"

namespace sonoptic {

// Binary portable graymap (P5) I/O, 8- or 16-bit. Intensities are rescaled
// to [0,1] by the file's maxval on load and quantized by round() on save.

RoiImage load_roi(const std::string& path, Modality modality);
void save_roi(const RoiImage& image, const std::string& path, int bit_depth = 8);

// Segmentation files are 8-bit graymaps restricted to {0, 128, 255}:
// 0 -> Background, 128 -> Shadow, 255 -> Highlight.
SegmentationMap load_segmentation(const std::string& path);
void save_segmentation(const SegmentationMap& seg, const std::string& path);

}  // namespace sonoptic
