#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sonoptic/image.hpp"

namespace sonoptic {

/// One dataset record: file names for both modalities, an optional ground
/// truth label, and the acquisition geometry. Relative paths resolve
/// against the manifest's directory.
struct ManifestRecord {
    std::string sas_image;
    std::string sas_seg;
    std::string opt_image;
    std::string opt_seg;
    std::optional<Label> label;
    SensorGeometry geometry;
};

// Manifests are newline-delimited JSON, one record per line.
std::vector<ManifestRecord> read_manifest(const std::string& path);
void write_manifest(const std::vector<ManifestRecord>& records, const std::string& path);

ManifestRecord parse_manifest_record(const std::string& json_line);

ImagePair load_pair(const ManifestRecord& record, const std::string& base_dir);

/// Loads and validates every referenced file; pair i corresponds to record i.
std::vector<ImagePair> load_manifest(const std::string& path);

}  // namespace sonoptic
