#include "sonoptic/manifest.hpp"

#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "sonoptic/pgm.hpp"

namespace sonoptic {
namespace {

using nlohmann::json;

std::string require_string(const json& record, const char* key) {
    if (!record.contains(key) || !record[key].is_string()) {
        throw MalformedFile(std::string("manifest record missing string field '") + key + "'");
    }
    return record[key].get<std::string>();
}

double require_number(const json& record, const char* key) {
    if (!record.contains(key) || !record[key].is_number()) {
        throw MalformedFile(std::string("manifest record missing numeric field '") + key + "'");
    }
    return record[key].get<double>();
}

std::string resolve(const std::string& base_dir, const std::string& path) {
    std::filesystem::path p(path);
    if (p.is_absolute() || base_dir.empty()) return path;
    return (std::filesystem::path(base_dir) / p).string();
}

}  // namespace

ManifestRecord parse_manifest_record(const std::string& json_line) {
    json record;
    try {
        record = json::parse(json_line);
    } catch (const json::exception& e) {
        throw MalformedFile(std::string("manifest line is not valid JSON: ") + e.what());
    }
    if (!record.is_object()) throw MalformedFile("manifest line is not a JSON object");

    ManifestRecord out;
    out.sas_image = require_string(record, "sas_image");
    out.sas_seg = require_string(record, "sas_seg");
    out.opt_image = require_string(record, "opt_image");
    out.opt_seg = require_string(record, "opt_seg");
    if (record.contains("label") && !record["label"].is_null()) {
        if (!record["label"].is_string()) throw UnknownLabel("label field must be a string");
        out.label = parse_label(record["label"].get<std::string>());
    }
    out.geometry.altitude_m = require_number(record, "altitude_m");
    out.geometry.range_origin_m = require_number(record, "range_origin_m");
    out.geometry.pixel_spacing_m = require_number(record, "pixel_spacing_m");
    const std::string look = require_string(record, "look_direction");
    if (look == "left") {
        out.geometry.look_direction = LookDirection::Left;
    } else if (look == "right") {
        out.geometry.look_direction = LookDirection::Right;
    } else {
        throw MalformedFile("look_direction must be 'left' or 'right', got '" + look + "'");
    }
    out.geometry.validate();
    return out;
}

std::vector<ManifestRecord> read_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MissingFile(path);
    std::vector<ManifestRecord> records;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        records.push_back(parse_manifest_record(line));
    }
    return records;
}

void write_manifest(const std::vector<ManifestRecord>& records, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw MissingFile("cannot open for writing: " + path);
    for (const ManifestRecord& r : records) {
        json record{
            {"sas_image", r.sas_image},
            {"sas_seg", r.sas_seg},
            {"opt_image", r.opt_image},
            {"opt_seg", r.opt_seg},
            {"altitude_m", r.geometry.altitude_m},
            {"range_origin_m", r.geometry.range_origin_m},
            {"pixel_spacing_m", r.geometry.pixel_spacing_m},
            {"look_direction", r.geometry.look_direction == LookDirection::Left ? "left" : "right"},
        };
        if (r.label) record["label"] = std::string(label_name(*r.label));
        out << record.dump() << "\n";
    }
    if (!out) throw MissingFile("write failed: " + path);
}

ImagePair load_pair(const ManifestRecord& record, const std::string& base_dir) {
    const auto checked_path = [&](const std::string& p) {
        const std::string full = resolve(base_dir, p);
        if (!std::filesystem::exists(full)) throw MissingFile(full);
        return full;
    };
    RoiImage sas_roi = load_roi(checked_path(record.sas_image), Modality::Sas);
    SegmentationMap sas_seg = load_segmentation(checked_path(record.sas_seg));
    RoiImage opt_roi = load_roi(checked_path(record.opt_image), Modality::Optical);
    SegmentationMap opt_seg = load_segmentation(checked_path(record.opt_seg));
    if (sas_seg.width() != sas_roi.width() || sas_seg.height() != sas_roi.height() ||
        opt_seg.width() != opt_roi.width() || opt_seg.height() != opt_roi.height()) {
        throw InconsistentDimensions("segmentation dimensions do not match ROI for record with " +
                                     record.sas_image);
    }
    return ImagePair(std::move(sas_roi), std::move(sas_seg), std::move(opt_roi),
                     std::move(opt_seg), record.label, record.geometry);
}

std::vector<ImagePair> load_manifest(const std::string& path) {
    const std::string base_dir = std::filesystem::path(path).parent_path().string();
    std::vector<ImagePair> pairs;
    for (const ManifestRecord& record : read_manifest(path)) {
        pairs.push_back(load_pair(record, base_dir));
    }
    return pairs;
}

}  // namespace sonoptic
