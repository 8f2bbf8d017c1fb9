#include "sonoptic/pgm.hpp"

#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <vector>

namespace sonoptic {
namespace {

// Reads one whitespace/comment-separated header token.
std::string next_token(std::istream& in, const std::string& path) {
    std::string token;
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {  // comment to end of line
            while (c != EOF && c != '\n') c = in.get();
        } else if (std::isspace(c)) {
            c = in.get();
        } else {
            break;
        }
    }
    while (c != EOF && !std::isspace(c)) {
        token.push_back(static_cast<char>(c));
        c = in.get();
    }
    if (token.empty()) throw MalformedFile(path + ": truncated graymap header");
    return token;
}

long parse_header_number(std::istream& in, const std::string& path) {
    const std::string token = next_token(in, path);
    std::size_t used = 0;
    long value = 0;
    try {
        value = std::stol(token, &used);
    } catch (const std::exception&) {
        throw MalformedFile(path + ": bad header number '" + token + "'");
    }
    if (used != token.size() || value < 0) {
        throw MalformedFile(path + ": bad header number '" + token + "'");
    }
    return value;
}

struct RawPgm {
    int width;
    int height;
    int maxval;
    std::vector<std::uint16_t> pixels;  // row-major
};

RawPgm read_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingFile(path);

    const std::string magic = next_token(in, path);
    if (magic != "P5") throw MalformedFile(path + ": expected P5 magic, got '" + magic + "'");

    RawPgm pgm;
    pgm.width = static_cast<int>(parse_header_number(in, path));
    pgm.height = static_cast<int>(parse_header_number(in, path));
    pgm.maxval = static_cast<int>(parse_header_number(in, path));
    if (pgm.width <= 0 || pgm.height <= 0) {
        throw MalformedFile(path + ": non-positive dimensions");
    }
    if (pgm.maxval <= 0 || pgm.maxval > 65535) {
        throw MalformedFile(path + ": maxval " + std::to_string(pgm.maxval) + " out of range");
    }
    // The single whitespace byte after maxval was already consumed by the
    // token reader; raster data starts here.
    const std::size_t count = static_cast<std::size_t>(pgm.width) * pgm.height;
    const int bytes_per_pixel = pgm.maxval > 255 ? 2 : 1;
    std::vector<char> raw(count * bytes_per_pixel);
    in.read(raw.data(), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size()) {
        throw MalformedFile(path + ": truncated raster data");
    }

    pgm.pixels.resize(count);
    if (bytes_per_pixel == 1) {
        for (std::size_t i = 0; i < count; ++i) {
            pgm.pixels[i] = static_cast<std::uint8_t>(raw[i]);
        }
    } else {
        for (std::size_t i = 0; i < count; ++i) {  // big-endian, MSB first
            const auto hi = static_cast<std::uint8_t>(raw[2 * i]);
            const auto lo = static_cast<std::uint8_t>(raw[2 * i + 1]);
            pgm.pixels[i] = static_cast<std::uint16_t>((hi << 8) | lo);
        }
    }
    return pgm;
}

void write_pgm(const std::string& path, int width, int height, int maxval,
               const std::vector<std::uint16_t>& pixels) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw MissingFile("cannot open for writing: " + path);
    out << "P5\n" << width << " " << height << "\n" << maxval << "\n";
    if (maxval > 255) {
        for (std::uint16_t v : pixels) {
            out.put(static_cast<char>(v >> 8));
            out.put(static_cast<char>(v & 0xff));
        }
    } else {
        for (std::uint16_t v : pixels) out.put(static_cast<char>(v & 0xff));
    }
    if (!out) throw MissingFile("write failed: " + path);
}

}  // namespace

RoiImage load_roi(const std::string& path, Modality modality) {
    const RawPgm pgm = read_pgm(path);
    if (pgm.width < kMinRoiDim || pgm.height < kMinRoiDim) {
        throw DimensionTooSmall(path + ": " + std::to_string(pgm.width) + "x" +
                                std::to_string(pgm.height));
    }
    std::vector<double> intensities(pgm.pixels.size());
    const double scale = 1.0 / pgm.maxval;
    for (std::size_t i = 0; i < pgm.pixels.size(); ++i) {
        intensities[i] = pgm.pixels[i] * scale;
    }
    return RoiImage(pgm.width, pgm.height, std::move(intensities), modality);
}

void save_roi(const RoiImage& image, const std::string& path, int bit_depth) {
    if (bit_depth != 8 && bit_depth != 16) {
        throw InvalidArgument("bit depth must be 8 or 16");
    }
    const int maxval = bit_depth == 8 ? 255 : 65535;
    std::vector<std::uint16_t> pixels(image.data().size());
    for (std::size_t i = 0; i < pixels.size(); ++i) {
        pixels[i] = static_cast<std::uint16_t>(std::lround(image.data()[i] * maxval));
    }
    write_pgm(path, image.width(), image.height(), maxval, pixels);
}

SegmentationMap load_segmentation(const std::string& path) {
    const RawPgm pgm = read_pgm(path);
    if (pgm.maxval != 255) {
        throw MalformedFile(path + ": segmentation maps must be 8-bit (maxval 255)");
    }
    std::vector<RegionLabel> labels(pgm.pixels.size());
    for (std::size_t i = 0; i < pgm.pixels.size(); ++i) {
        switch (pgm.pixels[i]) {
            case 0: labels[i] = RegionLabel::Background; break;
            case 128: labels[i] = RegionLabel::Shadow; break;
            case 255: labels[i] = RegionLabel::Highlight; break;
            default:
                throw IllegalLabelValue(path + ": pixel value " + std::to_string(pgm.pixels[i]) +
                                        " is not in {0, 128, 255}");
        }
    }
    return SegmentationMap(pgm.width, pgm.height, std::move(labels));
}

void save_segmentation(const SegmentationMap& seg, const std::string& path) {
    std::vector<std::uint16_t> pixels(seg.data().size());
    for (std::size_t i = 0; i < pixels.size(); ++i) {
        switch (seg.data()[i]) {
            case RegionLabel::Background: pixels[i] = 0; break;
            case RegionLabel::Shadow: pixels[i] = 128; break;
            case RegionLabel::Highlight: pixels[i] = 255; break;
        }
    }
    write_pgm(path, seg.width(), seg.height(), 255, pixels);
}

}  // namespace sonoptic
