#include "sonoptic/optic2sas.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <unordered_map>

#include "sonoptic/convex_hull.hpp"

namespace sonoptic {

PointCloud shape_from_shading(const RoiImage& roi, const SegmentationMap& seg,
                              double height_scale) {
    if (roi.modality() != Modality::Optical) {
        throw InvalidArgument("height recovery expects an optical ROI");
    }
    if (seg.width() != roi.width() || seg.height() != roi.height()) {
        throw DimensionMismatch("segmentation does not match ROI dimensions");
    }

    double i_min = std::numeric_limits<double>::infinity();
    double i_max = -std::numeric_limits<double>::infinity();
    std::int64_t n = 0;
    for (int y = 0; y < seg.height(); ++y) {
        for (int x = 0; x < seg.width(); ++x) {
            if (seg.at(x, y) != RegionLabel::Highlight) continue;
            i_min = std::min(i_min, roi.at(x, y));
            i_max = std::max(i_max, roi.at(x, y));
            ++n;
        }
    }
    if (n == 0) throw EmptyHighlight("no highlight pixels to reconstruct");

    const bool flat = i_max <= i_min;
    const double span = i_max - i_min;
    PointCloud cloud;
    cloud.points.reserve(static_cast<std::size_t>(n));
    double sum_x = 0.0, sum_y = 0.0;
    for (int y = 0; y < seg.height(); ++y) {
        for (int x = 0; x < seg.width(); ++x) {
            if (seg.at(x, y) != RegionLabel::Highlight) continue;
            const double z =
                flat ? 0.5 * height_scale : height_scale * (roi.at(x, y) - i_min) / span;
            cloud.points.emplace_back(x, y, z);
            sum_x += x;
            sum_y += y;
        }
    }
    const double mu_x = sum_x / n;
    const double mu_y = sum_y / n;
    for (auto& p : cloud.points) {
        p.x() -= mu_x;
        p.y() -= mu_y;
    }
    return cloud;
}

AlignmentParams compute_alignment(const SegmentationMap& sas_seg,
                                  const SegmentationMap& opt_seg) {
    if (sas_seg.count(RegionLabel::Highlight) == 0 || opt_seg.count(RegionLabel::Highlight) == 0) {
        throw EmptyHighlight("alignment needs a highlight region in both images");
    }
    const Orientation sas = orientation_of(region_stats(sas_seg, RegionLabel::Highlight));
    const Orientation opt = orientation_of(region_stats(opt_seg, RegionLabel::Highlight));
    AlignmentParams params;
    params.theta_sas_deg = sas.angle_deg;
    params.theta_opt_deg = opt.angle_deg;
    params.delta_deg = (sas.isotropy_flag || opt.isotropy_flag)
                           ? 0.0
                           : fold_signed_90_deg(sas.angle_deg - opt.angle_deg);
    return params;
}

PointCloud align_cloud(const PointCloud& cloud, const AlignmentParams& params) {
    const double rad = params.delta_deg * std::numbers::pi / 180.0;
    const double c = std::cos(rad);
    const double s = std::sin(rad);
    PointCloud out;
    out.points.reserve(cloud.size());
    for (const auto& p : cloud.points) {
        out.points.emplace_back(p.x() * c + p.y() * s, -p.x() * s + p.y() * c, p.z());
    }
    return out;
}

PointCloud position_cloud(const PointCloud& cloud, const RegionStats& sas_highlight_stats) {
    const Eigen::Vector3d shift(sas_highlight_stats.centroid.x(),
                                sas_highlight_stats.centroid.y(), 0.0);
    PointCloud out;
    out.points.reserve(cloud.size());
    for (const auto& p : cloud.points) out.points.push_back(p + shift);
    return out;
}

std::vector<std::size_t> hpr_visible_indices(const PointCloud& cloud,
                                             const Eigen::Vector3d& viewpoint) {
    const std::size_t n = cloud.size();
    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    if (n < 4) return all;

    // Exact duplicates collapse onto one representative; visibility is then
    // shared by every copy.
    std::unordered_map<std::size_t, std::vector<std::size_t>> duplicates;
    std::vector<Eigen::Vector3d> unique_pts;
    std::vector<std::size_t> unique_src;
    {
        std::unordered_map<std::string, std::size_t> seen;
        for (std::size_t i = 0; i < n; ++i) {
            std::string key(reinterpret_cast<const char*>(cloud.points[i].data()),
                            3 * sizeof(double));
            auto [it, inserted] = seen.emplace(std::move(key), unique_pts.size());
            if (inserted) {
                unique_pts.push_back(cloud.points[i]);
                unique_src.push_back(i);
            } else {
                duplicates[it->second].push_back(i);
            }
        }
    }

    double max_r = 0.0;
    for (const auto& p : unique_pts) max_r = std::max(max_r, (p - viewpoint).norm());
    if (max_r <= 0.0) return all;
    const double flip_radius = kHprFlipMargin * max_r;

    std::vector<Eigen::Vector3d> flipped;
    flipped.reserve(unique_pts.size() + 1);
    std::vector<std::size_t> at_viewpoint;
    std::vector<std::size_t> flip_src;  // unique index per flipped entry
    for (std::size_t u = 0; u < unique_pts.size(); ++u) {
        const Eigen::Vector3d d = unique_pts[u] - viewpoint;
        const double r = d.norm();
        if (r < 1e-12) {  // sits on the sensor; trivially visible
            at_viewpoint.push_back(u);
            continue;
        }
        flipped.push_back(unique_pts[u] + 2.0 * (flip_radius - r) * d / r);
        flip_src.push_back(u);
    }
    flipped.push_back(viewpoint);

    const auto hull = convex_hull_vertices(flipped);
    std::vector<std::size_t> visible_unique;
    if (!hull) {
        return all;  // degenerate cloud: everything visible
    }
    for (const std::size_t h : *hull) {
        if (h < flip_src.size()) visible_unique.push_back(flip_src[h]);
    }
    visible_unique.insert(visible_unique.end(), at_viewpoint.begin(), at_viewpoint.end());

    std::vector<std::size_t> out;
    for (const std::size_t u : visible_unique) {
        out.push_back(unique_src[u]);
        const auto it = duplicates.find(u);
        if (it != duplicates.end()) {
            out.insert(out.end(), it->second.begin(), it->second.end());
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

PointCloud hpr_visible(const PointCloud& cloud, const Eigen::Vector3d& viewpoint) {
    PointCloud out;
    for (const std::size_t i : hpr_visible_indices(cloud, viewpoint)) {
        out.points.push_back(cloud.points[i]);
    }
    return out;
}

namespace {

// Ground range of a (real-valued) pixel x coordinate. For a left-looking
// sensor the near range edge is the right image edge.
double range_of_x(double x, const SensorGeometry& geom, int width) {
    const double cells =
        geom.look_direction == LookDirection::Right ? x : (width - 1.0) - x;
    return geom.range_origin_m + cells * geom.pixel_spacing_m;
}

}  // namespace

SyntheticSasMaps render_sas_maps(const PointCloud& cloud, const SensorGeometry& geom,
                                 int out_width, int out_height) {
    geom.validate();
    if (out_width <= 0 || out_height <= 0) {
        throw InvalidArgument("output dimensions must be positive");
    }

    SyntheticSasMaps maps{BinaryGrid(out_width, out_height), BinaryGrid(out_width, out_height)};
    if (cloud.empty()) return maps;

    const double altitude_px = geom.altitude_m / geom.pixel_spacing_m;
    for (const auto& p : cloud.points) {
        const double h = p.z() * geom.pixel_spacing_m;
        if (h >= geom.altitude_m) {
            throw ObjectAboveSensor("point height " + std::to_string(h) +
                                    " m reaches sensor altitude " +
                                    std::to_string(geom.altitude_m) + " m");
        }
    }

    // Sensor position: ground range zero at the platform track, altitude in
    // pixel units, centered on the cloud along-track.
    double mean_y = 0.0;
    for (const auto& p : cloud.points) mean_y += p.y();
    mean_y /= static_cast<double>(cloud.size());
    const double x_at_zero_range =
        geom.look_direction == LookDirection::Right
            ? -geom.range_origin_m / geom.pixel_spacing_m
            : (out_width - 1.0) + geom.range_origin_m / geom.pixel_spacing_m;
    const Eigen::Vector3d viewpoint(x_at_zero_range, mean_y, altitude_px);

    const PointCloud visible = hpr_visible(cloud, viewpoint);
    const int range_step = geom.look_direction == LookDirection::Right ? 1 : -1;

    for (const auto& p : visible.points) {
        const int ix = static_cast<int>(std::lround(p.x()));
        const int iy = static_cast<int>(std::lround(p.y()));
        if (maps.highlight.in_bounds(ix, iy)) maps.highlight.set(ix, iy);
    }
    for (const auto& p : visible.points) {
        const double r = range_of_x(p.x(), geom, out_width);
        const double h = p.z() * geom.pixel_spacing_m;
        const double extent_m = h * r / (geom.altitude_m - h);
        if (extent_m <= 0.0) continue;
        const double extent_cells = extent_m / geom.pixel_spacing_m;
        const int iy = static_cast<int>(std::lround(p.y()));
        // Cells whose own range lies in (r, r + extent].
        int lo, hi;
        if (range_step > 0) {
            lo = static_cast<int>(std::floor(p.x())) + 1;
            hi = static_cast<int>(std::floor(p.x() + extent_cells + 1e-9));
        } else {
            lo = static_cast<int>(std::ceil(p.x() - extent_cells - 1e-9));
            hi = static_cast<int>(std::ceil(p.x())) - 1;
        }
        lo = std::max(lo, 0);
        hi = std::min(hi, out_width - 1);
        for (int ix = lo; ix <= hi; ++ix) {
            const double cells_beyond = range_step > 0 ? ix - p.x() : p.x() - ix;
            if (cells_beyond <= 0.0 || cells_beyond > extent_cells + 1e-9) continue;
            if (maps.shadow.in_bounds(ix, iy)) maps.shadow.set(ix, iy);
        }
    }
    // Highlight wins where both would claim a cell.
    for (int y = 0; y < out_height; ++y) {
        for (int x = 0; x < out_width; ++x) {
            if (maps.highlight.at(x, y) && maps.shadow.at(x, y)) maps.shadow.set(x, y, false);
        }
    }
    return maps;
}

SyntheticSasMaps transform_pair(const ImagePair& pair, double height_scale_m) {
    const AlignmentParams alignment = compute_alignment(pair.sas_seg, pair.opt_seg);
    const double height_scale_px = height_scale_m / pair.geometry.pixel_spacing_m;
    PointCloud cloud = shape_from_shading(pair.opt_roi, pair.opt_seg, height_scale_px);
    cloud = align_cloud(cloud, alignment);
    cloud = position_cloud(cloud, region_stats(pair.sas_seg, RegionLabel::Highlight));
    return render_sas_maps(cloud, pair.geometry, pair.sas_roi.width(), pair.sas_roi.height());
}

SegmentationMap maps_to_segmentation(const SyntheticSasMaps& maps) {
    const int w = maps.highlight.width();
    const int h = maps.highlight.height();
    if (maps.shadow.width() != w || maps.shadow.height() != h) {
        throw DimensionMismatch("highlight and shadow map dimensions differ");
    }
    std::vector<RegionLabel> labels(static_cast<std::size_t>(w) * h, RegionLabel::Background);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (maps.highlight.at(x, y)) {
                labels[static_cast<std::size_t>(y) * w + x] = RegionLabel::Highlight;
            } else if (maps.shadow.at(x, y)) {
                labels[static_cast<std::size_t>(y) * w + x] = RegionLabel::Shadow;
            }
        }
    }
    return SegmentationMap(w, h, std::move(labels));
}

}  // namespace sonoptic
