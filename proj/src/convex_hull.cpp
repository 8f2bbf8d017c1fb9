#include "sonoptic/convex_hull.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <set>
#include <unordered_map>
#include <vector>

namespace sonoptic {
namespace {

struct Face {
    std::array<std::size_t, 3> v;  // counter-clockwise seen from outside
    Eigen::Vector3d normal;        // unit length
    double offset;                 // normal . x == offset on the face plane
    std::vector<std::size_t> conflicts;
    double far_dist = 0.0;
    std::size_t far_point = 0;
    bool alive = true;
};

class QuickHull {
public:
    explicit QuickHull(const std::vector<Eigen::Vector3d>& pts) : pts_(pts) {}

    std::optional<std::vector<std::size_t>> run() {
        if (pts_.size() < 4) return std::nullopt;
        compute_tolerance();
        if (!build_initial_simplex()) return std::nullopt;
        refine();
        return collect_vertices();
    }

private:
    double dist_to(const Face& f, std::size_t idx) const {
        return f.normal.dot(pts_[idx]) - f.offset;
    }

    void compute_tolerance() {
        Eigen::Vector3d lo = pts_[0], hi = pts_[0];
        for (const auto& p : pts_) {
            lo = lo.cwiseMin(p);
            hi = hi.cwiseMax(p);
        }
        eps_ = std::max(1e-12, 1e-9 * (hi - lo).norm());
    }

    std::uint64_t edge_key(std::size_t a, std::size_t b) const {
        return static_cast<std::uint64_t>(a) * pts_.size() + b;
    }

    // Creates a face over (a, b, c). For the initial simplex the winding is
    // fixed by the interior point; cone faces inherit it from their horizon
    // edge and must not be flipped (the edge map relies on it).
    std::size_t make_face(std::size_t a, std::size_t b, std::size_t c, bool allow_flip) {
        Face f;
        f.v = {a, b, c};
        Eigen::Vector3d n = (pts_[b] - pts_[a]).cross(pts_[c] - pts_[a]);
        const double len = n.norm();
        if (len > 0.0) n /= len;
        f.normal = n;
        f.offset = n.dot(pts_[a]);
        if (allow_flip && f.normal.dot(interior_) - f.offset > 0.0) {
            std::swap(f.v[1], f.v[2]);
            f.normal = -f.normal;
            f.offset = -f.offset;
        }
        const std::size_t id = faces_.size();
        faces_.push_back(std::move(f));
        register_edges(id);
        return id;
    }

    void register_edges(std::size_t id) {
        const auto& v = faces_[id].v;
        edge_face_[edge_key(v[0], v[1])] = id;
        edge_face_[edge_key(v[1], v[2])] = id;
        edge_face_[edge_key(v[2], v[0])] = id;
    }

    void unregister_edges(std::size_t id) {
        const auto& v = faces_[id].v;
        edge_face_.erase(edge_key(v[0], v[1]));
        edge_face_.erase(edge_key(v[1], v[2]));
        edge_face_.erase(edge_key(v[2], v[0]));
    }

    bool build_initial_simplex() {
        // Two extremes along the widest spread among the axis extremes.
        std::array<std::size_t, 6> extreme{};
        for (int axis = 0; axis < 3; ++axis) {
            std::size_t lo = 0, hi = 0;
            for (std::size_t i = 1; i < pts_.size(); ++i) {
                if (pts_[i][axis] < pts_[lo][axis]) lo = i;
                if (pts_[i][axis] > pts_[hi][axis]) hi = i;
            }
            extreme[2 * axis] = lo;
            extreme[2 * axis + 1] = hi;
        }
        std::size_t i0 = extreme[0], i1 = extreme[1];
        double best = -1.0;
        for (std::size_t a : extreme) {
            for (std::size_t b : extreme) {
                const double d = (pts_[a] - pts_[b]).squaredNorm();
                if (d > best) {
                    best = d;
                    i0 = a;
                    i1 = b;
                }
            }
        }
        if (std::sqrt(best) < eps_) return false;

        const Eigen::Vector3d dir = (pts_[i1] - pts_[i0]).normalized();
        std::size_t i2 = i0;
        best = -1.0;
        for (std::size_t i = 0; i < pts_.size(); ++i) {
            const double d = ((pts_[i] - pts_[i0]) - dir.dot(pts_[i] - pts_[i0]) * dir).squaredNorm();
            if (d > best) {
                best = d;
                i2 = i;
            }
        }
        if (std::sqrt(best) < eps_) return false;

        Eigen::Vector3d plane_n = (pts_[i1] - pts_[i0]).cross(pts_[i2] - pts_[i0]).normalized();
        std::size_t i3 = i0;
        best = -1.0;
        for (std::size_t i = 0; i < pts_.size(); ++i) {
            const double d = std::abs(plane_n.dot(pts_[i] - pts_[i0]));
            if (d > best) {
                best = d;
                i3 = i;
            }
        }
        if (best < eps_) return false;

        interior_ = 0.25 * (pts_[i0] + pts_[i1] + pts_[i2] + pts_[i3]);
        const std::array<std::array<std::size_t, 3>, 4> tris{{
            {i0, i1, i2}, {i0, i1, i3}, {i0, i2, i3}, {i1, i2, i3}}};
        for (const auto& t : tris) make_face(t[0], t[1], t[2], /*allow_flip=*/true);

        for (std::size_t i = 0; i < pts_.size(); ++i) {
            if (i == i0 || i == i1 || i == i2 || i == i3) continue;
            assign_conflict(i);
        }
        for (std::size_t f = 0; f < faces_.size(); ++f) {
            if (!faces_[f].conflicts.empty()) work_.push_back(f);
        }
        return true;
    }

    void assign_conflict(std::size_t idx) {
        for (std::size_t f = 0; f < faces_.size(); ++f) {
            if (!faces_[f].alive) continue;
            const double d = dist_to(faces_[f], idx);
            if (d > eps_) {
                faces_[f].conflicts.push_back(idx);
                if (d > faces_[f].far_dist) {
                    faces_[f].far_dist = d;
                    faces_[f].far_point = idx;
                }
                return;
            }
        }
        // Inside every face: interior, dropped.
    }

    void refine() {
        while (!work_.empty()) {
            const std::size_t seed = work_.back();
            work_.pop_back();
            if (!faces_[seed].alive || faces_[seed].conflicts.empty()) continue;
            const std::size_t apex = faces_[seed].far_point;

            // Flood the region visible from the apex; edges to non-visible
            // neighbors form the horizon.
            std::vector<std::size_t> visible{seed};
            std::set<std::size_t> seen{seed};
            std::vector<std::pair<std::size_t, std::size_t>> horizon;
            for (std::size_t k = 0; k < visible.size(); ++k) {
                const Face face = faces_[visible[k]];  // copy: faces_ may grow later
                for (int e = 0; e < 3; ++e) {
                    const std::size_t a = face.v[e];
                    const std::size_t b = face.v[(e + 1) % 3];
                    const auto it = edge_face_.find(edge_key(b, a));
                    if (it == edge_face_.end()) {  // unowned edge: close the cone over it
                        horizon.emplace_back(a, b);
                        continue;
                    }
                    const std::size_t nb = it->second;
                    if (seen.count(nb)) continue;
                    if (dist_to(faces_[nb], apex) > eps_) {
                        seen.insert(nb);
                        visible.push_back(nb);
                    } else {
                        horizon.emplace_back(a, b);
                    }
                }
            }

            std::vector<std::size_t> orphans;
            for (const std::size_t f : visible) {
                for (const std::size_t idx : faces_[f].conflicts) {
                    if (idx != apex) orphans.push_back(idx);
                }
                faces_[f].alive = false;
                faces_[f].conflicts.clear();
                unregister_edges(f);
            }

            std::vector<std::size_t> fresh;
            for (const auto& [a, b] : horizon) {
                fresh.push_back(make_face(a, b, apex, /*allow_flip=*/false));
            }
            for (const std::size_t idx : orphans) {
                for (const std::size_t f : fresh) {
                    const double d = dist_to(faces_[f], idx);
                    if (d > eps_) {
                        faces_[f].conflicts.push_back(idx);
                        if (d > faces_[f].far_dist) {
                            faces_[f].far_dist = d;
                            faces_[f].far_point = idx;
                        }
                        break;
                    }
                }
            }
            for (const std::size_t f : fresh) {
                if (!faces_[f].conflicts.empty()) work_.push_back(f);
            }
        }
    }

    std::vector<std::size_t> collect_vertices() const {
        std::set<std::size_t> verts;
        for (const Face& f : faces_) {
            if (!f.alive) continue;
            verts.insert(f.v.begin(), f.v.end());
        }
        return {verts.begin(), verts.end()};
    }

    const std::vector<Eigen::Vector3d>& pts_;
    std::vector<Face> faces_;
    std::unordered_map<std::uint64_t, std::size_t> edge_face_;
    std::vector<std::size_t> work_;
    Eigen::Vector3d interior_ = Eigen::Vector3d::Zero();
    double eps_ = 1e-12;
};

}  // namespace

std::optional<std::vector<std::size_t>> convex_hull_vertices(
    const std::vector<Eigen::Vector3d>& points) {
    return QuickHull(points).run();
}

}  // namespace sonoptic
