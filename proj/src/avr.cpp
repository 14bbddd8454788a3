#include "avrplan/avr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "avrplan/errors.hpp"
#include "avrplan/geometry2d.hpp"
#include "avrplan/rng.hpp"

namespace avrplan {

namespace {

constexpr std::size_t kMaxClusters = 50;
constexpr int kMaxLloydIterations = 200;
// Automatic cluster count: one cluster per (1.5 d)^2 of surface, and no
// member farther than 4 d from its cluster centroid.
constexpr double kClusterScale = 1.5;
constexpr double kClusterSpread = 4.0;
// Planes closer than this to parallel are not cut against each other.
const double kMinCutAngle = 10.0 * std::numbers::pi / 180.0;

Vec3 any_perpendicular(const Vec3& n) {
    const Vec3 helper = std::abs(n.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
    return n.cross(helper).normalized();
}

void finish_cluster(const TriangleMesh& mesh, FaceCluster& c) {
    std::sort(c.faces.begin(), c.faces.end());
    Vec3 n = Vec3::Zero(), p = Vec3::Zero();
    for (std::size_t f : c.faces) {
        n += mesh.normal(f);
        p += mesh.centroid(f);
    }
    c.centroid = p / static_cast<double>(c.faces.size());
    const double len = n.norm();
    // Opposing normals can cancel; fall back to the first member's normal.
    c.mean_normal = len > 1e-9 ? Vec3(n / len) : mesh.normal(c.faces.front());
}

ViewingRectangle rectangle_from_points(std::span<const Vec3> pts, const Vec3& mean_normal) {
    if (pts.empty()) throw DegenerateClusterError("cluster has no points");
    Vec3 mean = Vec3::Zero();
    for (const auto& p : pts) mean += p;
    mean /= static_cast<double>(pts.size());

    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (const auto& p : pts) cov += (p - mean) * (p - mean).transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
    const Eigen::Vector3d values = eig.eigenvalues();  // ascending
    Vec3 n;
    if (values(1) <= 1e-12 * std::max(values(2), 1e-300)) {
        n = mean_normal.normalized();
    } else {
        n = eig.eigenvectors().col(0).normalized();
        if (n.dot(mean_normal) < 0.0) n = -n;
        if (std::abs(n.dot(mean_normal)) < 1e-12) n = mean_normal.normalized();
    }

    const Vec3 e1 = any_perpendicular(n);
    const Vec3 e2 = n.cross(e1);
    std::vector<Vec2> flat;
    flat.reserve(pts.size());
    for (const auto& p : pts) flat.emplace_back((p - mean).dot(e1), (p - mean).dot(e2));
    const auto hull = convex_hull(flat);
    if (hull.size() < 3 || polygon_area(hull) <= 1e-12)
        throw DegenerateClusterError("elevated cluster points are collinear or coincident");
    const OrientedRect2 r2 = min_area_rectangle(hull);

    ViewingRectangle rect;
    rect.normal = n;
    rect.u = (r2.axis.x() * e1 + r2.axis.y() * e2).normalized();
    rect.v = n.cross(rect.u);
    rect.center = mean + r2.center.x() * e1 + r2.center.y() * e2;
    rect.half_u = r2.half_u;
    rect.half_v = r2.half_v;
    return rect;
}

// Crossing segment of a rectangle with a plane, as an interval along `dir`.
std::pair<double, double> crossing_interval(const ViewingRectangle& rect, const Vec3& plane_point,
                                            const Vec3& plane_normal, const Vec3& dir) {
    const auto c = rect.corners();
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (int i = 0; i < 4; ++i) {
        const Vec3& a = c[i];
        const Vec3& b = c[(i + 1) % 4];
        const double da = (a - plane_point).dot(plane_normal);
        const double db = (b - plane_point).dot(plane_normal);
        if (da == 0.0) {
            lo = std::min(lo, a.dot(dir));
            hi = std::max(hi, a.dot(dir));
        }
        if ((da < 0.0 && db > 0.0) || (da > 0.0 && db < 0.0)) {
            const Vec3 p = a + (da / (da - db)) * (b - a);
            lo = std::min(lo, p.dot(dir));
            hi = std::max(hi, p.dot(dir));
        }
    }
    return {lo, hi};
}

bool straddles(const ViewingRectangle& rect, const ViewingRectangle& plane, double tol) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& p : rect.corners()) {
        const double s = plane.signed_distance(p);
        lo = std::min(lo, s);
        hi = std::max(hi, s);
    }
    return lo < -tol && hi > tol;
}

std::vector<FaceCluster> try_fit(const TriangleMesh& mesh, std::span<const std::size_t> faces, std::size_t k,
                                 std::uint64_t seed, double d, std::vector<ViewingRectangle>& rects,
                                 std::vector<std::size_t>& degenerate) {
    auto clusters = cluster_faces(mesh, faces, k, seed);
    rects.assign(clusters.size(), ViewingRectangle{});
    degenerate.clear();
    for (std::size_t i = 0; i < clusters.size(); ++i) {
        try {
            rects[i] = fit_rectangle(mesh, clusters[i], d);
        } catch (const DegenerateClusterError&) {
            degenerate.push_back(i);
        }
    }
    return clusters;
}

} // namespace

std::array<Vec3, 4> ViewingRectangle::corners() const {
    const Vec3 a = half_u * u, b = half_v * v;
    return {center - a - b, center + a - b, center + a + b, center - a + b};
}

bool ViewingRectangle::contains(const Vec3& p, double tol) const {
    const Vec3 q = p - center;
    return std::abs(q.dot(normal)) <= tol && std::abs(q.dot(u)) <= half_u + tol && std::abs(q.dot(v)) <= half_v + tol;
}

std::vector<FaceCluster> cluster_faces(const TriangleMesh& mesh, std::span<const std::size_t> faces, std::size_t k,
                                       std::uint64_t seed) {
    const std::size_t n = faces.size();
    if (k == 0) throw InvalidArgument("cluster count must be at least 1");
    if (k > n) throw InvalidArgument("cluster count exceeds face count");

    std::vector<Vec3> pts(n);
    for (std::size_t i = 0; i < n; ++i) pts[i] = mesh.centroid(faces[i]);

    // k-means++ seeding.
    Rng rng(seed);
    std::vector<Vec3> centers;
    centers.reserve(k);
    centers.push_back(pts[rng.index(n)]);
    std::vector<double> d2(n);
    for (std::size_t i = 0; i < n; ++i) d2[i] = (pts[i] - centers[0]).squaredNorm();
    while (centers.size() < k) {
        const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
        std::size_t pick = 0;
        if (total > 0.0) {
            double target = rng.uniform() * total, acc = 0.0;
            pick = n - 1;
            for (std::size_t i = 0; i < n; ++i) {
                acc += d2[i];
                if (acc > target && d2[i] > 0.0) {
                    pick = i;
                    break;
                }
            }
        } else {
            pick = rng.index(n);
        }
        centers.push_back(pts[pick]);
        for (std::size_t i = 0; i < n; ++i) d2[i] = std::min(d2[i], (pts[i] - centers.back()).squaredNorm());
    }

    std::vector<std::size_t> assign(n, k);
    for (int iter = 0; iter < kMaxLloydIterations; ++iter) {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < centers.size(); ++c) {
                const double dd = (pts[i] - centers[c]).squaredNorm();
                if (dd < best_d) {
                    best_d = dd;
                    best = c;
                }
            }
            if (assign[i] != best) {
                assign[i] = best;
                changed = true;
            }
        }
        std::vector<Vec3> sum(centers.size(), Vec3::Zero());
        std::vector<std::size_t> count(centers.size(), 0);
        for (std::size_t i = 0; i < n; ++i) {
            sum[assign[i]] += pts[i];
            ++count[assign[i]];
        }
        for (std::size_t c = 0; c < centers.size(); ++c) {
            if (count[c] > 0) {
                centers[c] = sum[c] / static_cast<double>(count[c]);
                continue;
            }
            // Re-seed an empty cluster at the point farthest from its center.
            std::size_t far = 0;
            double far_d = -1.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double dd = (pts[i] - centers[assign[i]]).squaredNorm();
                if (dd > far_d) {
                    far_d = dd;
                    far = i;
                }
            }
            centers[c] = pts[far];
            if (count[assign[far]] > 1) {
                --count[assign[far]];
                assign[far] = c;
                count[c] = 1;
            }
            changed = true;
        }
        if (!changed) break;
    }

    std::vector<FaceCluster> clusters(centers.size());
    for (std::size_t i = 0; i < n; ++i) clusters[assign[i]].faces.push_back(faces[i]);
    std::erase_if(clusters, [](const FaceCluster& c) { return c.faces.empty(); });
    for (auto& c : clusters) finish_cluster(mesh, c);
    return clusters;
}

double clustering_sse(const TriangleMesh& mesh, std::span<const FaceCluster> clusters) {
    double sse = 0.0;
    for (const auto& c : clusters)
        for (std::size_t f : c.faces) sse += (mesh.centroid(f) - c.centroid).squaredNorm();
    return sse;
}

ViewingRectangle fit_rectangle(std::span<const Vec3> elevated_points, const Vec3& mean_normal) {
    return rectangle_from_points(elevated_points, mean_normal);
}

ViewingRectangle fit_rectangle(const TriangleMesh& mesh, const FaceCluster& cluster, double d) {
    std::vector<Vec3> pts;
    pts.reserve(cluster.faces.size());
    for (std::size_t f : cluster.faces) pts.push_back(mesh.centroid(f) + d * cluster.mean_normal);
    return rectangle_from_points(pts, cluster.mean_normal);
}

bool rectangles_intersect(const ViewingRectangle& a, const ViewingRectangle& b, double tol) {
    const Vec3 line = a.normal.cross(b.normal);
    if (line.norm() < std::sin(kMinCutAngle)) return false;
    if (!straddles(a, b, tol) || !straddles(b, a, tol)) return false;
    const Vec3 dir = line.normalized();
    const auto [alo, ahi] = crossing_interval(a, b.center, b.normal, dir);
    const auto [blo, bhi] = crossing_interval(b, a.center, a.normal, dir);
    return std::min(ahi, bhi) - std::max(alo, blo) > tol;
}

ViewingRectangle keep_larger_piece(const ViewingRectangle& rect, const ViewingRectangle& other) {
    // Signed distance to the other plane, as an affine function of rect's
    // plane coordinates: c0 + g.p.
    const double c0 = other.signed_distance(rect.center);
    const Vec2 g(rect.u.dot(other.normal), rect.v.dot(other.normal));
    if (g.norm() < 1e-15) return rect;

    const std::vector<Vec2> poly{{-rect.half_u, -rect.half_v},
                                 {rect.half_u, -rect.half_v},
                                 {rect.half_u, rect.half_v},
                                 {-rect.half_u, rect.half_v}};
    const auto pos = clip_half_plane(poly, g, -c0);
    const auto neg = clip_half_plane(poly, -g, c0);
    const double apos = pos.size() >= 3 ? std::abs(polygon_area(pos)) : 0.0;
    const double aneg = neg.size() >= 3 ? std::abs(polygon_area(neg)) : 0.0;
    double sign = 1.0;
    if (std::abs(apos - aneg) <= 1e-12 * rect.area()) {
        const double dpos = pos.size() >= 3 ? std::abs(c0 + g.dot(polygon_centroid(pos))) : 0.0;
        const double dneg = neg.size() >= 3 ? std::abs(c0 + g.dot(polygon_centroid(neg))) : 0.0;
        if (dneg > dpos) sign = -1.0;
    } else if (aneg > apos) {
        sign = -1.0;
    }

    // Largest axis-aligned rectangle on the kept side. It shares the source
    // corner F farthest into that side and extends X, Y back from it subject
    // to |Gx| X + |Gy| Y <= s.
    const Vec2 G = sign * g;
    const double c = sign * c0;
    const double fx = G.x() >= 0.0 ? rect.half_u : -rect.half_u;
    const double fy = G.y() >= 0.0 ? rect.half_v : -rect.half_v;
    const double s = c + G.x() * fx + G.y() * fy;
    const double ax = std::abs(G.x()), ay = std::abs(G.y());
    const double wmax = 2.0 * rect.half_u, hmax = 2.0 * rect.half_v;
    const double tiny = 1e-15;

    std::vector<std::pair<double, double>> candidates{{wmax, hmax}};
    if (ax > tiny && ay > tiny) {
        candidates.emplace_back(s / (2.0 * ax), s / (2.0 * ay));
        candidates.emplace_back(wmax, (s - ax * wmax) / ay);
        candidates.emplace_back((s - ay * hmax) / ax, hmax);
    } else if (ax > tiny) {
        candidates.emplace_back(s / ax, hmax);
    } else {
        candidates.emplace_back(wmax, s / ay);
    }
    double best_x = 0.0, best_y = 0.0, best_area = -1.0;
    for (auto [x, y] : candidates) {
        x = std::clamp(x, 0.0, wmax);
        y = std::clamp(y, 0.0, hmax);
        if (ax * x + ay * y > s * (1.0 + 1e-12) + 1e-15) continue;
        if (x * y > best_area) {
            best_area = x * y;
            best_x = x;
            best_y = y;
        }
    }

    ViewingRectangle out = rect;
    const double sx = G.x() >= 0.0 ? 1.0 : -1.0, sy = G.y() >= 0.0 ? 1.0 : -1.0;
    out.center = rect.from_plane(Vec2(fx - sx * best_x / 2.0, fy - sy * best_y / 2.0));
    out.half_u = best_x / 2.0;
    out.half_v = best_y / 2.0;
    return out;
}

std::vector<ViewingRectangle> merge_intersecting(std::vector<ViewingRectangle> rects) {
    bool again = true;
    while (again) {
        again = false;
        for (std::size_t i = 0; i < rects.size() && !again; ++i) {
            for (std::size_t j = i + 1; j < rects.size() && !again; ++j) {
                if (!rectangles_intersect(rects[i], rects[j])) continue;
                const ViewingRectangle a = keep_larger_piece(rects[i], rects[j]);
                const ViewingRectangle b = keep_larger_piece(rects[j], rects[i]);
                rects[i] = a;
                rects[j] = b;
                again = true;
            }
        }
    }
    return rects;
}

ViewingRectangle widen(ViewingRectangle rect, double min_side) {
    rect.half_u = std::max(rect.half_u, 0.5 * min_side);
    rect.half_v = std::max(rect.half_v, 0.5 * min_side);
    return rect;
}

std::size_t default_cluster_count(const TriangleMesh& mesh, std::span<const std::size_t> faces, double d,
                                  std::uint64_t seed) {
    if (faces.empty()) return 1;
    double area = 0.0;
    for (std::size_t f : faces) area += mesh.area(f);
    const std::size_t cap = std::min(kMaxClusters, faces.size());
    const double scale = kClusterScale * d;
    std::size_t k = static_cast<std::size_t>(std::ceil(area / (scale * scale)));
    k = std::clamp<std::size_t>(k, 1, cap);
    for (; k < cap; ++k) {
        const auto clusters = cluster_faces(mesh, faces, k, seed);
        double spread = 0.0;
        for (const auto& c : clusters)
            for (std::size_t f : c.faces) spread = std::max(spread, (mesh.centroid(f) - c.centroid).norm());
        if (spread <= kClusterSpread * d) break;
    }
    return k;
}

std::vector<AvrPatch> build_avr(const TriangleMesh& mesh, std::span<const std::size_t> faces,
                                const QualityParams& params, const AvrOptions& options) {
    if (mesh.empty()) throw EmptySceneError("cannot build viewing rectangles for an empty mesh");
    std::vector<std::size_t> all;
    if (faces.empty()) {
        all.resize(mesh.face_count());
        std::iota(all.begin(), all.end(), std::size_t{0});
        faces = all;
    }
    std::size_t k = options.k > 0 ? options.k : default_cluster_count(mesh, faces, params.d, options.seed);
    k = std::min(k, faces.size());

    std::vector<ViewingRectangle> rects;
    std::vector<std::size_t> degenerate;
    auto clusters = try_fit(mesh, faces, k, options.seed, params.d, rects, degenerate);
    if (!degenerate.empty() && k > 1)
        clusters = try_fit(mesh, faces, k - 1, options.seed, params.d, rects, degenerate);
    // Small clusters whose centroids are collinear fall back to their face
    // corners, which always span an area.
    for (std::size_t i : degenerate) {
        std::vector<Vec3> pts;
        for (std::size_t f : clusters[i].faces)
            for (int c = 0; c < 3; ++c) pts.push_back(mesh.corner(f, c) + params.d * clusters[i].mean_normal);
        rects[i] = fit_rectangle(pts, clusters[i].mean_normal);
    }

    rects = merge_intersecting(std::move(rects));
    std::vector<AvrPatch> out;
    out.reserve(rects.size());
    for (std::size_t i = 0; i < rects.size(); ++i) {
        out.push_back({options.resolution > 0.0 ? widen(rects[i], options.resolution) : rects[i],
                       std::move(clusters[i])});
    }
    return out;
}

} // namespace avrplan
