#include "avrplan/raycast.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "avrplan/errors.hpp"

namespace avrplan {

namespace {

bool lex_less(const Vec3& a, const Vec3& b) {
    if (a.x() != b.x()) return a.x() < b.x();
    if (a.y() != b.y()) return a.y() < b.y();
    return a.z() < b.z();
}

Ray canonical_segment(const Vec3& from, const Vec3& to) {
    return lex_less(to, from) ? Ray::segment(to, from) : Ray::segment(from, to);
}

// Slab test against a box padded by a relative margin, so a box never
// rejects a ray that the exact triangle test would accept.
bool ray_hits_box(const Ray& ray, const Aabb& box) {
    double t0 = 0.0, t1 = ray.max_t;
    for (int axis = 0; axis < 3; ++axis) {
        const double pad = 1e-9 * (1.0 + std::max(std::abs(box.min[axis]), std::abs(box.max[axis])));
        const double lo = box.min[axis] - pad, hi = box.max[axis] + pad;
        const double o = ray.origin[axis], d = ray.direction[axis];
        if (std::abs(d) < 1e-300) {
            if (o < lo || o > hi) return false;
            continue;
        }
        double ta = (lo - o) / d, tb = (hi - o) / d;
        if (ta > tb) std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
        if (t0 > t1) return false;
    }
    return true;
}

double box_distance_sq(const Vec3& p, const Aabb& box) {
    const Vec3 d = (box.min - p).cwiseMax(Vec3::Zero()).cwiseMax(p - box.max);
    return d.squaredNorm();
}

} // namespace

Ray Ray::segment(const Vec3& from, const Vec3& to) {
    const Vec3 delta = to - from;
    const double length = delta.norm();
    if (!(length > 0.0)) throw InvalidArgument("segment endpoints coincide");
    return Ray{from, delta / length, length};
}

bool ray_hits_triangle(const Ray& ray, const Triangle& tri) {
    const Vec3 e1 = tri.b - tri.a;
    const Vec3 e2 = tri.c - tri.a;
    const Vec3 p = ray.direction.cross(e2);
    const double det = e1.dot(p);
    if (std::abs(det) < 1e-15 * e1.norm() * e2.norm()) return false;
    const double inv = 1.0 / det;
    const Vec3 s = ray.origin - tri.a;
    const double u = s.dot(p) * inv;
    if (u < 0.0 || u > 1.0) return false;
    const Vec3 q = s.cross(e1);
    const double v = ray.direction.dot(q) * inv;
    if (v < 0.0 || u + v > 1.0) return false;
    const double t = e2.dot(q) * inv;
    const double guard = kSegmentGuard * ray.max_t;
    return t > guard && t < ray.max_t - guard;
}

bool segment_hits_triangle(const Vec3& from, const Vec3& to, const Triangle& tri) {
    return ray_hits_triangle(canonical_segment(from, to), tri);
}

Triangle triangle_of(const TriangleMesh& mesh, std::size_t face) {
    return {mesh.corner(face, 0), mesh.corner(face, 1), mesh.corner(face, 2)};
}

// Region-based closest point (Ericson, Real-Time Collision Detection 5.1.5).
Vec3 closest_point_on_triangle(const Vec3& p, const Triangle& tri) {
    const Vec3 ab = tri.b - tri.a, ac = tri.c - tri.a, ap = p - tri.a;
    const double d1 = ab.dot(ap), d2 = ac.dot(ap);
    if (d1 <= 0.0 && d2 <= 0.0) return tri.a;
    const Vec3 bp = p - tri.b;
    const double d3 = ab.dot(bp), d4 = ac.dot(bp);
    if (d3 >= 0.0 && d4 <= d3) return tri.b;
    const double vc = d1 * d4 - d3 * d2;
    if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return tri.a + (d1 / (d1 - d3)) * ab;
    const Vec3 cp = p - tri.c;
    const double d5 = ab.dot(cp), d6 = ac.dot(cp);
    if (d6 >= 0.0 && d5 <= d6) return tri.c;
    const double vb = d5 * d2 - d1 * d6;
    if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return tri.a + (d2 / (d2 - d6)) * ac;
    const double va = d3 * d6 - d5 * d4;
    if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0)
        return tri.b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (tri.c - tri.b);
    const double denom = 1.0 / (va + vb + vc);
    return tri.a + ab * (vb * denom) + ac * (vc * denom);
}

Bvh::Bvh(const TriangleMesh& mesh) {
    const auto n = static_cast<std::uint32_t>(mesh.face_count());
    if (n == 0) return;
    std::vector<std::uint32_t> order(n);
    std::vector<Vec3> centroids(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        order[i] = i;
        centroids[i] = mesh.centroid(i);
    }
    nodes_.reserve(2 * n);
    tris_.reserve(n);
    face_ids_.reserve(n);
    std::vector<Triangle> source(n);
    for (std::uint32_t i = 0; i < n; ++i) source[i] = triangle_of(mesh, i);
    build(order, centroids, 0, n);
    for (auto f : order) {
        tris_.push_back(source[f]);
        face_ids_.push_back(f);
    }
    // Children follow their parent in preorder, so a reverse sweep sees them first.
    for (std::size_t i = nodes_.size(); i-- > 0;) {
        Node& node = nodes_[i];
        node.box = Aabb{};
        if (node.count > 0) {
            for (std::uint32_t t = node.first; t < node.first + node.count; ++t) {
                node.box.extend(tris_[t].a);
                node.box.extend(tris_[t].b);
                node.box.extend(tris_[t].c);
            }
        } else {
            node.box.extend(nodes_[i + 1].box);
            node.box.extend(nodes_[node.first].box);
        }
    }
}

std::uint32_t Bvh::build(std::vector<std::uint32_t>& order, std::vector<Vec3>& centroids, std::uint32_t begin,
                         std::uint32_t end) {
    constexpr std::uint32_t kLeafSize = 4;
    const auto index = static_cast<std::uint32_t>(nodes_.size());
    nodes_.emplace_back();
    Aabb centroid_box;
    for (std::uint32_t i = begin; i < end; ++i) centroid_box.extend(centroids[order[i]]);
    const Vec3 extent = centroid_box.extent();
    int axis = 0;
    if (extent.y() > extent[axis]) axis = 1;
    if (extent.z() > extent[axis]) axis = 2;

    if (end - begin <= kLeafSize || extent[axis] <= 0.0) {
        nodes_[index].first = begin;
        nodes_[index].count = end - begin;
        return index;
    }
    const std::uint32_t mid = begin + (end - begin) / 2;
    std::nth_element(order.begin() + begin, order.begin() + mid, order.begin() + end,
                     [&](std::uint32_t a, std::uint32_t b) {
                         const double ca = centroids[a][axis], cb = centroids[b][axis];
                         return ca != cb ? ca < cb : a < b;
                     });
    build(order, centroids, begin, mid);
    const std::uint32_t right = build(order, centroids, mid, end);
    nodes_[index].first = right;
    nodes_[index].count = 0;
    return index;
}

bool Bvh::occluded(const Vec3& from, const Vec3& to) const {
    if (nodes_.empty()) return false;
    const Ray ray = canonical_segment(from, to);
    std::uint32_t stack[128];
    int top = 0;
    stack[top++] = 0;
    while (top > 0) {
        const Node& node = nodes_[stack[--top]];
        if (!ray_hits_box(ray, node.box)) continue;
        if (node.count > 0) {
            for (std::uint32_t i = node.first; i < node.first + node.count; ++i)
                if (ray_hits_triangle(ray, tris_[i])) return true;
        } else {
            const auto self = static_cast<std::uint32_t>(&node - nodes_.data());
            stack[top++] = self + 1;
            stack[top++] = node.first;
        }
    }
    return false;
}

ClosestPoint Bvh::closest_point(const Vec3& p) const {
    if (nodes_.empty()) throw EmptySceneError("closest point query on an empty mesh");
    ClosestPoint best;
    double best_sq = std::numeric_limits<double>::infinity();
    std::uint32_t stack[128];
    int top = 0;
    stack[top++] = 0;
    while (top > 0) {
        const std::uint32_t idx = stack[--top];
        const Node& node = nodes_[idx];
        if (box_distance_sq(p, node.box) >= best_sq) continue;
        if (node.count > 0) {
            for (std::uint32_t i = node.first; i < node.first + node.count; ++i) {
                const Vec3 q = closest_point_on_triangle(p, tris_[i]);
                const double dsq = (q - p).squaredNorm();
                if (dsq < best_sq || (dsq == best_sq && face_ids_[i] < best.face)) {
                    best_sq = dsq;
                    best.point = q;
                    best.face = face_ids_[i];
                }
            }
        } else {
            const std::uint32_t left = idx + 1, right = node.first;
            const double dl = box_distance_sq(p, nodes_[left].box), dr = box_distance_sq(p, nodes_[right].box);
            if (dl < dr) {
                stack[top++] = right;
                stack[top++] = left;
            } else {
                stack[top++] = left;
                stack[top++] = right;
            }
        }
    }
    best.distance = std::sqrt(best_sq);
    return best;
}

} // namespace avrplan
