#ifndef AVRPLAN_RAYCAST_HPP_
#define AVRPLAN_RAYCAST_HPP_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "avrplan/mesh.hpp"

namespace avrplan {

// Hits closer than this fraction of the segment length to either endpoint are
// ignored, so a segment ending on a face centroid is not blocked by that face.
inline constexpr double kSegmentGuard = 1e-6;

struct Ray {
    Vec3 origin;
    Vec3 direction;  // unit length
    double max_t;    // > 0 (m)

    // Ray covering the segment from -> to; the endpoints must differ.
    static Ray segment(const Vec3& from, const Vec3& to);
};

struct Triangle {
    Vec3 a, b, c;
};

// Moller-Trumbore test with closed edges (hits on an edge or vertex count).
// Only hits with t in (guard, max_t - guard), guard = kSegmentGuard * max_t,
// are reported. Rays parallel to the triangle plane never hit.
bool ray_hits_triangle(const Ray& ray, const Triangle& tri);

// Segment test used by every occlusion query. Endpoints are ordered
// lexicographically first so the result is symmetric in (from, to).
bool segment_hits_triangle(const Vec3& from, const Vec3& to, const Triangle& tri);

Triangle triangle_of(const TriangleMesh& mesh, std::size_t face);

struct ClosestPoint {
    Vec3 point;
    std::size_t face = 0;
    double distance = 0.0;
};

Vec3 closest_point_on_triangle(const Vec3& p, const Triangle& tri);

// Bounding-volume hierarchy over the faces of a mesh. Immutable after
// construction; concurrent queries are safe.
class Bvh {
public:
    Bvh() = default;
    explicit Bvh(const TriangleMesh& mesh);

    // True iff some face crosses the open segment (from, to). Identical to
    // testing every face with segment_hits_triangle.
    bool occluded(const Vec3& from, const Vec3& to) const;

    // Nearest surface point; the mesh must be non-empty.
    ClosestPoint closest_point(const Vec3& p) const;

    std::size_t size() const { return tris_.size(); }
    std::size_t node_count() const { return nodes_.size(); }

private:
    struct Node {
        Aabb box;
        std::uint32_t first = 0;  // first triangle (leaf) or left child index (inner)
        std::uint32_t count = 0;  // triangles in a leaf; 0 for inner nodes
    };

    std::uint32_t build(std::vector<std::uint32_t>& order, std::vector<Vec3>& centroids, std::uint32_t begin,
                        std::uint32_t end);

    std::vector<Node> nodes_;
    std::vector<Triangle> tris_;
    std::vector<std::uint32_t> face_ids_;
};

// Mesh bundled with its acceleration structure.
class Scene {
public:
    Scene() = default;
    explicit Scene(TriangleMesh mesh) : mesh_(std::move(mesh)), bvh_(mesh_) {}

    const TriangleMesh& mesh() const { return mesh_; }
    const Bvh& bvh() const { return bvh_; }

private:
    TriangleMesh mesh_;
    Bvh bvh_;
};

inline bool raycast_occluded(const Scene& scene, const Vec3& from, const Vec3& to) {
    return scene.bvh().occluded(from, to);
}

} // namespace avrplan

#endif
