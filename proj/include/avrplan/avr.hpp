#ifndef AVRPLAN_AVR_HPP_
#define AVRPLAN_AVR_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "avrplan/mesh.hpp"
#include "avrplan/quality.hpp"

namespace avrplan {

struct FaceCluster {
    std::vector<std::size_t> faces;  // ascending face indices
    Vec3 mean_normal = Vec3::UnitZ();
    Vec3 centroid = Vec3::Zero();  // mean of member face centroids
};

// Planar rectangle of candidate camera positions. {u, v, normal} is a
// right-handed orthonormal frame; normal points away from the scene.
struct ViewingRectangle {
    Vec3 center = Vec3::Zero();
    Vec3 normal = Vec3::UnitZ();
    Vec3 u = Vec3::UnitX();
    Vec3 v = Vec3::UnitY();
    double half_u = 0.0;
    double half_v = 0.0;

    double width() const { return 2.0 * half_u; }
    double height() const { return 2.0 * half_v; }
    double area() const { return 4.0 * half_u * half_v; }

    Vec2 to_plane(const Vec3& p) const { return Vec2((p - center).dot(u), (p - center).dot(v)); }
    Vec3 from_plane(const Vec2& q) const { return center + q.x() * u + q.y() * v; }
    double signed_distance(const Vec3& p) const { return (p - center).dot(normal); }

    // Corners in counter-clockwise order around the normal.
    std::array<Vec3, 4> corners() const;

    // True if p lies on the plane and inside the rectangle, within tol (m).
    bool contains(const Vec3& p, double tol = 1e-9) const;
};

// Partition of the given faces by k-means on face centroids, seeded with
// k-means++. Empty clusters are re-seeded from the point farthest from its
// center. Clusters come back in center order.
std::vector<FaceCluster> cluster_faces(const TriangleMesh& mesh, std::span<const std::size_t> faces, std::size_t k,
                                       std::uint64_t seed);

// Sum of squared distances from member centroids to their cluster centroid.
double clustering_sse(const TriangleMesh& mesh, std::span<const FaceCluster> clusters);

// Fits a rectangle to the points elevated along `mean_normal`: total least
// squares plane, then the minimum-area enclosing rectangle of the projections.
// Throws DegenerateClusterError when the projections have no area.
ViewingRectangle fit_rectangle(std::span<const Vec3> elevated_points, const Vec3& mean_normal);

// Elevates member centroids by d along the cluster mean normal and fits.
ViewingRectangle fit_rectangle(const TriangleMesh& mesh, const FaceCluster& cluster, double d);

// Transversal intersection: each rectangle has points strictly on both sides
// of the other's plane and the two cross the shared line over a segment of
// positive length. Rectangles whose planes are within 10 degrees of parallel,
// and touching rectangles, do not intersect.
bool rectangles_intersect(const ViewingRectangle& a, const ViewingRectangle& b, double tol = 1e-9);

// Cuts `rect` by the plane of `other` and keeps the larger piece, reduced to
// the largest rectangle in rect's own axes that stays on that side.
ViewingRectangle keep_larger_piece(const ViewingRectangle& rect, const ViewingRectangle& other);

// Replaces both members of every intersecting pair by their larger pieces
// until no pair intersects. Output i is contained in input i.
std::vector<ViewingRectangle> merge_intersecting(std::vector<ViewingRectangle> rects);

struct AvrPatch {
    ViewingRectangle rect;
    FaceCluster cluster;
};

struct AvrOptions {
    std::size_t k = 0;           // 0 picks the cluster count automatically
    double resolution = 0.0;     // minimum rectangle width (m); 0 disables widening
    std::uint64_t seed = 1;
};

// Cluster count for an automatic plan: ceil(area / (1.5d)^2), then raised until
// no member centroid lies farther than 4d from its cluster centroid; clamped
// to [1, 50] and to the face count.
std::size_t default_cluster_count(const TriangleMesh& mesh, std::span<const std::size_t> faces, double d,
                                  std::uint64_t seed);

// Clusters the faces (all faces when `faces` is empty), fits one rectangle
// per cluster, merges intersecting rectangles and widens any side shorter
// than the resolution.
std::vector<AvrPatch> build_avr(const TriangleMesh& mesh, std::span<const std::size_t> faces,
                                const QualityParams& params, const AvrOptions& options);

// Widens a rectangle symmetrically so that both sides are at least `min_side`.
ViewingRectangle widen(ViewingRectangle rect, double min_side);

} // namespace avrplan

#endif
