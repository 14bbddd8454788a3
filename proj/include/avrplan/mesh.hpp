#ifndef AVRPLAN_MESH_HPP_
#define AVRPLAN_MESH_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace avrplan {

using Vec3 = Eigen::Vector3d;
using Vec2 = Eigen::Vector2d;
using Face = std::array<std::uint32_t, 3>;

// Faces with area at or below this value (m^2) are dropped at construction.
inline constexpr double kDegenerateArea = 1e-12;

struct Aabb {
    Vec3 min = Vec3::Constant(std::numeric_limits<double>::infinity());
    Vec3 max = Vec3::Constant(-std::numeric_limits<double>::infinity());

    void extend(const Vec3& p) {
        min = min.cwiseMin(p);
        max = max.cwiseMax(p);
    }
    void extend(const Aabb& b) {
        min = min.cwiseMin(b.min);
        max = max.cwiseMax(b.max);
    }
    bool empty() const { return (min.array() > max.array()).any(); }
    Vec3 extent() const { return max - min; }
    Vec3 center() const { return 0.5 * (min + max); }
};

// Immutable triangle mesh with per-face centroid, unit normal and area cached.
class TriangleMesh {
public:
    TriangleMesh() = default;

    // Out-of-range vertex indices throw InvalidArgument. Zero-area faces are
    // dropped and counted in dropped_faces().
    TriangleMesh(std::vector<Vec3> vertices, std::vector<Face> faces);

    std::size_t vertex_count() const { return vertices_.size(); }
    std::size_t face_count() const { return faces_.size(); }
    bool empty() const { return faces_.empty(); }

    const std::vector<Vec3>& vertices() const { return vertices_; }
    const std::vector<Face>& faces() const { return faces_; }
    const Face& face(std::size_t f) const { return faces_[f]; }
    const Vec3& corner(std::size_t f, int k) const { return vertices_[faces_[f][k]]; }

    const Vec3& centroid(std::size_t f) const { return centroids_[f]; }
    const Vec3& normal(std::size_t f) const { return normals_[f]; }
    double area(std::size_t f) const { return areas_[f]; }

    std::size_t dropped_faces() const { return dropped_; }
    double total_area() const;
    Aabb bounds() const;

    // Mesh made of the listed faces only, with unused vertices removed.
    TriangleMesh submesh(std::span<const std::size_t> faces) const;

private:
    std::vector<Vec3> vertices_;
    std::vector<Face> faces_;
    std::vector<Vec3> centroids_;
    std::vector<Vec3> normals_;
    std::vector<double> areas_;
    std::size_t dropped_ = 0;
};

// Concatenates meshes; face order is a's faces followed by b's.
TriangleMesh concatenate(const TriangleMesh& a, const TriangleMesh& b);

// Splits every face with area above max_area into four by edge midpoints
// until no face exceeds it. Shared edges share midpoints.
TriangleMesh subdivide_large_faces(const TriangleMesh& mesh, double max_area);

enum class MeshFormat { obj, ply };

MeshFormat format_from_path(const std::filesystem::path& path);

TriangleMesh load_mesh(const std::filesystem::path& path, MeshFormat format);
TriangleMesh load_mesh(const std::filesystem::path& path);

TriangleMesh parse_obj(std::istream& in);
TriangleMesh parse_ply(std::istream& in);

void write_obj(const TriangleMesh& mesh, std::ostream& out);
void save_obj(const TriangleMesh& mesh, const std::filesystem::path& path);

enum class SceneKind { flat_terrain, box_field, canyon, loaded_file };

const char* to_string(SceneKind kind);
SceneKind scene_kind_from_string(const std::string& name);

struct SceneSpec {
    SceneKind kind = SceneKind::flat_terrain;
    double extent = 30.0;   // side of the square footprint (m)
    int obstacles = 3;
    std::uint64_t seed = 1;
    std::filesystem::path path;  // loaded_file only

    void validate() const;
};

// Terrain cell edge used by the generators (m). Keeps every face well below
// (d/4)^2 for the default viewing distance.
inline constexpr double kTerrainCell = 1.5;
// Each box side is tessellated into kBoxDivisions^2 quads.
inline constexpr int kBoxDivisions = 5;
// Boxes have four walls and a roof; the floor is the terrain.
inline constexpr std::size_t kBoxFaceCount = 5 * 2 * kBoxDivisions * kBoxDivisions;

TriangleMesh generate_scene(const SceneSpec& spec);

// Edge-collapse decimation to about ratio * face_count faces, then Gaussian
// displacement of every vertex along its vertex normal.
TriangleMesh degrade_proxy(const TriangleMesh& mesh, double decimation_ratio, double noise_sigma,
                           std::uint64_t seed);

} // namespace avrplan

#endif
