#include "avrplan/mesh.hpp"

#include <map>
#include <utility>

#include "avrplan/errors.hpp"

namespace avrplan {

TriangleMesh::TriangleMesh(std::vector<Vec3> vertices, std::vector<Face> faces)
    : vertices_(std::move(vertices)) {
    faces_.reserve(faces.size());
    centroids_.reserve(faces.size());
    normals_.reserve(faces.size());
    areas_.reserve(faces.size());
    for (const Face& f : faces) {
        for (auto idx : f) {
            if (idx >= vertices_.size()) {
                throw InvalidArgument("face references vertex " + std::to_string(idx) + " of " +
                                      std::to_string(vertices_.size()));
            }
        }
        const Vec3& a = vertices_[f[0]];
        const Vec3& b = vertices_[f[1]];
        const Vec3& c = vertices_[f[2]];
        const Vec3 cross = (b - a).cross(c - a);
        const double twice_area = cross.norm();
        if (0.5 * twice_area <= kDegenerateArea) {
            ++dropped_;
            continue;
        }
        faces_.push_back(f);
        centroids_.push_back((a + b + c) / 3.0);
        normals_.push_back(cross / twice_area);
        areas_.push_back(0.5 * twice_area);
    }
}

double TriangleMesh::total_area() const {
    double sum = 0.0;
    for (double a : areas_) sum += a;
    return sum;
}

Aabb TriangleMesh::bounds() const {
    Aabb box;
    for (const Face& f : faces_) {
        for (auto idx : f) box.extend(vertices_[idx]);
    }
    return box;
}

TriangleMesh TriangleMesh::submesh(std::span<const std::size_t> faces) const {
    std::vector<std::int64_t> remap(vertices_.size(), -1);
    std::vector<Vec3> verts;
    std::vector<Face> out;
    out.reserve(faces.size());
    for (std::size_t f : faces) {
        Face nf{};
        for (int k = 0; k < 3; ++k) {
            const auto v = faces_.at(f)[k];
            if (remap[v] < 0) {
                remap[v] = static_cast<std::int64_t>(verts.size());
                verts.push_back(vertices_[v]);
            }
            nf[k] = static_cast<std::uint32_t>(remap[v]);
        }
        out.push_back(nf);
    }
    return TriangleMesh(std::move(verts), std::move(out));
}

TriangleMesh concatenate(const TriangleMesh& a, const TriangleMesh& b) {
    std::vector<Vec3> verts = a.vertices();
    std::vector<Face> faces = a.faces();
    const auto offset = static_cast<std::uint32_t>(verts.size());
    verts.insert(verts.end(), b.vertices().begin(), b.vertices().end());
    for (const Face& f : b.faces()) faces.push_back({f[0] + offset, f[1] + offset, f[2] + offset});
    return TriangleMesh(std::move(verts), std::move(faces));
}

TriangleMesh subdivide_large_faces(const TriangleMesh& mesh, double max_area) {
    if (!(max_area > 0.0)) throw InvalidArgument("subdivision area limit must be positive");
    std::vector<Vec3> verts = mesh.vertices();
    std::vector<Face> faces = mesh.faces();
    bool changed = true;
    while (changed) {
        changed = false;
        std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> midpoints;
        auto midpoint = [&](std::uint32_t i, std::uint32_t j) {
            const auto key = std::minmax(i, j);
            auto it = midpoints.find(key);
            if (it != midpoints.end()) return it->second;
            const auto idx = static_cast<std::uint32_t>(verts.size());
            verts.push_back(0.5 * (verts[i] + verts[j]));
            midpoints.emplace(key, idx);
            return idx;
        };
        std::vector<Face> next;
        next.reserve(faces.size());
        for (const Face& f : faces) {
            const double area =
                0.5 * (verts[f[1]] - verts[f[0]]).cross(verts[f[2]] - verts[f[0]]).norm();
            if (area <= max_area) {
                next.push_back(f);
                continue;
            }
            changed = true;
            const auto ab = midpoint(f[0], f[1]);
            const auto bc = midpoint(f[1], f[2]);
            const auto ca = midpoint(f[2], f[0]);
            next.push_back({f[0], ab, ca});
            next.push_back({ab, f[1], bc});
            next.push_back({ca, bc, f[2]});
            next.push_back({ab, bc, ca});
        }
        faces = std::move(next);
    }
    return TriangleMesh(std::move(verts), std::move(faces));
}

} // namespace avrplan
