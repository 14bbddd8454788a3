#include <algorithm>
#include <cmath>
#include <queue>
#include <tuple>

#include "avrplan/errors.hpp"
#include "avrplan/mesh.hpp"
#include "avrplan/rng.hpp"

namespace avrplan {

namespace {

struct EdgeEntry {
    double length;
    std::uint32_t a, b;
    bool operator>(const EdgeEntry& o) const { return std::tie(length, a, b) > std::tie(o.length, o.a, o.b); }
};

class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n) {
        for (std::size_t i = 0; i < n; ++i) parent_[i] = static_cast<std::uint32_t>(i);
    }
    std::uint32_t find(std::uint32_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }
    void merge_into(std::uint32_t from, std::uint32_t to) { parent_[from] = to; }

private:
    std::vector<std::uint32_t> parent_;
};

// Shortest-edge-first collapse to the edge midpoint until at most target faces remain.
TriangleMesh decimate(const TriangleMesh& mesh, std::size_t target) {
    std::vector<Vec3> pos = mesh.vertices();
    std::vector<Face> faces = mesh.faces();
    std::vector<char> alive(faces.size(), 1);
    std::size_t alive_count = faces.size();
    std::vector<std::vector<std::uint32_t>> adjacency(pos.size());
    for (std::size_t f = 0; f < faces.size(); ++f)
        for (auto v : faces[f]) adjacency[v].push_back(static_cast<std::uint32_t>(f));

    UnionFind uf(pos.size());
    std::priority_queue<EdgeEntry, std::vector<EdgeEntry>, std::greater<>> heap;
    auto push_edge = [&](std::uint32_t a, std::uint32_t b) {
        if (a > b) std::swap(a, b);
        heap.push({(pos[a] - pos[b]).norm(), a, b});
    };
    for (const Face& f : faces)
        for (int k = 0; k < 3; ++k)
            if (f[k] < f[(k + 1) % 3]) push_edge(f[k], f[(k + 1) % 3]);
            else push_edge(f[(k + 1) % 3], f[k]);

    while (alive_count > target && !heap.empty()) {
        const EdgeEntry e = heap.top();
        heap.pop();
        const auto a = uf.find(e.a), b = uf.find(e.b);
        if (a == b) continue;
        const double length = (pos[a] - pos[b]).norm();
        if (std::min(a, b) != e.a || std::max(a, b) != e.b || length != e.length) {
            push_edge(a, b);
            continue;
        }
        const auto keep = std::min(a, b), drop = std::max(a, b);
        pos[keep] = 0.5 * (pos[keep] + pos[drop]);
        uf.merge_into(drop, keep);
        adjacency[keep].insert(adjacency[keep].end(), adjacency[drop].begin(), adjacency[drop].end());
        adjacency[drop].clear();

        std::vector<std::uint32_t> kept;
        std::vector<std::uint32_t> neighbours;
        for (auto f : adjacency[keep]) {
            if (!alive[f]) continue;
            Face& face = faces[f];
            for (auto& v : face) v = uf.find(v);
            if (face[0] == face[1] || face[1] == face[2] || face[0] == face[2]) {
                alive[f] = 0;
                --alive_count;
                continue;
            }
            kept.push_back(f);
            for (auto v : face)
                if (v != keep) neighbours.push_back(v);
        }
        std::sort(kept.begin(), kept.end());
        kept.erase(std::unique(kept.begin(), kept.end()), kept.end());
        adjacency[keep] = std::move(kept);
        std::sort(neighbours.begin(), neighbours.end());
        neighbours.erase(std::unique(neighbours.begin(), neighbours.end()), neighbours.end());
        for (auto n : neighbours) push_edge(keep, n);
    }

    std::vector<std::int64_t> remap(pos.size(), -1);
    std::vector<Vec3> verts;
    std::vector<Face> out;
    for (std::size_t f = 0; f < faces.size(); ++f) {
        if (!alive[f]) continue;
        Face nf{};
        for (int k = 0; k < 3; ++k) {
            const auto v = uf.find(faces[f][k]);
            if (remap[v] < 0) {
                remap[v] = static_cast<std::int64_t>(verts.size());
                verts.push_back(pos[v]);
            }
            nf[k] = static_cast<std::uint32_t>(remap[v]);
        }
        out.push_back(nf);
    }
    return TriangleMesh(std::move(verts), std::move(out));
}

} // namespace

TriangleMesh degrade_proxy(const TriangleMesh& mesh, double decimation_ratio, double noise_sigma,
                           std::uint64_t seed) {
    if (!(decimation_ratio > 0.0 && decimation_ratio <= 1.0))
        throw InvalidArgument("decimation ratio must lie in (0, 1]");
    if (!(noise_sigma >= 0.0)) throw InvalidArgument("noise sigma must be non-negative");
    if (mesh.empty()) throw EmptySceneError("cannot degrade an empty mesh");

    TriangleMesh out = mesh;
    if (decimation_ratio < 1.0) {
        const auto target = static_cast<std::size_t>(std::llround(decimation_ratio * mesh.face_count()));
        if (target < 1) throw InvalidArgument("decimation ratio collapses the mesh");
        out = decimate(mesh, target);
        if (out.empty()) throw InvalidArgument("decimation ratio collapses the mesh");
    }
    if (noise_sigma == 0.0) return out;

    std::vector<Vec3> normals(out.vertex_count(), Vec3::Zero());
    for (std::size_t f = 0; f < out.face_count(); ++f)
        for (auto v : out.face(f)) normals[v] += out.area(f) * out.normal(f);
    Rng rng(seed);
    std::vector<Vec3> verts = out.vertices();
    for (std::size_t v = 0; v < verts.size(); ++v) {
        const double n = normals[v].norm();
        const Vec3 dir = n > 0.0 ? Vec3(normals[v] / n) : Vec3::UnitZ();
        verts[v] += noise_sigma * rng.normal() * dir;
    }
    return TriangleMesh(std::move(verts), out.faces());
}

} // namespace avrplan
