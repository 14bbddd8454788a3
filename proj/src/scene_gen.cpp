#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "avrplan/errors.hpp"
#include "avrplan/mesh.hpp"
#include "avrplan/rng.hpp"

namespace avrplan {

const char* to_string(SceneKind kind) {
    switch (kind) {
    case SceneKind::flat_terrain: return "flat";
    case SceneKind::box_field: return "boxfield";
    case SceneKind::canyon: return "canyon";
    case SceneKind::loaded_file: return "file";
    }
    return "unknown";
}

SceneKind scene_kind_from_string(const std::string& name) {
    if (name == "flat" || name == "flat_terrain") return SceneKind::flat_terrain;
    if (name == "boxfield" || name == "box_field") return SceneKind::box_field;
    if (name == "canyon") return SceneKind::canyon;
    if (name == "file") return SceneKind::loaded_file;
    throw InvalidArgument("unknown scene kind '" + name + "'");
}

void SceneSpec::validate() const {
    if (kind == SceneKind::loaded_file) {
        if (path.empty()) throw InvalidArgument("loaded scene needs a mesh path");
        return;
    }
    if (!(extent > 0.0)) throw InvalidArgument("scene extent must be positive");
    if (obstacles < 0) throw InvalidArgument("obstacle count must be non-negative");
}

namespace {

// Accumulates triangles, welding vertices that coincide to 1e-9 m.
class MeshBuilder {
public:
    std::uint32_t vertex(const Vec3& p) {
        const auto key = std::make_tuple(std::llround(p.x() * 1e9), std::llround(p.y() * 1e9),
                                         std::llround(p.z() * 1e9));
        auto it = index_.find(key);
        if (it != index_.end()) return it->second;
        const auto idx = static_cast<std::uint32_t>(verts_.size());
        verts_.push_back(p);
        index_.emplace(key, idx);
        return idx;
    }

    // Tessellates the parallelogram origin + [0,1]u + [0,1]v into nu x nv
    // quads. Face normals follow u x v.
    void quad_grid(const Vec3& origin, const Vec3& u, const Vec3& v, int nu, int nv) {
        auto at = [&](int i, int j) {
            return vertex(origin + (static_cast<double>(i) / nu) * u + (static_cast<double>(j) / nv) * v);
        };
        for (int j = 0; j < nv; ++j) {
            for (int i = 0; i < nu; ++i) {
                const auto a = at(i, j), b = at(i + 1, j), c = at(i + 1, j + 1), d = at(i, j + 1);
                faces_.push_back({a, b, c});
                faces_.push_back({a, c, d});
            }
        }
    }

    TriangleMesh build() { return TriangleMesh(std::move(verts_), std::move(faces_)); }

private:
    std::vector<Vec3> verts_;
    std::vector<Face> faces_;
    std::map<std::tuple<long long, long long, long long>, std::uint32_t> index_;
};

int cells(double length) { return std::max(1, static_cast<int>(std::ceil(length / kTerrainCell - 1e-9))); }

void add_terrain(MeshBuilder& b, double x0, double x1, double extent, double z) {
    b.quad_grid(Vec3(x0, 0, z), Vec3(x1 - x0, 0, 0), Vec3(0, extent, 0), cells(x1 - x0), cells(extent));
}

struct Box {
    double x0, y0, sx, sy, height, base;
};

void add_box(MeshBuilder& b, const Box& box) {
    const int n = kBoxDivisions;
    const double x1 = box.x0 + box.sx, y1 = box.y0 + box.sy, top = box.base + box.height;
    const Vec3 up(0, 0, box.height);
    b.quad_grid(Vec3(box.x0, box.y0, top), Vec3(box.sx, 0, 0), Vec3(0, box.sy, 0), n, n);
    b.quad_grid(Vec3(box.x0, box.y0, box.base), Vec3(box.sx, 0, 0), up, n, n);
    b.quad_grid(Vec3(x1, y1, box.base), Vec3(-box.sx, 0, 0), up, n, n);
    b.quad_grid(Vec3(box.x0, y1, box.base), Vec3(0, -box.sy, 0), up, n, n);
    b.quad_grid(Vec3(x1, box.y0, box.base), Vec3(0, box.sy, 0), up, n, n);
}

bool overlaps(const Box& a, const Box& b, double gap) {
    return a.x0 < b.x0 + b.sx + gap && b.x0 < a.x0 + a.sx + gap && a.y0 < b.y0 + b.sy + gap &&
           b.y0 < a.y0 + a.sy + gap;
}

// Places boxes without overlap inside the x-ranges given; each box lands in
// a range chosen uniformly.
std::vector<Box> place_boxes(Rng& rng, int count, const std::vector<std::pair<double, double>>& x_ranges,
                             double extent, double min_h, double max_h) {
    constexpr double kMargin = 2.0;
    constexpr double kGap = 3.0;
    std::vector<Box> boxes;
    int attempts = 0;
    while (static_cast<int>(boxes.size()) < count) {
        if (++attempts > 10000) throw InvalidArgument("cannot place " + std::to_string(count) + " obstacles");
        const auto& range = x_ranges[rng.index(x_ranges.size())];
        Box box{};
        box.sx = rng.uniform(3.0, 6.0);
        box.sy = rng.uniform(3.0, 6.0);
        box.height = rng.uniform(min_h, max_h);
        box.base = 0.0;
        const double x_lo = range.first + kMargin, x_hi = range.second - kMargin - box.sx;
        const double y_lo = kMargin, y_hi = extent - kMargin - box.sy;
        if (x_hi <= x_lo || y_hi <= y_lo) continue;
        box.x0 = rng.uniform(x_lo, x_hi);
        box.y0 = rng.uniform(y_lo, y_hi);
        if (std::any_of(boxes.begin(), boxes.end(), [&](const Box& o) { return overlaps(box, o, kGap); }))
            continue;
        boxes.push_back(box);
    }
    return boxes;
}

} // namespace

TriangleMesh generate_scene(const SceneSpec& spec) {
    spec.validate();
    if (spec.kind == SceneKind::loaded_file) return load_mesh(spec.path);

    Rng rng(spec.seed);
    MeshBuilder b;
    const double e = spec.extent;
    switch (spec.kind) {
    case SceneKind::flat_terrain:
        add_terrain(b, 0.0, e, e, 0.0);
        break;
    case SceneKind::box_field: {
        add_terrain(b, 0.0, e, e, 0.0);
        for (const Box& box : place_boxes(rng, spec.obstacles, {{0.0, e}}, e, 3.0, 8.0)) add_box(b, box);
        break;
    }
    case SceneKind::canyon: {
        if (e < 20.0) throw InvalidArgument("canyon needs an extent of at least 20 m");
        const double width = rng.uniform(0.35, 0.45) * e;
        const double center = 0.5 * e + rng.uniform(-0.05, 0.05) * e;
        const double depth = rng.uniform(5.0, 7.0);
        const double x1 = center - 0.5 * width, x2 = center + 0.5 * width;
        add_terrain(b, 0.0, x1, e, 0.0);
        add_terrain(b, x1, x2, e, -depth);
        add_terrain(b, x2, e, e, 0.0);
        const int ny = cells(e), nz = cells(depth);
        b.quad_grid(Vec3(x1, 0, -depth), Vec3(0, e, 0), Vec3(0, 0, depth), ny, nz);
        b.quad_grid(Vec3(x2, e, -depth), Vec3(0, -e, 0), Vec3(0, 0, depth), ny, nz);
        for (const Box& box : place_boxes(rng, spec.obstacles, {{0.0, x1}, {x2, e}}, e, 2.0, 5.0))
            add_box(b, box);
        break;
    }
    case SceneKind::loaded_file:
        break;
    }
    return b.build();
}

} // namespace avrplan
