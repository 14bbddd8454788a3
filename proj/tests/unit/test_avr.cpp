#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "avrplan/avr.hpp"
#include "avrplan/errors.hpp"
#include "avrplan/geometry2d.hpp"
#include "avrplan/rng.hpp"

using namespace avrplan;

namespace {

std::vector<std::size_t> all_faces(const TriangleMesh& mesh) {
    std::vector<std::size_t> f(mesh.face_count());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = i;
    return f;
}

// Small triangle with its centroid at c and normal +z.
void add_tri(std::vector<Vec3>& v, std::vector<Face>& f, const Vec3& c) {
    const auto base = static_cast<std::uint32_t>(v.size());
    v.push_back(c + Vec3(-0.1, -0.1, 0));
    v.push_back(c + Vec3(0.2, -0.1, 0));
    v.push_back(c + Vec3(-0.1, 0.2, 0));
    f.push_back({base, base + 1, base + 2});
}

ViewingRectangle make_rect(const Vec3& center, const Vec3& normal, const Vec3& u, double hu, double hv) {
    ViewingRectangle r;
    r.center = center;
    r.normal = normal.normalized();
    r.u = u.normalized();
    r.v = r.normal.cross(r.u);
    r.half_u = hu;
    r.half_v = hv;
    return r;
}

Vec3 random_unit(Rng& rng) {
    for (;;) {
        Vec3 p(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
        if (p.norm() > 0.1 && p.norm() <= 1.0) return p.normalized();
    }
}

bool inside(const ViewingRectangle& outer, const ViewingRectangle& inner) {
    for (const auto& c : inner.corners())
        if (!outer.contains(c, 1e-9)) return false;
    return true;
}

} // namespace

TEST_CASE("rectangle geometry") {
    const auto r = make_rect(Vec3(1, 2, 3), Vec3(0, 0, 1), Vec3(1, 0, 0), 2, 1);
    CHECK(r.area() == doctest::Approx(8));
    CHECK(r.v.isApprox(Vec3(0, 1, 0)));
    CHECK(r.contains(Vec3(3, 3, 3)));
    CHECK_FALSE(r.contains(Vec3(3.1, 3, 3)));
    CHECK_FALSE(r.contains(Vec3(1, 2, 3.1)));
    CHECK(r.from_plane(r.to_plane(Vec3(0, 1.5, 3))).isApprox(Vec3(0, 1.5, 3)));
    const auto w = widen(r, 3.0);
    CHECK(w.width() == doctest::Approx(4));
    CHECK(w.height() == doctest::Approx(3));
}

TEST_CASE("clustering separates distant groups") {
    std::vector<Vec3> v;
    std::vector<Face> f;
    for (int i = 0; i < 4; ++i) add_tri(v, f, Vec3(i % 2, i / 2, 0));
    for (int i = 0; i < 4; ++i) add_tri(v, f, Vec3(100 + i % 2, i / 2, 0));
    const TriangleMesh mesh(v, f);
    const auto faces = all_faces(mesh);
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        auto clusters = cluster_faces(mesh, faces, 2, seed);
        REQUIRE(clusters.size() == 2);
        std::sort(clusters.begin(), clusters.end(), [](auto& a, auto& b) { return a.faces[0] < b.faces[0]; });
        CHECK(clusters[0].faces == std::vector<std::size_t>{0, 1, 2, 3});
        CHECK(clusters[1].faces == std::vector<std::size_t>{4, 5, 6, 7});
    }
    CHECK_THROWS_AS(cluster_faces(mesh, faces, 9, 1), InvalidArgument);
    CHECK_THROWS_AS(cluster_faces(mesh, faces, 0, 1), InvalidArgument);
}

TEST_CASE("single cluster takes the mean normal") {
    const auto mesh = generate_scene({SceneKind::box_field, 20.0, 2, 1, {}});
    const auto faces = all_faces(mesh);
    const auto clusters = cluster_faces(mesh, faces, 1, 3);
    REQUIRE(clusters.size() == 1);
    CHECK(clusters[0].faces.size() == mesh.face_count());
    Vec3 mean = Vec3::Zero();
    for (std::size_t i = 0; i < mesh.face_count(); ++i) mean += mesh.normal(i);
    CHECK(clusters[0].mean_normal.isApprox(mean.normalized(), 1e-12));
}

TEST_CASE("clustering is deterministic and competitive with restarts") {
    const auto full = generate_scene({SceneKind::box_field, 12.0, 1, 2, {}});
    std::vector<std::size_t> sub;
    for (std::size_t i = 0; i < 200 && i < full.face_count(); ++i) sub.push_back(i * full.face_count() / 200);
    const auto a = cluster_faces(full, sub, 4, 42), b = cluster_faces(full, sub, 4, 42);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].faces == b[i].faces);
    double worst = 0.0;
    for (std::uint64_t s = 100; s < 120; ++s) worst = std::max(worst, clustering_sse(full, cluster_faces(full, sub, 4, s)));
    CHECK(clustering_sse(full, a) <= worst + 1e-9);
}

TEST_CASE("fit rectangle on the unit square") {
    std::vector<Vec3> v;
    std::vector<Face> f;
    for (auto c : {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(1, 1, 0), Vec3(0, 1, 0)}) add_tri(v, f, c);
    // add_tri offsets the centroid by zero, so centroids sit on the corners
    const TriangleMesh mesh(v, f);
    const auto clusters = cluster_faces(mesh, all_faces(mesh), 1, 1);
    const auto rect = fit_rectangle(mesh, clusters[0], 5.0);
    CHECK(rect.center.isApprox(Vec3(0.5, 0.5, 5.0), 1e-12));
    CHECK(rect.normal.isApprox(Vec3(0, 0, 1), 1e-12));
    CHECK(rect.area() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("fit rectangle on a 2x1 box") {
    std::vector<Vec3> pts{{0, 0, 0}, {2, 0, 0}, {2, 1, 0}, {0, 1, 0}, {1, 0.5, 0}, {0.3, 0.7, 0}};
    CHECK(fit_rectangle(pts, Vec3(0, 0, 1)).area() == doctest::Approx(2.0).epsilon(1e-12));
    std::vector<Vec3> line{{0, 0, 0}, {1, 1, 0}, {2, 2, 0}};
    CHECK_THROWS_AS(fit_rectangle(line, Vec3(0, 0, 1)), DegenerateClusterError);
}

TEST_CASE("fit rectangle beats a 360-step sweep") {
    Rng rng(8);
    for (int trial = 0; trial < 20; ++trial) {
        const Vec3 n = random_unit(rng);
        const Vec3 e1 = n.unitOrthogonal(), e2 = n.cross(e1);
        std::vector<Vec3> pts;
        std::vector<Vec2> flat;
        for (int i = 0; i < 50; ++i) {
            const Vec2 q(rng.uniform(-4, 4), rng.uniform(-2, 2));
            flat.push_back(q);
            pts.push_back(Vec3(1, 2, 3) + q.x() * e1 + q.y() * e2);
        }
        const auto rect = fit_rectangle(pts, n);
        for (int k = 0; k < 360; ++k) {
            const double a = std::numbers::pi * k / 360.0;
            CHECK(rect.area() <= bounding_rectangle(flat, Vec2(std::cos(a), std::sin(a))).area() * (1 + 1e-9));
        }
        for (const auto& p : pts) CHECK(rect.contains(p, 1e-9));
        CHECK(std::abs(rect.normal.dot(n)) == doctest::Approx(1.0));
        CHECK(rect.normal.dot(n) > 0.0);
    }
}

TEST_CASE("intersection tests") {
    const auto a = make_rect(Vec3(0, 0, 0), Vec3(0, 0, 1), Vec3(1, 0, 0), 2, 2);
    SUBCASE("parallel disjoint") {
        const auto b = make_rect(Vec3(0, 0, 3), Vec3(0, 0, 1), Vec3(1, 0, 0), 2, 2);
        CHECK_FALSE(rectangles_intersect(a, b));
        const auto out = merge_intersecting({a, b});
        CHECK(out[0].area() == a.area());
        CHECK(out[1].center == b.center);
    }
    SUBCASE("perpendicular through midlines") {
        const auto b = make_rect(Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), 2, 2);
        CHECK(rectangles_intersect(a, b));
        const auto out = merge_intersecting({a, b});
        CHECK(out[0].area() == doctest::Approx(8.0));
        CHECK(out[1].area() == doctest::Approx(8.0));
        CHECK_FALSE(rectangles_intersect(out[0], out[1]));
        CHECK(inside(a, out[0]));
        CHECK(inside(b, out[1]));
    }
    SUBCASE("touching and nearly parallel do not count") {
        const auto touch = make_rect(Vec3(2, 0, 2), Vec3(1, 0, 0), Vec3(0, 1, 0), 2, 2);
        CHECK_FALSE(rectangles_intersect(a, touch));
        const double tilt = 5.0 * std::numbers::pi / 180.0;
        const auto shallow = make_rect(Vec3(0, 0, 0), Vec3(std::sin(tilt), 0, std::cos(tilt)), Vec3(std::cos(tilt), 0, -std::sin(tilt)), 2, 2);
        CHECK_FALSE(rectangles_intersect(a, shallow));
    }
    SUBCASE("off-centre cut keeps the larger side") {
        const auto b = make_rect(Vec3(1, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), 2, 2);
        const auto piece = keep_larger_piece(a, b);
        CHECK(piece.area() == doctest::Approx(12.0));
        CHECK(piece.center.x() == doctest::Approx(-0.5));
    }
}

TEST_CASE("random merges end pairwise disjoint and inside their sources") {
    Rng rng(21);
    for (int trial = 0; trial < 40; ++trial) {
        std::vector<ViewingRectangle> rects;
        for (int i = 0; i < 5; ++i) {
            const Vec3 n = random_unit(rng);
            rects.push_back(make_rect(Vec3(rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3)), n,
                                      n.unitOrthogonal(), rng.uniform(0.5, 4), rng.uniform(0.5, 4)));
        }
        const auto out = merge_intersecting(rects);
        REQUIRE(out.size() == rects.size());
        for (std::size_t i = 0; i < out.size(); ++i) {
            CHECK(inside(rects[i], out[i]));
            for (std::size_t j = i + 1; j < out.size(); ++j) CHECK_FALSE(rectangles_intersect(out[i], out[j]));
        }
    }
}

TEST_CASE("flat terrain gives one rectangle at height d") {
    const auto mesh = generate_scene({SceneKind::flat_terrain, 10.0, 0, 1, {}});
    AvrOptions opt;
    opt.k = 1;
    const auto patches = build_avr(mesh, {}, QualityParams{}, opt);
    REQUIRE(patches.size() == 1);
    const auto& rect = patches[0].rect;
    CHECK(rect.center.z() == doctest::Approx(5.0));
    for (std::size_t f = 0; f < mesh.face_count(); ++f) CHECK(rect.contains(mesh.centroid(f) + Vec3(0, 0, 5), 1e-9));
}

TEST_CASE("two perpendicular walls") {
    std::vector<Vec3> v;
    std::vector<Face> f;
    auto quad = [&](const Vec3& o, const Vec3& a, const Vec3& b) {
        const auto base = static_cast<std::uint32_t>(v.size());
        v.insert(v.end(), {o, o + a, o + a + b, o + b});
        f.push_back({base, base + 1, base + 2});
        f.push_back({base, base + 2, base + 3});
    };
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 4; ++j) {
            quad(Vec3(i, 0, j), Vec3(1, 0, 0), Vec3(0, 0, 1));   // normal -y
            quad(Vec3(-3, i + 3, j), Vec3(0, 1, 0), Vec3(0, 0, 1));  // normal +x
        }
    const auto mesh = subdivide_large_faces(TriangleMesh(v, f), 0.2);
    AvrOptions opt;
    opt.k = 2;
    const auto patches = build_avr(mesh, {}, QualityParams{}, opt);
    REQUIRE(patches.size() == 2);
    const double cos10 = std::cos(10.0 * std::numbers::pi / 180.0);
    bool found_y = false, found_x = false;
    for (const auto& p : patches) {
        found_y |= p.rect.normal.dot(Vec3(0, -1, 0)) >= cos10;
        found_x |= p.rect.normal.dot(Vec3(1, 0, 0)) >= cos10;
    }
    CHECK(found_y);
    CHECK(found_x);
}

TEST_CASE("every face lands in exactly one patch") {
    for (auto kind : {SceneKind::flat_terrain, SceneKind::box_field, SceneKind::canyon}) {
        const auto mesh = generate_scene({kind, 30.0, 3, 4, {}});
        AvrOptions opt;
        opt.resolution = 2.0;
        opt.seed = 9;
        const auto patches = build_avr(mesh, {}, QualityParams{}, opt);
        std::vector<int> hits(mesh.face_count(), 0);
        for (const auto& p : patches) {
            for (std::size_t face : p.cluster.faces) ++hits[face];
            CHECK(p.rect.width() >= 2.0 - 1e-9);
            CHECK(p.rect.height() >= 2.0 - 1e-9);
        }
        CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
        for (std::size_t i = 0; i < patches.size(); ++i)
            for (std::size_t j = i + 1; j < patches.size(); ++j)
                CHECK_FALSE(rectangles_intersect(patches[i].rect, patches[j].rect));
        const auto again = build_avr(mesh, {}, QualityParams{}, opt);
        REQUIRE(again.size() == patches.size());
        for (std::size_t i = 0; i < patches.size(); ++i) CHECK(again[i].rect.center == patches[i].rect.center);
    }
}

TEST_CASE("automatic cluster count") {
    const auto mesh = generate_scene({SceneKind::flat_terrain, 30.0, 0, 1, {}});
    const auto faces = all_faces(mesh);
    const auto k = default_cluster_count(mesh, faces, 5.0, 1);
    CHECK(k >= static_cast<std::size_t>(std::ceil(900.0 / (7.5 * 7.5))));
    CHECK(k <= 50);
}
