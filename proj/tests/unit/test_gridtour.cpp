#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "avrplan/errors.hpp"
#include "avrplan/gridtour.hpp"
#include "avrplan/rng.hpp"

using namespace avrplan;

namespace {

ViewingRectangle flat_rect(const Vec3& center, double w, double h) {
    ViewingRectangle r;
    r.center = center;
    r.half_u = w / 2;
    r.half_v = h / 2;
    return r;
}

ViewingRectangle random_rect(Rng& rng, double r) {
    Vec3 n(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    if (n.norm() < 0.1) n = Vec3::UnitZ();
    ViewingRectangle rect;
    rect.normal = n.normalized();
    rect.u = rect.normal.unitOrthogonal();
    rect.v = rect.normal.cross(rect.u);
    rect.center = Vec3(rng.uniform(-30, 30), rng.uniform(-30, 30), rng.uniform(0, 20));
    rect.half_u = rng.uniform(r / 2, 6 * r);
    rect.half_v = rng.uniform(r / 2, 6 * r);
    return rect;
}

std::vector<ViewingGrid> point_grids(const std::vector<Vec3>& centers) {
    std::vector<ViewingGrid> grids;
    for (const auto& c : centers) grids.push_back(impose_grid(flat_rect(c, 0, 0), 1.0));
    return grids;
}

// Sum of sorted weights, so equal edge sets give bit-identical totals.
double canonical_weight(std::vector<double> w) {
    std::sort(w.begin(), w.end());
    double s = 0.0;
    for (double x : w) s += x;
    return s;
}

// Minimum over all n^(n-2) labelled trees, decoded from Prufer sequences.
double brute_mst(std::span<const ViewingGrid> grids) {
    const std::size_t n = grids.size();
    if (n < 2) return 0.0;
    std::vector<std::vector<double>> w(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) w[i][j] = w[j][i] = grid_distance(grids[i], grids[j]).weight;
    if (n == 2) return w[0][1];
    std::vector<std::size_t> seq(n - 2, 0);
    double best = 1e300;
    for (;;) {
        std::vector<std::size_t> degree(n, 1);
        for (auto s : seq) ++degree[s];
        std::vector<double> edges;
        for (auto s : seq) {
            std::size_t leaf = 0;
            while (degree[leaf] != 1) ++leaf;
            edges.push_back(w[leaf][s]);
            --degree[leaf];
            --degree[s];
        }
        std::size_t a = n, b = n;
        for (std::size_t i = 0; i < n; ++i)
            if (degree[i] == 1) (a == n ? a : b) = i;
        edges.push_back(w[a][b]);
        best = std::min(best, canonical_weight(edges));
        std::size_t k = 0;
        while (k < seq.size() && ++seq[k] == n) seq[k++] = 0;
        if (k == seq.size()) break;
    }
    return best;
}

} // namespace

TEST_CASE("lattice counts") {
    CHECK(lattice_count(2.0, 1.0) == 3);
    CHECK(lattice_count(10.0, 5.0) == 3);
    CHECK(lattice_count(0.0, 1.0) == 1);
    CHECK(lattice_count(0.3 * 10, 0.3) == 11);  // rounding guard
    CHECK_THROWS_AS(lattice_count(1.0, 0.0), InvalidArgument);
    const auto g = impose_grid(flat_rect(Vec3::Zero(), 2, 2), 1.0);
    CHECK(g.size() == 9);
    const auto big = impose_grid(flat_rect(Vec3::Zero(), 10, 10), 5.0);
    CHECK(big.size() == 9);
    CHECK(big.rect.area() / 25.0 == doctest::Approx(4.0));
}

TEST_CASE("lattice spacing, margins and orientation") {
    const auto g = impose_grid(flat_rect(Vec3(1, 1, 5), 3.5, 2.2), 1.0);
    CHECK(g.count_u == 4);
    CHECK(g.count_v == 3);
    double min_gap = 1e300;
    for (std::size_t a = 0; a < g.size(); ++a) {
        CHECK(g.views[a].direction.isApprox(Vec3(0, 0, -1)));
        CHECK(g.rect.contains(g.views[a].position));
        for (std::size_t b = a + 1; b < g.size(); ++b)
            min_gap = std::min(min_gap, (g.views[a].position - g.views[b].position).norm());
    }
    CHECK(min_gap == doctest::Approx(1.0));
    CHECK(g.views[g.index(0, 0)].position.isApprox(Vec3(1 - 1.5, 1 - 1.0, 5)));
}

TEST_CASE("serpentine lengths") {
    CHECK(boustrophedon_tour(impose_grid(flat_rect(Vec3::Zero(), 2, 2), 1.0)).length() == doctest::Approx(8.0));
    const auto strip = impose_grid(flat_rect(Vec3::Zero(), 0, 4), 1.0);
    CHECK(strip.size() == 5);
    CHECK(boustrophedon_tour(strip).length() == doctest::Approx(4.0));
    const auto tall = impose_grid(flat_rect(Vec3::Zero(), 2, 9), 1.0);
    const auto order = boustrophedon_order(tall);
    CHECK(std::set<std::size_t>(order.begin(), order.end()).size() == tall.size());
    CHECK(boustrophedon_tour(tall).length() == doctest::Approx(3 * 9 + 2));
}

TEST_CASE("per-grid bound on random rectangles") {
    Rng rng(4);
    for (int i = 0; i < 500; ++i) {
        const double r = rng.uniform(0.5, 5);
        const auto g = impose_grid(widen(random_rect(rng, r), r), r);
        CHECK(boustrophedon_tour(g).length() <= 3.0 * g.rect.area() / r + 1e-9);
    }
}

TEST_CASE("mst small cases") {
    CHECK(grid_mst(point_grids({Vec3::Zero()})).empty());
    const auto grids = point_grids({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(3, 0, 0)});
    const auto mst = grid_mst(grids);
    REQUIRE(mst.size() == 2);
    CHECK(mst_weight(mst) == doctest::Approx(3.0));
    for (const auto& e : mst) CHECK(e.weight != doctest::Approx(3.0));
}

TEST_CASE("mst equals Cayley enumeration") {
    Rng rng(12);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<ViewingGrid> grids;
        const std::size_t n = 2 + rng.index(5);
        for (std::size_t i = 0; i < n; ++i) grids.push_back(impose_grid(widen(random_rect(rng, 2.0), 2.0), 2.0));
        std::vector<double> w;
        for (const auto& e : grid_mst(grids)) w.push_back(e.weight);
        CHECK(canonical_weight(w) == brute_mst(grids));
    }
}

TEST_CASE("stitching") {
    SUBCASE("one grid is its closed serpentine") {
        std::vector<ViewingGrid> grids{impose_grid(flat_rect(Vec3::Zero(), 4, 2), 1.0)};
        const auto tour = stitch_tour(grids, {}, 5.0);
        const auto serp = boustrophedon_tour(grids[0]);
        REQUIRE(tour.trajectory.size() == serp.size());
        for (std::size_t i = 0; i < serp.size(); ++i) CHECK(tour.trajectory[i].position == serp[i].position);
        CHECK(tour.trajectory.closed());
        CHECK(tour.certificate.final_length ==
              doctest::Approx(serp.length() + (serp.views().front().position - serp.views().back().position).norm()));
    }
    SUBCASE("two coplanar 3x3 grids with a gap of 2") {
        std::vector<ViewingGrid> grids{impose_grid(flat_rect(Vec3(1, 1, 0), 2, 2), 1.0),
                                       impose_grid(flat_rect(Vec3(5, 1, 0), 2, 2), 1.0)};
        const auto mst = grid_mst(grids);
        CHECK(mst_weight(mst) == doctest::Approx(2.0));
        const auto tour = stitch_tour(grids, mst, 5.0);
        // serpentines 8 + 8, doubled MST edge 4, two grid slacks of 2r
        CHECK(tour.certificate.final_length <= 8 + 8 + 2 * 2 + 4 + 1e-9);
        CHECK(tour.certificate.holds());
        // A to (2,0), over to B, B serpentine, back to A (2,1), rest of A, close
        CHECK(tour.certificate.final_length == doctest::Approx(17 + std::sqrt(17.0) + 2 * std::sqrt(2.0)).epsilon(1e-12));
    }
    SUBCASE("disconnected tree") {
        std::vector<ViewingGrid> grids = point_grids({Vec3::Zero(), Vec3(1, 0, 0)});
        CHECK_THROWS_AS(stitch_tour(grids, {}, 5.0), InvalidArgument);
    }
}

TEST_CASE("random stitched tours visit every point once and satisfy the certificate") {
    Rng rng(31);
    for (int trial = 0; trial < 60; ++trial) {
        const double r = rng.uniform(1, 5);
        std::vector<ViewingGrid> grids;
        const std::size_t n = 1 + rng.index(10);
        std::size_t points = 0;
        for (std::size_t i = 0; i < n; ++i) {
            grids.push_back(impose_grid(widen(random_rect(rng, r), r), r));
            points += grids.back().size();
        }
        const auto tour = stitch_tour(grids, grid_mst(grids), 5.0);
        CHECK(tour.trajectory.size() == points);
        std::set<std::pair<std::size_t, std::size_t>> seen(tour.sources.begin(), tour.sources.end());
        CHECK(seen.size() == points);
        const auto& c = tour.certificate;
        CHECK(c.holds());
        CHECK(c.per_rectangle_holds());
        CHECK(c.final_length == doctest::Approx(tour.trajectory.length()));
        CHECK(c.final_length <= 3 * c.total_area / r + 2 * c.mst_weight + static_cast<double>(n) * 2 * r + 1e-9);
        CHECK(c.final_length >= c.lower_bound - 1e-9);
    }
}

TEST_CASE("lower bound") {
    const std::vector<double> one{100.0};
    CHECK(lower_bound(one, 0.0, 5.0) == doctest::Approx(5.0));
    const std::vector<double> small{60.0};
    CHECK(lower_bound(small, 7.0, 5.0) == doctest::Approx(7.0));
}

TEST_CASE("budget coarsening") {
    std::vector<ViewingRectangle> rects{flat_rect(Vec3(0, 0, 5), 10, 10), flat_rect(Vec3(20, 0, 5), 10, 10)};
    const auto full = plan_tour(rects, 1.0, 5.0, 1000);
    CHECK(full.coarsen_steps == 0);
    CHECK(full.tour.trajectory.size() == 2 * 121);
    const auto coarse = plan_tour(rects, 1.0, 5.0, 60);
    CHECK(coarse.coarsen_steps > 0);
    CHECK(coarse.tour.trajectory.size() <= 60);
    CHECK(coarse.r == doctest::Approx(std::pow(1.25, coarse.coarsen_steps)));
    try {
        plan_tour(rects, 1.0, 5.0, 5);
        FAIL("expected a budget error");
    } catch (const BudgetError& e) {
        CHECK(e.partial().size() == 5);
    }
    CHECK_THROWS_AS(plan_tour({}, 1.0, 5.0, 10), InvalidArgument);
}
