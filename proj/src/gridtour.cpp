#include "avrplan/gridtour.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

namespace avrplan {

namespace {

constexpr double kCoarsenFactor = 1.25;

double bound_tolerance(double scale) { return 1e-9 * std::max(1.0, scale); }

} // namespace

std::size_t lattice_count(double side, double r) {
    if (!(r > 0.0)) throw InvalidArgument("grid resolution must be positive");
    return static_cast<std::size_t>(std::floor(std::max(side, 0.0) / r + 1e-9)) + 1;
}

ViewingGrid impose_grid(const ViewingRectangle& rect, double r) {
    ViewingGrid g;
    g.rect = rect;
    g.r = r;
    g.count_u = lattice_count(rect.width(), r);
    g.count_v = lattice_count(rect.height(), r);
    const double u0 = -rect.half_u + 0.5 * (rect.width() - static_cast<double>(g.count_u - 1) * r);
    const double v0 = -rect.half_v + 0.5 * (rect.height() - static_cast<double>(g.count_v - 1) * r);
    const Vec3 look = -rect.normal;
    g.views.reserve(g.count_u * g.count_v);
    for (std::size_t i = 0; i < g.count_u; ++i)
        for (std::size_t j = 0; j < g.count_v; ++j)
            g.views.push_back(View{rect.from_plane(Vec2(u0 + static_cast<double>(i) * r,
                                                        v0 + static_cast<double>(j) * r)),
                                   look});
    return g;
}

std::vector<std::size_t> boustrophedon_order(const ViewingGrid& grid) {
    std::vector<std::size_t> order;
    order.reserve(grid.size());
    const bool lanes_along_u = grid.count_u >= grid.count_v;
    const std::size_t lanes = lanes_along_u ? grid.count_v : grid.count_u;
    const std::size_t along = lanes_along_u ? grid.count_u : grid.count_v;
    for (std::size_t lane = 0; lane < lanes; ++lane) {
        for (std::size_t s = 0; s < along; ++s) {
            const std::size_t step = lane % 2 == 0 ? s : along - 1 - s;
            order.push_back(lanes_along_u ? grid.index(step, lane) : grid.index(lane, step));
        }
    }
    return order;
}

Trajectory boustrophedon_tour(const ViewingGrid& grid) {
    std::vector<View> views;
    views.reserve(grid.size());
    for (std::size_t i : boustrophedon_order(grid)) views.push_back(grid.views[i]);
    return Trajectory(std::move(views));
}

MstEdge grid_distance(const ViewingGrid& a, const ViewingGrid& b) {
    MstEdge e;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) {
            const double dd = (a.views[i].position - b.views[j].position).squaredNorm();
            if (dd < best) {
                best = dd;
                e.parent_point = i;
                e.child_point = j;
            }
        }
    }
    e.weight = std::sqrt(best);
    return e;
}

std::vector<MstEdge> grid_mst(std::span<const ViewingGrid> grids) {
    const std::size_t n = grids.size();
    std::vector<MstEdge> edges;
    if (n <= 1) return edges;

    // dist[i][j] holds the edge from i (tree side) to j.
    std::vector<std::vector<MstEdge>> dist(n, std::vector<MstEdge>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            MstEdge e = grid_distance(grids[i], grids[j]);
            e.parent = i;
            e.child = j;
            dist[i][j] = e;
            std::swap(e.parent, e.child);
            std::swap(e.parent_point, e.child_point);
            dist[j][i] = e;
        }
    }

    std::vector<bool> in_tree(n, false);
    std::vector<std::size_t> link(n, 0);
    std::vector<double> key(n, std::numeric_limits<double>::infinity());
    in_tree[0] = true;
    for (std::size_t j = 1; j < n; ++j) key[j] = dist[0][j].weight;
    for (std::size_t added = 1; added < n; ++added) {
        std::size_t next = n;
        for (std::size_t j = 0; j < n; ++j)
            if (!in_tree[j] && (next == n || key[j] < key[next])) next = j;
        in_tree[next] = true;
        edges.push_back(dist[link[next]][next]);
        for (std::size_t j = 0; j < n; ++j) {
            if (in_tree[j]) continue;
            const double w = dist[next][j].weight;
            if (w < key[j] || (w == key[j] && next < link[j])) {
                key[j] = w;
                link[j] = next;
            }
        }
    }
    return edges;
}

double mst_weight(std::span<const MstEdge> edges) {
    double w = 0.0;
    for (const auto& e : edges) w += e.weight;
    return w;
}

double lower_bound(std::span<const double> areas, double mst_weight, double d) {
    const double area = std::accumulate(areas.begin(), areas.end(), 0.0);
    return std::max(area / (4.0 * d), mst_weight);
}

bool BoundCertificate::holds() const {
    return final_length <= bound + slack + bound_tolerance(bound);
}

bool BoundCertificate::per_rectangle_holds() const {
    for (std::size_t i = 0; i < tour_lengths.size(); ++i)
        if (tour_lengths[i] > 3.0 * areas[i] / r + bound_tolerance(areas[i] / r)) return false;
    return true;
}

StitchedTour stitch_tour(std::span<const ViewingGrid> grids, std::span<const MstEdge> mst, double d) {
    const std::size_t n = grids.size();
    if (n == 0) throw InvalidArgument("no grids to stitch");
    if (mst.size() + 1 != n) throw InvalidArgument("spanning tree does not connect all grids");

    std::vector<std::vector<MstEdge>> children(n);
    for (const auto& e : mst) {
        if (e.parent >= n || e.child >= n) throw InvalidArgument("spanning tree edge refers to a missing grid");
        children[e.parent].push_back(e);
    }

    std::vector<std::vector<std::size_t>> orders(n);
    for (std::size_t g = 0; g < n; ++g) orders[g] = boustrophedon_order(grids[g]);

    StitchedTour out;
    std::vector<View> views;
    std::vector<bool> visited(n, false);
    std::function<void(std::size_t, std::size_t)> visit = [&](std::size_t g, std::size_t entry) {
        visited[g] = true;
        const auto& order = orders[g];
        const std::size_t start =
            static_cast<std::size_t>(std::find(order.begin(), order.end(), entry) - order.begin());
        for (std::size_t s = 0; s < order.size(); ++s) {
            const std::size_t p = order[(start + s) % order.size()];
            views.push_back(grids[g].views[p]);
            out.sources.emplace_back(g, p);
            for (const auto& e : children[g])
                if (e.parent_point == p && !visited[e.child]) visit(e.child, e.child_point);
        }
    };
    visit(0, orders[0].front());
    if (std::find(visited.begin(), visited.end(), false) != visited.end())
        throw InvalidArgument("spanning tree does not connect all grids");
    out.trajectory = Trajectory(std::move(views), true);

    BoundCertificate& c = out.certificate;
    c.r = grids[0].r;
    c.d = d;
    for (std::size_t g = 0; g < n; ++g) {
        const Trajectory t = boustrophedon_tour(grids[g]);
        c.tour_lengths.push_back(t.length());
        c.closing_lengths.push_back(t.size() > 1 ? (t.views().front().position - t.views().back().position).norm()
                                                 : 0.0);
        c.areas.push_back(grids[g].rect.area());
    }
    c.total_area = std::accumulate(c.areas.begin(), c.areas.end(), 0.0);
    c.mst.assign(mst.begin(), mst.end());
    c.mst_weight = mst_weight(mst);
    c.final_length = out.trajectory.length();
    c.stitching_overhead = c.final_length - std::accumulate(c.tour_lengths.begin(), c.tour_lengths.end(), 0.0);
    c.bound = 3.0 * c.total_area / c.r + 2.0 * c.mst_weight;
    c.slack = static_cast<double>(n) * 2.0 * c.r;
    c.lower_bound = lower_bound(c.areas, c.mst_weight, d);
    c.ratio = c.lower_bound > 0.0 ? c.final_length / c.lower_bound : 0.0;
    if (!c.per_rectangle_holds()) throw CertificateViolation("per-rectangle tour exceeds 3 Area / r");
    if (!c.holds()) throw CertificateViolation("stitched tour exceeds its length bound");
    return out;
}

TourPlan plan_tour(std::span<const ViewingRectangle> rects, double r, double d, std::size_t budget) {
    if (rects.empty()) throw InvalidArgument("no viewing rectangles to plan over");
    if (!(r > 0.0)) throw InvalidArgument("grid resolution must be positive");
    TourPlan plan;
    plan.r = r;
    for (;;) {
        plan.grids.clear();
        std::size_t total = 0;
        for (const auto& rect : rects) {
            plan.grids.push_back(impose_grid(widen(rect, plan.r), plan.r));
            total += plan.grids.back().size();
        }
        if (total <= budget) break;
        if (total == 4 * plan.grids.size()) {
            const auto mst = grid_mst(plan.grids);
            const auto tour = stitch_tour(plan.grids, mst, d);
            std::vector<View> partial(tour.trajectory.views().begin(),
                                      tour.trajectory.views().begin() + static_cast<std::ptrdiff_t>(budget));
            throw BudgetError("view budget too small for the number of viewing rectangles",
                              Trajectory(std::move(partial)));
        }
        plan.r *= kCoarsenFactor;
        ++plan.coarsen_steps;
    }
    const auto mst = grid_mst(plan.grids);
    plan.tour = stitch_tour(plan.grids, mst, d);
    return plan;
}

} // namespace avrplan
