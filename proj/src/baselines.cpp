#include "avrplan/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "avrplan/errors.hpp"
#include "avrplan/parallel.hpp"
#include "avrplan/rng.hpp"

namespace avrplan {

namespace {

struct Footprint {
    double x0, y0, long_len, short_len;
    bool long_is_x;
};

Footprint footprint(const Aabb& b) {
    const double ex = b.max.x() - b.min.x(), ey = b.max.y() - b.min.y();
    const bool long_is_x = ex >= ey;
    return {b.min.x(), b.min.y(), long_is_x ? ex : ey, long_is_x ? ey : ex, long_is_x};
}

std::size_t steps(double len, double spacing) {
    return static_cast<std::size_t>(std::floor(len / spacing + 1e-9)) + 1;
}

} // namespace

void ZigZagSpec::validate(const Aabb& bounds) const {
    if (!(spacing > 0.0)) throw InvalidArgument("zigzag spacing must be positive");
    if (!(altitude > bounds.max.z())) throw InvalidArgument("zigzag altitude must exceed the scene height");
}

Trajectory plan_zigzag(const Aabb& bounds, const ZigZagSpec& spec) {
    if (bounds.empty()) throw InvalidArgument("zigzag needs non-empty scene bounds");
    spec.validate(bounds);
    const Footprint fp = footprint(bounds);
    const std::size_t lanes = steps(fp.short_len, spec.spacing);
    const std::size_t per_lane = steps(fp.long_len, spec.spacing);
    const double lane0 = 0.5 * (fp.short_len - static_cast<double>(lanes - 1) * spec.spacing);
    const double step0 = 0.5 * (fp.long_len - static_cast<double>(per_lane - 1) * spec.spacing);
    const Vec3 nadir(0.0, 0.0, -1.0);
    std::vector<View> views;
    views.reserve(lanes * per_lane);
    for (std::size_t lane = 0; lane < lanes; ++lane) {
        const double across = lane0 + static_cast<double>(lane) * spec.spacing;
        for (std::size_t s = 0; s < per_lane; ++s) {
            const std::size_t k = lane % 2 == 0 ? s : per_lane - 1 - s;
            const double along = step0 + static_cast<double>(k) * spec.spacing;
            const double x = fp.x0 + (fp.long_is_x ? along : across);
            const double y = fp.y0 + (fp.long_is_x ? across : along);
            views.push_back(View{Vec3(x, y, spec.altitude), nadir});
        }
    }
    return Trajectory(std::move(views));
}

double zigzag_length(const Aabb& bounds, const ZigZagSpec& spec) {
    const Footprint fp = footprint(bounds);
    const auto lanes = static_cast<double>(steps(fp.short_len, spec.spacing));
    const auto per_lane = static_cast<double>(steps(fp.long_len, spec.spacing));
    return (lanes * (per_lane - 1.0) + (lanes - 1.0)) * spec.spacing;
}

std::vector<Vec3> uniform_candidates(const Scene& proxy, const QualityParams& params, double resolution) {
    if (!(resolution > 0.0)) throw InvalidArgument("lattice resolution must be positive");
    Aabb b = proxy.mesh().bounds();
    const double pad = params.max_distance();
    b.min -= Vec3::Constant(pad);
    b.max += Vec3::Constant(pad);
    const std::size_t nx = steps(b.extent().x(), resolution);
    const std::size_t ny = steps(b.extent().y(), resolution);
    const std::size_t nz = steps(b.extent().z(), resolution);
    const std::size_t total = nx * ny * nz;
    std::vector<std::uint8_t> keep(total, 0);
    parallel_for(total, [&](std::size_t idx) {
        const std::size_t i = idx / (ny * nz), j = (idx / nz) % ny, k = idx % nz;
        const Vec3 p = b.min + resolution * Vec3(static_cast<double>(i), static_cast<double>(j),
                                                 static_cast<double>(k));
        const ClosestPoint cp = proxy.bvh().closest_point(p);
        if (cp.distance < params.min_distance() || cp.distance > params.max_distance()) return;
        if (proxy.mesh().normal(cp.face).dot(p - cp.point) <= 0.0) return;
        keep[idx] = 1;
    });
    std::vector<Vec3> out;
    for (std::size_t idx = 0; idx < total; ++idx) {
        if (!keep[idx]) continue;
        const std::size_t i = idx / (ny * nz), j = (idx / nz) % ny, k = idx % nz;
        out.push_back(b.min + resolution * Vec3(static_cast<double>(i), static_cast<double>(j),
                                                static_cast<double>(k)));
    }
    return out;
}

std::vector<std::size_t> farthest_point_sample(std::span<const Vec3> points, std::size_t count) {
    const std::size_t n = points.size();
    std::vector<std::size_t> out;
    if (n == 0 || count == 0) return out;
    if (count >= n) {
        out.resize(n);
        for (std::size_t i = 0; i < n; ++i) out[i] = i;
        return out;
    }
    std::vector<double> mind(n, std::numeric_limits<double>::infinity());
    std::size_t next = 0;
    while (out.size() < count) {
        out.push_back(next);
        mind[next] = -1.0;
        std::size_t best = n;
        for (std::size_t i = 0; i < n; ++i) {
            if (mind[i] < 0.0) continue;
            mind[i] = std::min(mind[i], (points[i] - points[next]).squaredNorm());
            if (best == n || mind[i] > mind[best]) best = i;
        }
        next = best;
    }
    return out;
}

std::vector<std::size_t> short_tour(std::span<const Vec3> points, bool closed) {
    const std::size_t n = points.size();
    std::vector<std::size_t> order;
    if (n == 0) return order;
    std::vector<bool> used(n, false);
    order.push_back(0);
    used[0] = true;
    while (order.size() < n) {
        const Vec3& cur = points[order.back()];
        std::size_t best = n;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
            if (used[i]) continue;
            const double dd = (points[i] - cur).squaredNorm();
            if (dd < best_d) {
                best_d = dd;
                best = i;
            }
        }
        used[best] = true;
        order.push_back(best);
    }

    auto dist = [&](std::size_t a, std::size_t b) { return (points[order[a]] - points[order[b]]).norm(); };
    bool improved = true;
    for (int pass = 0; improved && pass < 100; ++pass) {
        improved = false;
        for (std::size_t i = 0; i + 2 < n; ++i) {
            for (std::size_t j = i + 2; j < n; ++j) {
                // Replace edges (i, i+1) and (j, j+1) by (i, j) and (i+1, j+1).
                const bool last = j + 1 == n;
                if (last && !closed) {
                    const double delta = dist(i, j) - dist(i, i + 1);
                    if (delta < -1e-12) {
                        std::reverse(order.begin() + static_cast<std::ptrdiff_t>(i + 1), order.end());
                        improved = true;
                    }
                    continue;
                }
                const std::size_t jn = last ? 0 : j + 1;
                if (jn == i) continue;
                const double delta = dist(i, j) + dist(i + 1, jn) - dist(i, i + 1) - dist(j, jn);
                if (delta < -1e-12) {
                    std::reverse(order.begin() + static_cast<std::ptrdiff_t>(i + 1),
                                 order.begin() + static_cast<std::ptrdiff_t>(j + 1));
                    improved = true;
                }
            }
        }
    }
    return order;
}

Trajectory plan_uniform_grid(const Scene& proxy, std::size_t view_count, const QualityParams& params,
                             double resolution) {
    if (view_count == 0) throw InvalidArgument("uniform grid needs at least one view");
    const auto lattice = uniform_candidates(proxy, params, resolution);
    const auto picked = farthest_point_sample(lattice, view_count);
    std::vector<Vec3> pts;
    pts.reserve(picked.size());
    for (std::size_t i : picked) pts.push_back(lattice[i]);
    std::vector<View> views;
    for (std::size_t i : short_tour(pts, true)) {
        const ClosestPoint cp = proxy.bvh().closest_point(pts[i]);
        views.push_back(View::looking(pts[i], cp.point - pts[i]));
    }
    return Trajectory(std::move(views), true);
}

double gvs_gain(const Scene& proxy, std::span<const View> candidates, std::span<const std::size_t> selected,
                std::size_t s, const QualityParams& params, GainReading reading) {
    std::vector<View> views;
    for (std::size_t i : selected) views.push_back(candidates[i]);
    views.push_back(candidates[s]);
    const std::size_t self = views.size() - 1;
    double gain = 0.0;
    for (std::size_t f = 0; f < proxy.mesh().face_count(); ++f) {
        const auto vis = visible_set(proxy, f, views, params);
        if (vis.empty()) continue;
        const bool seen_by_s = vis.back() == self;
        const bool seen_by_c = vis.front() != self;
        const bool counted = reading == GainReading::literal ? !seen_by_s : !seen_by_c;
        if (counted) gain += face_quality(proxy.mesh().centroid(f), views, vis, params).quality;
    }
    return gain;
}

GvsResult plan_gvs(std::span<const ViewingGrid> grids, const Scene& proxy, const QualityParams& params,
                   std::size_t view_budget, std::uint64_t seed, GainReading reading) {
    if (view_budget == 0) throw InvalidArgument("greedy view selection needs a positive budget");
    std::vector<View> cand;
    for (const auto& g : grids) cand.insert(cand.end(), g.views.begin(), g.views.end());
    const std::size_t n = cand.size();
    GvsResult out;
    if (n == 0) {
        out.stopped_early = true;
        return out;
    }
    const TriangleMesh& mesh = proxy.mesh();
    const std::size_t nf = mesh.face_count();

    std::vector<std::vector<std::size_t>> vis(n);
    parallel_for(n, [&](std::size_t c) {
        for (std::size_t f = 0; f < nf; ++f)
            if (is_visible(proxy, f, cand[c], params)) vis[c].push_back(f);
    });

    const double reach2 = (kGvsNeighbourRadius + 1e-9) * (kGvsNeighbourRadius + 1e-9);
    std::vector<std::vector<std::size_t>> seen_by(nf);  // selected candidates, ascending
    std::vector<double> q(nf, 0.0);
    double total_q = 0.0;
    std::vector<bool> selected(n, false), frontier(n, false);

    auto select = [&](std::size_t s, double gain) {
        selected[s] = true;
        frontier[s] = false;
        out.selected.push_back(s);
        out.gains.push_back(gain);
        for (std::size_t f : vis[s]) {
            auto& lst = seen_by[f];
            lst.insert(std::upper_bound(lst.begin(), lst.end(), s), s);
            total_q -= q[f];
            q[f] = face_quality(mesh.centroid(f), cand, lst, params).quality;
            total_q += q[f];
        }
        for (std::size_t c = 0; c < n; ++c)
            if (!selected[c] && (cand[c].position - cand[s].position).squaredNorm() <= reach2) frontier[c] = true;
    };

    auto gain_of = [&](std::size_t s) {
        double g = 0.0;
        if (reading == GainReading::literal) {
            g = total_q;
            for (std::size_t f : vis[s]) g -= q[f];
            return std::max(g, 0.0);
        }
        for (std::size_t f : vis[s]) {
            if (!seen_by[f].empty()) continue;
            const std::size_t one[] = {s};
            g += face_quality(mesh.centroid(f), cand, one, params).quality;
        }
        return g;
    };

    Rng rng(seed);
    select(rng.index(n), 0.0);
    std::vector<std::size_t> front;
    std::vector<double> gains;
    while (out.selected.size() < view_budget) {
        front.clear();
        for (std::size_t c = 0; c < n; ++c)
            if (frontier[c]) front.push_back(c);
        if (front.empty()) {
            out.stopped_early = true;
            break;
        }
        gains.assign(front.size(), 0.0);
        parallel_for(front.size(), [&](std::size_t i) { gains[i] = gain_of(front[i]); });
        std::size_t best = 0;
        for (std::size_t i = 1; i < front.size(); ++i)
            if (gains[i] > gains[best]) best = i;
        select(front[best], gains[best]);
    }

    std::vector<View> views;
    for (std::size_t s : out.selected) views.push_back(cand[s]);
    out.trajectory = Trajectory(std::move(views));
    return out;
}

} // namespace avrplan
