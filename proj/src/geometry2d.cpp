#include "avrplan/geometry2d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "avrplan/errors.hpp"

namespace avrplan {

namespace {

double cross(const Vec2& o, const Vec2& a, const Vec2& b) {
    return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

} // namespace

std::vector<Vec2> convex_hull(std::span<const Vec2> points) {
    std::vector<Vec2> pts(points.begin(), points.end());
    std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
        return a.x() != b.x() ? a.x() < b.x() : a.y() < b.y();
    });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3) return pts;
    std::vector<Vec2> hull(2 * pts.size());
    std::size_t k = 0;
    for (const auto& p : pts) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
        hull[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
        while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

double polygon_area(std::span<const Vec2> polygon) {
    double sum = 0.0;
    for (std::size_t i = 0; i < polygon.size(); ++i) {
        const Vec2& a = polygon[i];
        const Vec2& b = polygon[(i + 1) % polygon.size()];
        sum += a.x() * b.y() - b.x() * a.y();
    }
    return 0.5 * sum;
}

Vec2 polygon_centroid(std::span<const Vec2> polygon) {
    const double area = polygon_area(polygon);
    if (std::abs(area) < 1e-300) {
        Vec2 mean = Vec2::Zero();
        for (const auto& p : polygon) mean += p;
        return polygon.empty() ? mean : Vec2(mean / static_cast<double>(polygon.size()));
    }
    Vec2 c = Vec2::Zero();
    for (std::size_t i = 0; i < polygon.size(); ++i) {
        const Vec2& a = polygon[i];
        const Vec2& b = polygon[(i + 1) % polygon.size()];
        const double w = a.x() * b.y() - b.x() * a.y();
        c += (a + b) * w;
    }
    return c / (6.0 * area);
}

OrientedRect2 bounding_rectangle(std::span<const Vec2> points, const Vec2& axis) {
    const Vec2 u = axis.normalized();
    const Vec2 v(-u.y(), u.x());
    double umin = std::numeric_limits<double>::infinity(), umax = -umin;
    double vmin = umin, vmax = -umin;
    for (const auto& p : points) {
        umin = std::min(umin, p.dot(u));
        umax = std::max(umax, p.dot(u));
        vmin = std::min(vmin, p.dot(v));
        vmax = std::max(vmax, p.dot(v));
    }
    OrientedRect2 r;
    r.axis = u;
    r.half_u = 0.5 * (umax - umin);
    r.half_v = 0.5 * (vmax - vmin);
    r.center = 0.5 * (umin + umax) * u + 0.5 * (vmin + vmax) * v;
    return r;
}

OrientedRect2 min_area_rectangle(std::span<const Vec2> hull) {
    const std::size_t n = hull.size();
    if (n < 3) throw DegenerateClusterError("minimum rectangle needs a hull with positive area");

    // Caliper indices: farthest along the edge, farthest from it, and
    // farthest against the edge. Each only moves forward as the edge turns.
    std::size_t right = 0, top = 0, left = 0;
    OrientedRect2 best;
    double best_area = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& base = hull[i];
        const Vec2 e = (hull[(i + 1) % n] - base).normalized();
        const Vec2 up(-e.y(), e.x());  // interior side for a CCW hull
        auto along = [&](std::size_t k) { return (hull[k % n] - base).dot(e); };
        auto height = [&](std::size_t k) { return (hull[k % n] - base).dot(up); };
        if (i == 0) {
            right = 1;
            for (std::size_t k = 0; k < n; ++k)
                if (along(k) > along(right)) right = k;
            top = right;
            for (std::size_t k = 0; k < n; ++k)
                if (height(k) > height(top)) top = k;
            left = top;
            for (std::size_t k = 0; k < n; ++k)
                if (along(k) < along(left)) left = k;
        } else {
            for (std::size_t step = 0; step < n && along(right + 1) > along(right); ++step) right = (right + 1) % n;
            for (std::size_t step = 0; step < n && height(top + 1) > height(top); ++step) top = (top + 1) % n;
            for (std::size_t step = 0; step < n && along(left + 1) < along(left); ++step) left = (left + 1) % n;
        }
        const double umax = along(right), umin = std::min(0.0, along(left));
        const double vmax = height(top);
        const double area = (umax - umin) * vmax;
        if (area < best_area) {
            best_area = area;
            best.axis = e;
            best.half_u = 0.5 * (umax - umin);
            best.half_v = 0.5 * vmax;
            best.center = base + 0.5 * (umax + umin) * e + 0.5 * vmax * up;
        }
    }
    return best;
}

std::vector<Vec2> clip_half_plane(std::span<const Vec2> polygon, const Vec2& n, double c) {
    std::vector<Vec2> out;
    for (std::size_t i = 0; i < polygon.size(); ++i) {
        const Vec2& a = polygon[i];
        const Vec2& b = polygon[(i + 1) % polygon.size()];
        const double da = n.dot(a) - c, db = n.dot(b) - c;
        if (da >= 0.0) out.push_back(a);
        if ((da >= 0.0) != (db >= 0.0)) out.push_back(a + (da / (da - db)) * (b - a));
    }
    return out;
}

} // namespace avrplan
