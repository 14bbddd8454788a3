#ifndef AVRPLAN_GEOMETRY2D_HPP_
#define AVRPLAN_GEOMETRY2D_HPP_

#include <span>
#include <vector>

#include "avrplan/mesh.hpp"

namespace avrplan {

// Counter-clockwise convex hull without collinear points (Andrew's monotone
// chain). Fewer than three points or a collinear set yield a hull with fewer
// than three vertices.
std::vector<Vec2> convex_hull(std::span<const Vec2> points);

double polygon_area(std::span<const Vec2> polygon);  // signed, CCW positive
Vec2 polygon_centroid(std::span<const Vec2> polygon);

// Oriented rectangle: center, unit axis for the first half-extent, and
// half-extents along axis and along its left perpendicular.
struct OrientedRect2 {
    Vec2 center = Vec2::Zero();
    Vec2 axis = Vec2::UnitX();
    double half_u = 0.0;
    double half_v = 0.0;

    double area() const { return 4.0 * half_u * half_v; }
    Vec2 perp() const { return Vec2(-axis.y(), axis.x()); }
};

// Minimum-area enclosing rectangle by rotating calipers over the hull edges.
// Requires a hull with at least three vertices.
OrientedRect2 min_area_rectangle(std::span<const Vec2> hull);

// Enclosing rectangle with a fixed axis direction.
OrientedRect2 bounding_rectangle(std::span<const Vec2> points, const Vec2& axis);

// Part of a convex polygon with n.p >= c (Sutherland-Hodgman, one plane).
std::vector<Vec2> clip_half_plane(std::span<const Vec2> polygon, const Vec2& n, double c);

} // namespace avrplan

#endif
