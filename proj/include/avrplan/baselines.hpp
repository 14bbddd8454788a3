#ifndef AVRPLAN_BASELINES_HPP_
#define AVRPLAN_BASELINES_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "avrplan/gridtour.hpp"
#include "avrplan/quality.hpp"
#include "avrplan/raycast.hpp"
#include "avrplan/trajectory.hpp"

namespace avrplan {

struct ZigZagSpec {
    double altitude = 20.0;  // absolute z of every view (m)
    double spacing = 1.0;    // lane and along-lane spacing (m)

    void validate(const Aabb& bounds) const;
};

// Nadir serpentine over the xy footprint of `bounds`. Lanes run along the
// longer side; lane and view counts are floor(side / spacing) + 1 with equal
// margins.
Trajectory plan_zigzag(const Aabb& bounds, const ZigZagSpec& spec = {});

// Closed-form length of plan_zigzag for the same footprint.
double zigzag_length(const Aabb& bounds, const ZigZagSpec& spec = {});

// 1 m lattice over the scene bounds grown by d + eps, restricted to points
// whose nearest surface point is within the distance band and in front of
// its face.
std::vector<Vec3> uniform_candidates(const Scene& proxy, const QualityParams& params, double resolution = 1.0);

// Farthest-point selection starting from index 0; ties go to the lowest index.
std::vector<std::size_t> farthest_point_sample(std::span<const Vec3> points, std::size_t count);

// Nearest-neighbour tour from point 0 improved by 2-opt; returns the visiting order.
std::vector<std::size_t> short_tour(std::span<const Vec3> points, bool closed = true);

// Selects `view_count` candidates by farthest-point sampling, orients each
// toward its nearest proxy point and orders them by short_tour.
Trajectory plan_uniform_grid(const Scene& proxy, std::size_t view_count, const QualityParams& params,
                             double resolution = 1.0);

enum class GainReading {
    literal,    // sum of Q over chi(C + s) - chi(s)
    new_faces,  // sum of Q over chi(C + s) - chi(C)
};

struct GvsResult {
    Trajectory trajectory;               // selection order
    std::vector<std::size_t> selected;   // candidate indices
    std::vector<double> gains;           // gain of each pick; first pick has none recorded as 0
    bool stopped_early = false;
};

// Neighbour radius for greedy view selection (m).
inline constexpr double kGvsNeighbourRadius = 1.0;

// Marginal gain of adding candidate s to the selection, recomputed from the
// visible sets alone.
double gvs_gain(const Scene& proxy, std::span<const View> candidates, std::span<const std::size_t> selected,
                std::size_t s, const QualityParams& params, GainReading reading);

// Greedy view selection over the grid views. Starts from a seed-chosen
// candidate; each step adds the neighbour (within 1 m of a selected view)
// with the largest gain, lowest index on ties. Stops at `view_budget` or
// when no unselected neighbour remains.
GvsResult plan_gvs(std::span<const ViewingGrid> grids, const Scene& proxy, const QualityParams& params,
                   std::size_t view_budget, std::uint64_t seed, GainReading reading = GainReading::literal);

} // namespace avrplan

#endif
