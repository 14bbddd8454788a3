#ifndef AVRPLAN_GRIDTOUR_HPP_
#define AVRPLAN_GRIDTOUR_HPP_

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "avrplan/avr.hpp"
#include "avrplan/errors.hpp"
#include "avrplan/trajectory.hpp"

namespace avrplan {

// Lattice of views on a rectangle. Point (i, j) sits at offset i*r along u
// and j*r along v from the lower corner, inset by equal margins on both
// sides; its index is i * count_v + j. Every view looks along -normal.
struct ViewingGrid {
    ViewingRectangle rect;
    double r = 0.0;
    std::size_t count_u = 0;
    std::size_t count_v = 0;
    std::vector<View> views;

    std::size_t size() const { return views.size(); }
    std::size_t index(std::size_t i, std::size_t j) const { return i * count_v + j; }
};

// Points per axis: floor(side / r) + 1, with a 1e-9 guard against rounding.
std::size_t lattice_count(double side, double r);

ViewingGrid impose_grid(const ViewingRectangle& rect, double r);

// Serpentine visiting order over lattice indices. Lanes run along the axis
// with more points (u on ties); lanes alternate direction.
std::vector<std::size_t> boustrophedon_order(const ViewingGrid& grid);

Trajectory boustrophedon_tour(const ViewingGrid& grid);

struct MstEdge {
    std::size_t parent = 0;        // grid already in the tree
    std::size_t child = 0;
    std::size_t parent_point = 0;  // lattice index realizing the distance
    std::size_t child_point = 0;
    double weight = 0.0;
};

// Minimum distance between two grids over all lattice-point pairs. The pair
// returned is the first minimal one in (a, b) index order.
MstEdge grid_distance(const ViewingGrid& a, const ViewingGrid& b);

// Prim's algorithm over the complete grid graph, rooted at grid 0. Edges are
// listed in insertion order; ties go to the lowest (parent, child) indices.
std::vector<MstEdge> grid_mst(std::span<const ViewingGrid> grids);

double mst_weight(std::span<const MstEdge> edges);

struct BoundCertificate {
    double r = 0.0;
    double d = 0.0;
    std::vector<double> tour_lengths;     // l_i, open serpentine per grid
    std::vector<double> closing_lengths;  // last to first lattice point per grid
    std::vector<double> areas;
    double total_area = 0.0;
    std::vector<MstEdge> mst;
    double mst_weight = 0.0;
    double stitching_overhead = 0.0;  // l_f - sum(l_i)
    double final_length = 0.0;        // l_f, closed tour
    double bound = 0.0;               // 3 sum(Area) / r + 2 MST
    double slack = 0.0;               // grid count * 2r
    double lower_bound = 0.0;
    double ratio = 0.0;               // l_f / lower_bound

    // Recomputes l_f <= bound + slack and every l_i <= 3 Area_i / r from the
    // stored components.
    bool holds() const;
    bool per_rectangle_holds() const;
};

class CertificateViolation : public Error {
public:
    using Error::Error;
};

struct StitchedTour {
    Trajectory trajectory;  // closed
    // (grid, lattice index) for every trajectory view.
    std::vector<std::pair<std::size_t, std::size_t>> sources;
    BoundCertificate certificate;
};

// Walks the doubled MST from grid 0. Each grid's serpentine, closed into a
// cycle, is entered at the lattice point of its MST edge; child grids are
// visited as detours at their attachment points and later repeats are
// shortcut. Throws CertificateViolation if the bound fails and InvalidArgument
// if the MST does not span the grids.
StitchedTour stitch_tour(std::span<const ViewingGrid> grids, std::span<const MstEdge> mst, double d);

// max(sum(area) / (4d), MST weight).
double lower_bound(std::span<const double> areas, double mst_weight, double d);

struct TourPlan {
    std::vector<ViewingGrid> grids;
    StitchedTour tour;
    double r = 0.0;
    int coarsen_steps = 0;
};

class BudgetError : public Error {
public:
    BudgetError(const std::string& message, Trajectory partial)
        : Error(message), partial_(std::move(partial)) {}
    const Trajectory& partial() const { return partial_; }

private:
    Trajectory partial_;
};

// Grids, MST and stitched tour over the rectangles at resolution r. While
// the lattice holds more than `budget` points, r grows by 1.25 and the
// rectangles are widened to the new r. When every grid is already minimal
// and the budget still fails, throws BudgetError with the first `budget`
// views of the tour.
TourPlan plan_tour(std::span<const ViewingRectangle> rects, double r, double d, std::size_t budget);

} // namespace avrplan

#endif
