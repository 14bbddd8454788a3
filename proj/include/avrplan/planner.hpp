#ifndef AVRPLAN_PLANNER_HPP_
#define AVRPLAN_PLANNER_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "avrplan/avr.hpp"
#include "avrplan/baselines.hpp"
#include "avrplan/gridtour.hpp"
#include "avrplan/quality.hpp"

namespace avrplan {

// Feasibility probe: directions on the front hemisphere of each face.
inline constexpr int kProbeDirections = 64;

// Proxy degradation applied to the ground truth after the explore pass.
inline constexpr double kProxyDecimation = 0.5;
inline constexpr double kProxyNoise = 0.1;

// A later visit ends the run when it adds fewer views or a smaller pass
// fraction gain than these.
inline constexpr std::size_t kMinVisitViews = 5;
inline constexpr double kMinVisitGain = 0.005;

// Grid resolution at which any point of a plane parallel to a grid, at
// distance d, sees at least three lattice views within the distance band:
// the third-nearest lattice point of a unit-r square lattice lies at most
// r sqrt(5) / 2 away, kept 10% inside the band radius.
double default_resolution(const QualityParams& params);

// One flag per face: set when no point at distance d in the face's front
// hemisphere (kProbeDirections samples) has line of sight to its centroid.
std::vector<std::uint8_t> feasibility_probe(const Scene& scene, const QualityParams& params);

// Faces failing the count or quality constraint; infeasible faces excluded.
std::vector<std::size_t> identify_low_quality(const CoverageReport& report);

struct PlannerOptions {
    std::size_t k = 0;       // cluster count; 0 = automatic
    double r = 0.0;          // grid resolution; 0 = default_resolution
    int max_visits = 4;
    std::uint64_t seed = 1;
    bool open_tour = false;
    ZigZagSpec zigzag;
};

struct VisitPlan {
    std::vector<AvrPatch> patches;
    TourPlan tour;
    Trajectory trajectory;  // closed unless the open-tour option is set
};

// AVR and tour planning restricted to the listed proxy faces, within
// `remaining_budget` views. Throws BudgetError when the budget cannot hold
// the plan.
VisitPlan plan_visit(std::span<const std::size_t> faces, const TriangleMesh& proxy, const QualityParams& params,
                     const PlannerOptions& options, std::size_t remaining_budget);

struct IterationState {
    int visit = 0;  // 1-based; visit 1 is the explore pass
    TriangleMesh proxy;  // mesh the visit was planned on
    Trajectory trajectory;
    Trajectory cumulative;
    CoverageReport report;  // on the ground truth, for the cumulative views
    std::size_t added_views = 0;
    std::size_t planned_views = 0;  // cumulative, excluding the explore pass
    std::size_t low_quality_faces = 0;  // after this visit
    std::optional<BoundCertificate> certificate;
    std::size_t rectangles = 0;
    double resolution = 0.0;
    std::string note;  // why the run stopped after this visit, if it did
};

// Explore pass, full AVR plan on the degraded proxy, then refinement visits
// on low-quality faces of the refreshed proxy.
std::vector<IterationState> run_pipeline(const TriangleMesh& ground_truth, const QualityParams& params,
                                         const PlannerOptions& options);

// Refreshed proxy: ground-truth faces that pass, plus proxy faces whose
// nearest ground-truth face does not. `low` receives the indices (into the
// returned mesh) of proxy faces standing in for low-quality faces.
TriangleMesh refresh_proxy(const Scene& ground_truth, const CoverageReport& report, const TriangleMesh& proxy0,
                           std::vector<std::size_t>& low);

} // namespace avrplan

#endif
