#include "avrplan/planner.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "avrplan/errors.hpp"
#include "avrplan/parallel.hpp"

namespace avrplan {

double default_resolution(const QualityParams& params) {
    const double reach = params.max_distance();
    const double rho = std::min(std::sqrt(std::max(reach * reach - params.d * params.d, 0.0)),
                                params.d * std::tan(kHalfFov));
    return std::max(0.9 * 2.0 * rho / std::sqrt(5.0), 0.1 * params.d);
}

std::vector<std::uint8_t> feasibility_probe(const Scene& scene, const QualityParams& params) {
    const TriangleMesh& mesh = scene.mesh();
    const double top = mesh.bounds().max.z() + params.max_distance() + 1.0;
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    std::vector<std::uint8_t> infeasible(mesh.face_count(), 1);
    parallel_for(mesh.face_count(), [&](std::size_t f) {
        const Vec3& n = mesh.normal(f);
        const Vec3 helper = std::abs(n.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
        const Vec3 e1 = n.cross(helper).normalized();
        const Vec3 e2 = n.cross(e1);
        const Vec3& c = mesh.centroid(f);
        for (int i = 0; i < kProbeDirections; ++i) {
            const double z = 1.0 - (i + 0.5) / kProbeDirections;
            const double rad = std::sqrt(1.0 - z * z);
            const double phi = golden * i;
            const Vec3 dir = rad * std::cos(phi) * e1 + rad * std::sin(phi) * e2 + z * n;
            const Vec3 probe = c + params.d * dir;
            if (scene.bvh().occluded(probe, c)) continue;
            // A probe enclosed by geometry (inside a box) has no open sky.
            if (probe.z() < top && scene.bvh().occluded(probe, Vec3(probe.x(), probe.y(), top))) continue;
            infeasible[f] = 0;
            break;
        }
    });
    return infeasible;
}

std::vector<std::size_t> identify_low_quality(const CoverageReport& report) {
    std::vector<std::size_t> out;
    for (std::size_t f = 0; f < report.faces.size(); ++f) {
        const FaceStatus s = report.faces[f].status;
        if (s == FaceStatus::fail_count || s == FaceStatus::fail_quality) out.push_back(f);
    }
    return out;
}

VisitPlan plan_visit(std::span<const std::size_t> faces, const TriangleMesh& proxy, const QualityParams& params,
                     const PlannerOptions& options, std::size_t remaining_budget) {
    if (faces.empty()) throw InvalidArgument("a visit needs at least one face to plan for");
    const double r = options.r > 0.0 ? options.r : default_resolution(params);
    VisitPlan plan;
    plan.patches = build_avr(proxy, faces, params, AvrOptions{options.k, r, options.seed});
    std::vector<ViewingRectangle> rects;
    rects.reserve(plan.patches.size());
    for (const auto& p : plan.patches) rects.push_back(p.rect);
    plan.tour = plan_tour(rects, r, params.d, remaining_budget);
    plan.trajectory = plan.tour.tour.trajectory;
    if (options.open_tour) plan.trajectory.set_closed(false);
    return plan;
}

TriangleMesh refresh_proxy(const Scene& ground_truth, const CoverageReport& report, const TriangleMesh& proxy0,
                           std::vector<std::size_t>& low) {
    const TriangleMesh& gt = ground_truth.mesh();
    std::vector<std::size_t> passing;
    for (std::size_t f = 0; f < gt.face_count(); ++f)
        if (report.faces[f].status == FaceStatus::pass) passing.push_back(f);

    const std::size_t np = proxy0.face_count();
    std::vector<std::size_t> nearest_gt(np);
    parallel_for(np, [&](std::size_t g) { nearest_gt[g] = ground_truth.bvh().closest_point(proxy0.centroid(g)).face; });

    // Every low-quality face keeps at least its nearest proxy face, so small
    // regions are not lost to the decimation.
    std::vector<std::uint8_t> forced(np, 0);
    const auto low_gt = identify_low_quality(report);
    if (!low_gt.empty()) {
        const Bvh proxy_bvh(proxy0);
        for (std::size_t f : low_gt) forced[proxy_bvh.closest_point(gt.centroid(f)).face] = 1;
    }

    std::vector<std::size_t> kept;
    low.clear();
    for (std::size_t g = 0; g < np; ++g) {
        const FaceStatus s = report.faces[nearest_gt[g]].status;
        if (s == FaceStatus::pass && !forced[g]) continue;
        if (forced[g] || s == FaceStatus::fail_count || s == FaceStatus::fail_quality)
            low.push_back(passing.size() + kept.size());
        kept.push_back(g);
    }
    if (passing.empty()) return proxy0.submesh(kept);
    if (kept.empty()) return gt.submesh(passing);
    return concatenate(gt.submesh(passing), proxy0.submesh(kept));
}

std::vector<IterationState> run_pipeline(const TriangleMesh& ground_truth, const QualityParams& params,
                                         const PlannerOptions& options) {
    params.validate();
    if (options.max_visits < 2) throw InvalidArgument("the pipeline needs at least two visits");
    if (ground_truth.empty()) throw EmptySceneError("ground-truth mesh has no faces");
    const Scene gt(ground_truth);
    const auto infeasible = feasibility_probe(gt, params);
    const auto budget = static_cast<std::size_t>(params.budget);
    const double r = options.r > 0.0 ? options.r : default_resolution(params);

    std::vector<IterationState> states;
    Trajectory cumulative;
    std::size_t planned = 0;

    auto record = [&](int visit, TriangleMesh proxy, Trajectory traj, const VisitPlan* plan, std::string note) {
        IterationState s;
        s.visit = visit;
        s.proxy = std::move(proxy);
        s.added_views = traj.size();
        cumulative.append(traj);
        if (visit >= 2) planned += traj.size();
        s.trajectory = std::move(traj);
        s.cumulative = cumulative;
        s.planned_views = planned;
        s.report = evaluate_coverage(gt, cumulative.span(), params, infeasible);
        s.low_quality_faces = identify_low_quality(s.report).size();
        s.resolution = r;
        if (plan) {
            s.certificate = plan->tour.tour.certificate;
            s.rectangles = plan->patches.size();
            s.resolution = plan->tour.r;
        }
        s.note = std::move(note);
        states.push_back(std::move(s));
        return states.back().report.pass_fraction();
    };

    // Visit 1: explore pass, then a degraded proxy of what it saw.
    record(1, TriangleMesh{}, plan_zigzag(ground_truth.bounds(), options.zigzag), nullptr, "");
    const TriangleMesh proxy0 = degrade_proxy(ground_truth, kProxyDecimation, kProxyNoise, options.seed);

    // Visit 2: full plan on the proxy.
    {
        std::vector<std::size_t> all(proxy0.face_count());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
        try {
            const VisitPlan plan = plan_visit(all, proxy0, params, options, budget);
            record(2, proxy0, plan.trajectory, &plan, "");
        } catch (const BudgetError& e) {
            record(2, proxy0, Trajectory{}, nullptr, std::string("budget: ") + e.what());
            return states;
        }
    }

    for (int visit = 3; visit <= options.max_visits; ++visit) {
        const CoverageReport& last = states.back().report;
        const double before = last.pass_fraction();
        if (identify_low_quality(last).empty()) {
            record(visit, TriangleMesh{}, Trajectory{}, nullptr, "converged: no low-quality faces");
            break;
        }
        if (planned >= budget) {
            record(visit, TriangleMesh{}, Trajectory{}, nullptr, "budget exhausted");
            break;
        }
        std::vector<std::size_t> low;
        TriangleMesh proxy = refresh_proxy(gt, last, proxy0, low);
        if (low.empty()) {
            record(visit, std::move(proxy), Trajectory{}, nullptr, "converged: no low-quality proxy faces");
            break;
        }
        try {
            PlannerOptions o = options;
            o.seed = options.seed + static_cast<std::uint64_t>(visit);
            const VisitPlan plan = plan_visit(low, proxy, params, o, budget - planned);
            const double after = record(visit, std::move(proxy), plan.trajectory, &plan, "");
            if (plan.trajectory.size() < kMinVisitViews || after - before < kMinVisitGain) {
                states.back().note = "converged: small improvement";
                break;
            }
        } catch (const BudgetError& e) {
            record(visit, std::move(proxy), Trajectory{}, nullptr, std::string("budget: ") + e.what());
            break;
        }
    }
    return states;
}

} // namespace avrplan
