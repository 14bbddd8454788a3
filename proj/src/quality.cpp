#include "avrplan/quality.hpp"

#include <algorithm>
#include <limits>
#include <numbers>

#include "avrplan/errors.hpp"
#include "avrplan/parallel.hpp"

namespace avrplan {

void QualityParams::validate() const {
    if (!(d > 0.0)) throw InvalidArgument("viewing distance d must be positive");
    if (!(epsilon_d >= 0.0)) throw InvalidArgument("distance tolerance must be non-negative");
    if (epsilon_d > max_epsilon(d) * (1.0 + 1e-12))
        throw InvalidArgument("distance tolerance exceeds (sqrt(2) - 1) d / 2");
    if (t < 2) throw InvalidArgument("minimum visible-view count t must be at least 2");
    if (!(q_star > 0.0)) throw InvalidArgument("quality threshold must be positive");
    if (budget <= 0) throw InvalidArgument("view budget must be positive");
    for (const auto& a : {min_angle, max_angle}) {
        if (a && !(*a >= 0.0 && *a <= std::numbers::pi)) throw InvalidArgument("angle bound outside [0, pi]");
    }
    if (min_angle && max_angle && *min_angle > *max_angle) throw InvalidArgument("min angle exceeds max angle");
}

const char* to_string(FaceStatus status) {
    switch (status) {
    case FaceStatus::pass: return "pass";
    case FaceStatus::fail_count: return "fail-count";
    case FaceStatus::fail_quality: return "fail-quality";
    case FaceStatus::infeasible: return "infeasible";
    }
    return "unknown";
}

std::size_t CoverageReport::count(FaceStatus status) const {
    return static_cast<std::size_t>(
        std::count_if(faces.begin(), faces.end(), [&](const FaceCoverage& f) { return f.status == status; }));
}

double CoverageReport::pass_fraction() const {
    const std::size_t feasible = feasible_count();
    return feasible == 0 ? 0.0 : static_cast<double>(count(FaceStatus::pass)) / static_cast<double>(feasible);
}

double CoverageReport::mean_quality() const {
    if (faces.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& f : faces) sum += f.quality.quality;
    return sum / static_cast<double>(faces.size());
}

double CoverageReport::min_quality() const {
    double m = faces.empty() ? 0.0 : std::numeric_limits<double>::infinity();
    for (const auto& f : faces) m = std::min(m, f.quality.quality);
    return m;
}

std::vector<std::size_t> CoverageReport::visible_histogram(std::size_t buckets) const {
    std::vector<std::size_t> h(std::max<std::size_t>(buckets, 1), 0);
    for (const auto& f : faces) ++h[std::min(f.visible_count, h.size() - 1)];
    return h;
}

double triangulation_angle(const Vec3& target, const Vec3& a, const Vec3& b) {
    const Vec3 ra = a - target, rb = b - target;
    return std::atan2(ra.cross(rb).norm(), ra.dot(rb));
}

double pair_quality(const Vec3& target, const Vec3& a, const Vec3& b) {
    return std::sin(triangulation_angle(target, a, b)) / ((a - target).norm() * (b - target).norm());
}

bool is_visible(const Scene& scene, std::size_t face, const View& view, const QualityParams& params) {
    const TriangleMesh& mesh = scene.mesh();
    const Vec3& c = mesh.centroid(face);
    const Vec3 to_camera = view.position - c;
    const double dist = to_camera.norm();
    constexpr double kSlack = 1e-12;
    if (dist < params.min_distance() - kSlack || dist > params.max_distance() + kSlack) return false;
    if (!(mesh.normal(face).dot(to_camera) > 0.0)) return false;
    if (-view.direction.dot(to_camera) < std::cos(kHalfFov) * dist - kSlack * dist) return false;
    return !scene.bvh().occluded(view.position, c);
}

std::vector<std::size_t> visible_set(const Scene& scene, std::size_t face, std::span<const View> views,
                                     const QualityParams& params) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < views.size(); ++i)
        if (is_visible(scene, face, views[i], params)) out.push_back(i);
    return out;
}

FaceQuality face_quality(const Vec3& centroid, std::span<const View> views, std::span<const std::size_t> visible,
                         const QualityParams& params) {
    FaceQuality best;
    double best_angle = -1.0;
    for (std::size_t a = 0; a < visible.size(); ++a) {
        for (std::size_t b = a + 1; b < visible.size(); ++b) {
            const Vec3& pa = views[visible[a]].position;
            const Vec3& pb = views[visible[b]].position;
            const double angle = triangulation_angle(centroid, pa, pb);
            if (params.min_angle && angle < *params.min_angle) continue;
            if (params.max_angle && angle > *params.max_angle) continue;
            if (angle > best_angle) {
                best_angle = angle;
                best.best_pair = std::make_pair(visible[a], visible[b]);
            }
        }
    }
    if (best.best_pair) {
        const Vec3& pa = views[best.best_pair->first].position;
        const Vec3& pb = views[best.best_pair->second].position;
        best.theta = best_angle;
        best.quality = std::sin(best_angle) / ((pa - centroid).norm() * (pb - centroid).norm());
    }
    return best;
}

FaceQuality face_quality(const Scene& scene, std::size_t face, std::span<const View> views,
                         const QualityParams& params) {
    const auto visible = visible_set(scene, face, views, params);
    return face_quality(scene.mesh().centroid(face), views, visible, params);
}

FaceStatus classify(std::size_t visible_count, double quality, const QualityParams& params, bool infeasible) {
    if (visible_count >= static_cast<std::size_t>(params.t) && quality >= params.q_star) return FaceStatus::pass;
    if (infeasible) return FaceStatus::infeasible;
    return visible_count < static_cast<std::size_t>(params.t) ? FaceStatus::fail_count : FaceStatus::fail_quality;
}

CoverageReport evaluate_coverage(const Scene& scene, std::span<const View> views, const QualityParams& params,
                                 std::span<const std::uint8_t> infeasible) {
    const std::size_t n = scene.mesh().face_count();
    if (!infeasible.empty() && infeasible.size() != n)
        throw InvalidArgument("infeasible mask size does not match face count");
    CoverageReport report;
    report.faces.resize(n);
    parallel_for(n, [&](std::size_t f) {
        const auto visible = visible_set(scene, f, views, params);
        FaceCoverage& out = report.faces[f];
        out.visible_count = visible.size();
        out.quality = face_quality(scene.mesh().centroid(f), views, visible, params);
        out.status = classify(out.visible_count, out.quality.quality, params, !infeasible.empty() && infeasible[f]);
    });
    return report;
}

} // namespace avrplan
