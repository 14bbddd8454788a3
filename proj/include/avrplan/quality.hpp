#ifndef AVRPLAN_QUALITY_HPP_
#define AVRPLAN_QUALITY_HPP_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "avrplan/mesh.hpp"
#include "avrplan/raycast.hpp"
#include "avrplan/trajectory.hpp"

namespace avrplan {

// Reconstruction-quality constraints of the planning problem.
struct QualityParams {
    double d = 5.0;                         // target viewing distance (m)
    double epsilon_d = max_epsilon(5.0);    // distance tolerance (m)
    int t = 3;                              // minimum visible-view count
    double q_star = 0.014;                  // quality threshold (1/m^2)
    int budget = 300;                       // view budget B
    // Optional triangulation-angle window on eligible pairs (radians).
    std::optional<double> min_angle;
    std::optional<double> max_angle;

    // Largest tolerance that keeps features at the image border within the
    // band for a pi/2 field of view: (sqrt(2) - 1) d / 2.
    static double max_epsilon(double d) { return (std::sqrt(2.0) - 1.0) * d / 2.0; }

    // Params for viewing distance d with the widest admissible tolerance.
    static QualityParams for_distance(double d) {
        QualityParams p;
        p.d = d;
        p.epsilon_d = max_epsilon(d);
        return p;
    }

    double min_distance() const { return d - epsilon_d; }
    double max_distance() const { return d + epsilon_d; }

    // Throws InvalidArgument when a field is outside its valid range.
    void validate() const;
};

enum class FaceStatus { pass, fail_count, fail_quality, infeasible };

const char* to_string(FaceStatus status);

struct FaceQuality {
    double theta = 0.0;    // max pairwise angle at the centroid (rad)
    double quality = 0.0;  // sin(theta) / (|s_i - C| |s_j - C|) for the argmax pair
    std::optional<std::pair<std::size_t, std::size_t>> best_pair;  // trajectory indices
};

struct FaceCoverage {
    std::size_t visible_count = 0;
    FaceQuality quality;
    FaceStatus status = FaceStatus::fail_count;
};

struct CoverageReport {
    std::vector<FaceCoverage> faces;
    // Faces whose status is infeasible are excluded from the pass fraction.
    std::size_t count(FaceStatus status) const;
    std::size_t feasible_count() const { return faces.size() - count(FaceStatus::infeasible); }
    double pass_fraction() const;
    double mean_quality() const;
    double min_quality() const;
    // histogram[k] = number of faces with exactly k visible views; the last
    // bucket collects every count at or above its index.
    std::vector<std::size_t> visible_histogram(std::size_t buckets = 11) const;
};

// Angle subtended at `target` by two camera positions, in [0, pi].
double triangulation_angle(const Vec3& target, const Vec3& a, const Vec3& b);

// sin(angle) / (|a - target| |b - target|).
double pair_quality(const Vec3& target, const Vec3& a, const Vec3& b);

// Visibility of face f from a view: line of sight to the centroid, distance
// within [d - eps, d + eps], centroid inside the view cone of half-angle pi/4
// and the face fronting the camera.
bool is_visible(const Scene& scene, std::size_t face, const View& view, const QualityParams& params);

// Trajectory indices of the views that see the face, ascending.
std::vector<std::size_t> visible_set(const Scene& scene, std::size_t face, std::span<const View> views,
                                     const QualityParams& params);

// Quality over a given visible set. Pairs outside the optional angle window
// are skipped; the first pair (lexicographic in `visible`) reaching the max
// angle is the argmax.
FaceQuality face_quality(const Vec3& centroid, std::span<const View> views, std::span<const std::size_t> visible,
                         const QualityParams& params);

FaceQuality face_quality(const Scene& scene, std::size_t face, std::span<const View> views,
                         const QualityParams& params);

FaceStatus classify(std::size_t visible_count, double quality, const QualityParams& params, bool infeasible);

// One record per face. `infeasible` (optional, one flag per face) marks faces
// that no admissible view can see; those report status infeasible unless they pass.
CoverageReport evaluate_coverage(const Scene& scene, std::span<const View> views, const QualityParams& params,
                                 std::span<const std::uint8_t> infeasible = {});

} // namespace avrplan

#endif
