#ifndef AVRPLAN_RUN_HPP_
#define AVRPLAN_RUN_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "avrplan/baselines.hpp"
#include "avrplan/mesh.hpp"
#include "avrplan/planner.hpp"
#include "avrplan/quality.hpp"

namespace avrplan {

enum class PlannerKind { avr, zigzag, uniform, gvs };

const char* to_string(PlannerKind kind);
PlannerKind planner_kind_from_string(const std::string& name);

struct RunConfig {
    SceneSpec scene;  // kind loaded_file reads scene.path
    PlannerKind planner = PlannerKind::avr;
    QualityParams params;
    std::size_t k = 0;      // 0 = automatic
    double r = 0.0;         // 0 = default_resolution(params)
    int max_visits = 4;
    std::uint64_t seed = 1;
    bool open_tour = false;
    GainReading gain = GainReading::literal;
    std::filesystem::path out;  // empty = no artifacts

    // Throws InvalidArgument on any out-of-range field.
    void validate() const;
    PlannerOptions planner_options() const;
};

nlohmann::json to_json(const RunConfig& config);
RunConfig run_config_from_json(const nlohmann::json& j);

struct RunSummary {
    PlannerKind planner = PlannerKind::avr;
    std::size_t views = 0;           // planned views; the explore pass is reported separately
    std::size_t explore_views = 0;
    double tour_length = 0.0;
    double pass_fraction = 0.0;
    double mean_q = 0.0;
    std::optional<double> bound_ratio;
    std::vector<std::size_t> visit_views;  // per visit, explore pass first (avr only)
    bool stopped_early = false;            // gvs ran out of neighbours
    nlohmann::json coverage;               // coverage summary of the evaluated views
};

nlohmann::json to_json(const RunSummary& summary, const RunConfig& config);

struct RunResult {
    RunSummary summary;
    Trajectory trajectory;  // planned views evaluated for the summary
    CoverageReport report;
    std::vector<IterationState> visits;  // avr only
};

// Generated or loaded ground truth, with faces above (d/4)^2 subdivided.
TriangleMesh load_scene(const RunConfig& config);

// Runs one planner. Uniform-grid and greedy selection first run the AVR
// pipeline to match its planned view count. Writes artifacts when
// config.out is set.
RunResult run(const RunConfig& config);

// Runs all four planners on the same scene, each into out/<planner>, and
// writes out/compare.csv.
std::vector<RunResult> compare(const RunConfig& config);

// One row per run directory holding a summary.json, sorted by pass fraction
// (descending, then directory name). Missing summaries are skipped with a
// warning on `warn`. Run names are given relative to `base` when it is set.
void report(const std::vector<std::filesystem::path>& run_dirs, std::ostream& csv, std::ostream& warn,
            const std::filesystem::path& base = {});

} // namespace avrplan

#endif
