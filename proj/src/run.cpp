#include "avrplan/run.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <sstream>

#include "avrplan/errors.hpp"
#include "avrplan/serialize.hpp"

namespace avrplan {

namespace fs = std::filesystem;

const char* to_string(PlannerKind kind) {
    switch (kind) {
    case PlannerKind::avr: return "avr";
    case PlannerKind::zigzag: return "zigzag";
    case PlannerKind::uniform: return "uniform";
    case PlannerKind::gvs: return "gvs";
    }
    return "unknown";
}

PlannerKind planner_kind_from_string(const std::string& name) {
    if (name == "avr") return PlannerKind::avr;
    if (name == "zigzag") return PlannerKind::zigzag;
    if (name == "uniform") return PlannerKind::uniform;
    if (name == "gvs") return PlannerKind::gvs;
    throw InvalidArgument("unknown planner '" + name + "'");
}

void RunConfig::validate() const {
    scene.validate();
    params.validate();
    if (max_visits < 2) throw InvalidArgument("max visits must be at least 2");
    if (r < 0.0) throw InvalidArgument("grid resolution must be positive");
    if (k > 50) throw InvalidArgument("cluster count must be at most 50");
}

PlannerOptions RunConfig::planner_options() const {
    PlannerOptions o;
    o.k = k;
    o.r = r;
    o.max_visits = max_visits;
    o.seed = seed;
    o.open_tour = open_tour;
    return o;
}

namespace {

nlohmann::json optional_angle(const std::optional<double>& a) {
    return a ? nlohmann::json(*a) : nlohmann::json(nullptr);
}

std::optional<double> angle_from(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<double>();
}

nlohmann::json config_json(const RunConfig& c, bool with_out) {
    nlohmann::json j = {
        {"scene",
         {{"kind", to_string(c.scene.kind)},
          {"extent", c.scene.extent},
          {"obstacles", c.scene.obstacles},
          {"seed", c.scene.seed},
          {"path", c.scene.path.generic_string()}}},
        {"planner", to_string(c.planner)},
        {"params",
         {{"d", c.params.d},
          {"epsilon_d", c.params.epsilon_d},
          {"t", c.params.t},
          {"q_star", c.params.q_star},
          {"budget", c.params.budget},
          {"min_angle", optional_angle(c.params.min_angle)},
          {"max_angle", optional_angle(c.params.max_angle)}}},
        {"k", c.k},
        {"r", c.r},
        {"max_visits", c.max_visits},
        {"seed", c.seed},
        {"open_tour", c.open_tour},
        {"gain", c.gain == GainReading::literal ? "literal" : "new-faces"},
    };
    if (with_out) j["out"] = c.out.generic_string();
    return j;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
}

struct Shared {
    TriangleMesh ground_truth;
    Scene gt;
    std::vector<std::uint8_t> infeasible;
    std::vector<IterationState> visits;
    Trajectory planned;
    double planned_length = 0.0;
};

RunResult evaluate(const Shared& s, const RunConfig& config, PlannerKind kind, Trajectory traj) {
    RunResult r;
    r.summary.planner = kind;
    r.report = evaluate_coverage(s.gt, traj.span(), config.params, s.infeasible);
    r.summary.views = traj.size();
    r.summary.tour_length = traj.length();
    r.summary.pass_fraction = r.report.pass_fraction();
    r.summary.mean_q = r.report.mean_quality();
    r.summary.coverage = to_json(r.report);
    r.trajectory = std::move(traj);
    return r;
}

void run_avr_pipeline(Shared& s, const RunConfig& config) {
    s.visits = run_pipeline(s.ground_truth, config.params, config.planner_options());
    std::vector<View> views;
    for (const auto& v : s.visits) {
        if (v.visit < 2) continue;
        views.insert(views.end(), v.trajectory.views().begin(), v.trajectory.views().end());
        s.planned_length += v.trajectory.length();
    }
    s.planned = Trajectory(std::move(views));
}

RunResult run_avr(const Shared& s, const RunConfig& config) {
    RunResult r = evaluate(s, config, PlannerKind::avr, s.planned);
    r.summary.tour_length = s.planned_length;
    for (const auto& v : s.visits) {
        r.summary.visit_views.push_back(v.added_views);
        if (v.visit == 1) r.summary.explore_views = v.added_views;
        if (v.visit == 2 && v.certificate) r.summary.bound_ratio = v.certificate->ratio;
    }
    r.visits = s.visits;
    return r;
}

RunResult run_planner(Shared& s, const RunConfig& config, PlannerKind kind) {
    switch (kind) {
    case PlannerKind::avr: return run_avr(s, config);
    case PlannerKind::zigzag: return evaluate(s, config, kind, plan_zigzag(s.ground_truth.bounds()));
    case PlannerKind::uniform: {
        const Scene proxy(s.visits.at(1).proxy);
        const std::size_t n = std::max<std::size_t>(s.planned.size(), 1);
        return evaluate(s, config, kind, plan_uniform_grid(proxy, n, config.params));
    }
    case PlannerKind::gvs: {
        const Scene proxy(s.visits.at(1).proxy);
        std::vector<ViewingGrid> grids;
        const double res = config.r > 0.0 ? config.r : default_resolution(config.params);
        std::vector<std::size_t> all(proxy.mesh().face_count());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
        for (const auto& p : build_avr(proxy.mesh(), all, config.params, AvrOptions{config.k, res, config.seed}))
            grids.push_back(impose_grid(p.rect, kGvsNeighbourRadius));
        const std::size_t n = std::max<std::size_t>(s.planned.size(), 1);
        GvsResult g = plan_gvs(grids, proxy, config.params, n, config.seed, config.gain);
        RunResult r = evaluate(s, config, kind, std::move(g.trajectory));
        r.summary.stopped_early = g.stopped_early;
        return r;
    }
    }
    throw InvalidArgument("unknown planner");
}

void write_artifacts(const RunResult& r, const RunConfig& config, const fs::path& dir) {
    fs::create_directories(dir);
    write_json_file(to_json(r.trajectory), dir / "trajectory.json");
    {
        std::ostringstream csv;
        write_coverage_csv(r.report, csv);
        write_text(dir / "coverage.csv", csv.str());
    }
    if (!r.visits.empty()) {
        nlohmann::json certs = nlohmann::json::array();
        std::ostringstream csv;
        csv << "visit,views_added,cumulative_views,planned_views,pass_fraction,mean_q,tour_length,bound_ratio\n";
        for (const auto& v : r.visits) {
            write_json_file(to_json(v.trajectory), dir / ("visit_" + std::to_string(v.visit) + ".json"));
            if (v.certificate) {
                nlohmann::json c = to_json(*v.certificate);
                c["visit"] = v.visit;
                certs.push_back(std::move(c));
            }
            csv << v.visit << ',' << v.added_views << ',' << v.cumulative.size() << ',' << v.planned_views << ','
                << format_double(v.report.pass_fraction()) << ',' << format_double(v.report.mean_quality()) << ','
                << format_double(v.trajectory.length()) << ','
                << (v.certificate ? format_double(v.certificate->ratio) : "") << '\n';
        }
        write_json_file(certs, dir / "certificate.json");
        write_text(dir / "visits.csv", csv.str());
    }
    write_json_file(to_json(r.summary, config), dir / "summary.json");
}

Shared prepare(const RunConfig& config) {
    config.validate();
    Shared s;
    s.ground_truth = load_scene(config);
    s.gt = Scene(s.ground_truth);
    s.infeasible = feasibility_probe(s.gt, config.params);
    return s;
}

} // namespace

nlohmann::json to_json(const RunConfig& config) { return config_json(config, true); }

RunConfig run_config_from_json(const nlohmann::json& j) {
    RunConfig c;
    const auto& sc = j.at("scene");
    c.scene.kind = scene_kind_from_string(sc.at("kind").get<std::string>());
    c.scene.extent = sc.at("extent").get<double>();
    c.scene.obstacles = sc.at("obstacles").get<int>();
    c.scene.seed = sc.at("seed").get<std::uint64_t>();
    c.scene.path = sc.at("path").get<std::string>();
    c.planner = planner_kind_from_string(j.at("planner").get<std::string>());
    const auto& p = j.at("params");
    c.params.d = p.at("d").get<double>();
    c.params.epsilon_d = p.at("epsilon_d").get<double>();
    c.params.t = p.at("t").get<int>();
    c.params.q_star = p.at("q_star").get<double>();
    c.params.budget = p.at("budget").get<int>();
    c.params.min_angle = angle_from(p, "min_angle");
    c.params.max_angle = angle_from(p, "max_angle");
    c.k = j.at("k").get<std::size_t>();
    c.r = j.at("r").get<double>();
    c.max_visits = j.at("max_visits").get<int>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.open_tour = j.value("open_tour", false);
    const std::string gain = j.value("gain", std::string("literal"));
    if (gain != "literal" && gain != "new-faces") throw InvalidArgument("unknown gain reading '" + gain + "'");
    c.gain = gain == "literal" ? GainReading::literal : GainReading::new_faces;
    c.out = j.value("out", std::string());
    return c;
}

nlohmann::json to_json(const RunSummary& s, const RunConfig& config) {
    return {{"schema", kSchemaVersion},
            {"planner", to_string(s.planner)},
            {"views", s.views},
            {"explore_views", s.explore_views},
            {"tour_length", s.tour_length},
            {"pass_fraction", s.pass_fraction},
            {"mean_Q", s.mean_q},
            {"bound_ratio", s.bound_ratio ? nlohmann::json(*s.bound_ratio) : nlohmann::json(nullptr)},
            {"visit_views", s.visit_views},
            {"stopped_early", s.stopped_early},
            {"coverage", s.coverage},
            {"config", config_json(config, false)}};
}

TriangleMesh load_scene(const RunConfig& config) {
    const double side = config.params.d / 4.0;
    return subdivide_large_faces(generate_scene(config.scene), side * side);
}

RunResult run(const RunConfig& config) {
    Shared s = prepare(config);
    if (config.planner != PlannerKind::zigzag) run_avr_pipeline(s, config);
    RunResult r = run_planner(s, config, config.planner);
    if (!config.out.empty()) write_artifacts(r, config, config.out);
    return r;
}

std::vector<RunResult> compare(const RunConfig& config) {
    Shared s = prepare(config);
    run_avr_pipeline(s, config);
    std::vector<RunResult> out;
    std::vector<fs::path> dirs;
    for (PlannerKind kind : {PlannerKind::avr, PlannerKind::zigzag, PlannerKind::uniform, PlannerKind::gvs}) {
        RunConfig c = config;
        c.planner = kind;
        out.push_back(run_planner(s, c, kind));
        if (!config.out.empty()) {
            dirs.push_back(config.out / to_string(kind));
            write_artifacts(out.back(), c, dirs.back());
        }
    }
    if (!config.out.empty()) {
        std::ostringstream csv, warn;
        report(dirs, csv, warn, config.out);
        write_text(config.out / "compare.csv", csv.str());
    }
    return out;
}

void report(const std::vector<fs::path>& run_dirs, std::ostream& csv, std::ostream& warn, const fs::path& base) {
    struct Row {
        std::string name;
        nlohmann::json summary;
    };
    std::vector<Row> rows;
    std::size_t max_visits = 0;
    for (const auto& dir : run_dirs) {
        const fs::path file = dir / "summary.json";
        if (!fs::exists(file)) {
            warn << "warning: no summary.json in " << dir.generic_string() << ", skipped\n";
            continue;
        }
        try {
            Row row{base.empty() ? dir.generic_string() : dir.lexically_relative(base).generic_string(),
                    read_json_file(file)};
            max_visits = std::max(max_visits, row.summary.value("visit_views", nlohmann::json::array()).size());
            rows.push_back(std::move(row));
        } catch (const std::exception& e) {
            warn << "warning: unreadable summary in " << dir.generic_string() << ": " << e.what() << "\n";
        }
    }
    if (rows.empty()) warn << "warning: no completed runs to report\n";
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        const double pa = a.summary.at("pass_fraction").get<double>();
        const double pb = b.summary.at("pass_fraction").get<double>();
        return pa != pb ? pa > pb : a.name < b.name;
    });

    csv << "run,planner,views,explore_views,tour_length,pass_fraction,mean_q,bound_ratio";
    for (std::size_t v = 1; v <= max_visits; ++v) csv << ",visit_" << v << "_views";
    csv << '\n';
    for (const auto& row : rows) {
        const auto& j = row.summary;
        csv << row.name << ',' << j.at("planner").get<std::string>() << ',' << j.at("views").get<std::size_t>()
            << ',' << j.value("explore_views", std::size_t{0}) << ','
            << format_double(j.at("tour_length").get<double>()) << ','
            << format_double(j.at("pass_fraction").get<double>()) << ','
            << format_double(j.at("mean_Q").get<double>()) << ',';
        if (j.contains("bound_ratio") && !j.at("bound_ratio").is_null())
            csv << format_double(j.at("bound_ratio").get<double>());
        const auto visits = j.value("visit_views", nlohmann::json::array());
        for (std::size_t v = 0; v < max_visits; ++v) {
            csv << ',';
            if (v < visits.size()) csv << visits[v].get<std::size_t>();
        }
        csv << '\n';
    }
}

} // namespace avrplan
