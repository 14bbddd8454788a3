#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "avrplan/errors.hpp"
#include "avrplan/run.hpp"
#include "avrplan/serialize.hpp"

namespace {

using namespace avrplan;

struct Flags {
    std::string scene = "canyon";
    std::string mesh;
    std::string planner = "avr";
    double extent = 30.0;
    int obstacles = 3;
    double d = 5.0;
    std::optional<double> eps_d;
    int t = 3;
    double qstar = 0.014;
    int budget = 300;
    std::size_t k = 0;
    double r = 0.0;
    int max_visits = 4;
    std::uint64_t seed = 1;
    std::string out;
    bool open_tour = false;
    std::string gain = "literal";
    std::optional<double> min_angle_deg;
    std::optional<double> max_angle_deg;
};

void add_run_flags(CLI::App* cmd, Flags& f) {
    cmd->add_option("--scene", f.scene, "Synthetic scene: flat, boxfield or canyon");
    cmd->add_option("--mesh", f.mesh, "Ground-truth mesh file (.obj or .ply); overrides --scene");
    cmd->add_option("--extent", f.extent, "Side of the synthetic scene footprint (m)");
    cmd->add_option("--obstacles", f.obstacles, "Box count for synthetic scenes");
    cmd->add_option("--d", f.d, "Viewing distance (m)");
    cmd->add_option("--eps-d", f.eps_d, "Distance tolerance (m); default (sqrt(2)-1) d / 2");
    cmd->add_option("--t", f.t, "Minimum number of views per face");
    cmd->add_option("--qstar", f.qstar, "Quality threshold (1/m^2)");
    cmd->add_option("--budget", f.budget, "View budget for planned visits");
    cmd->add_option("--k", f.k, "Cluster count; 0 picks it from the scene area");
    cmd->add_option("--r", f.r, "Grid resolution (m); 0 picks it from d and the tolerance");
    cmd->add_option("--max-visits", f.max_visits, "Visits including the explore pass");
    cmd->add_option("--seed", f.seed, "Seed for scene generation, clustering and baselines");
    cmd->add_option("--out", f.out, "Output directory");
    cmd->add_flag("--open-tour", f.open_tour, "Do not fly back to the first view");
    cmd->add_option("--gain", f.gain, "Greedy selection gain reading: literal or new-faces");
    cmd->add_option("--min-angle", f.min_angle_deg, "Smallest admissible triangulation angle (degrees)");
    cmd->add_option("--max-angle", f.max_angle_deg, "Largest admissible triangulation angle (degrees)");
}

RunConfig make_config(const Flags& f) {
    RunConfig c;
    if (!f.mesh.empty()) {
        c.scene.kind = SceneKind::loaded_file;
        c.scene.path = f.mesh;
    } else {
        c.scene.kind = scene_kind_from_string(f.scene);
        if (c.scene.kind == SceneKind::loaded_file) throw InvalidArgument("use --mesh to load a scene file");
    }
    c.scene.extent = f.extent;
    c.scene.obstacles = f.obstacles;
    c.scene.seed = f.seed;
    c.planner = planner_kind_from_string(f.planner);
    c.params.d = f.d;
    c.params.epsilon_d = f.eps_d ? *f.eps_d : QualityParams::max_epsilon(f.d);
    c.params.t = f.t;
    c.params.q_star = f.qstar;
    c.params.budget = f.budget;
    const double rad = std::numbers::pi / 180.0;
    if (f.min_angle_deg) c.params.min_angle = *f.min_angle_deg * rad;
    if (f.max_angle_deg) c.params.max_angle = *f.max_angle_deg * rad;
    c.k = f.k;
    c.r = f.r;
    c.max_visits = f.max_visits;
    c.seed = f.seed;
    c.open_tour = f.open_tour;
    if (f.gain != "literal" && f.gain != "new-faces") throw InvalidArgument("unknown gain reading '" + f.gain + "'");
    c.gain = f.gain == "literal" ? GainReading::literal : GainReading::new_faces;
    c.out = f.out;
    c.validate();
    return c;
}

void print_summary(const RunResult& r) {
    const auto& s = r.summary;
    std::cout << to_string(s.planner) << ": views " << s.views << ", tour " << format_double(s.tour_length)
              << " m, pass " << format_double(s.pass_fraction) << ", mean Q " << format_double(s.mean_q);
    if (s.bound_ratio) std::cout << ", bound ratio " << format_double(*s.bound_ratio);
    if (!s.visit_views.empty()) {
        std::cout << ", visit views";
        for (std::size_t v : s.visit_views) std::cout << ' ' << v;
    }
    std::cout << '\n';
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Viewpoint and trajectory planning for multi-visit aerial reconstruction"};
    app.require_subcommand(1);

    Flags plan_flags, compare_flags;
    auto* plan = app.add_subcommand("plan", "Plan with one planner and write its artifacts");
    add_run_flags(plan, plan_flags);
    plan->add_option("--planner", plan_flags.planner, "avr, zigzag, uniform or gvs");

    auto* cmp = app.add_subcommand("compare", "Run every planner on one scene");
    add_run_flags(cmp, compare_flags);

    std::vector<std::string> report_dirs;
    std::string report_out;
    auto* rep = app.add_subcommand("report", "Tabulate completed runs as CSV");
    rep->add_option("dirs", report_dirs, "Run directories");
    rep->add_option("--out", report_out, "CSV file; stdout when omitted");

    Flags scene_flags;
    auto* scene = app.add_subcommand("scene", "Write a synthetic scene as OBJ");
    scene->add_option("--scene", scene_flags.scene, "flat, boxfield or canyon");
    scene->add_option("--extent", scene_flags.extent, "Side of the footprint (m)");
    scene->add_option("--obstacles", scene_flags.obstacles, "Box count");
    scene->add_option("--seed", scene_flags.seed, "Generator seed");
    scene->add_option("--out", scene_flags.out, "OBJ file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    RunConfig config;
    try {
        if (*plan) config = make_config(plan_flags);
        if (*cmp) config = make_config(compare_flags);
    } catch (const InvalidArgument& e) {
        std::cerr << "invalid configuration: " << e.what() << '\n';
        return 2;
    }

    try {
        if (*plan) {
            print_summary(run(config));
        } else if (*cmp) {
            for (const auto& r : compare(config)) print_summary(r);
        } else if (*rep) {
            std::vector<std::filesystem::path> dirs(report_dirs.begin(), report_dirs.end());
            if (report_out.empty()) {
                report(dirs, std::cout, std::cerr);
            } else {
                std::ofstream out(report_out, std::ios::binary);
                if (!out) throw Error("cannot write " + report_out);
                report(dirs, out, std::cerr);
            }
        } else if (*scene) {
            SceneSpec spec;
            spec.kind = scene_kind_from_string(scene_flags.scene);
            spec.extent = scene_flags.extent;
            spec.obstacles = scene_flags.obstacles;
            spec.seed = scene_flags.seed;
            save_obj(generate_scene(spec), scene_flags.out);
        }
    } catch (const InvalidArgument& e) {
        std::cerr << "invalid configuration: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
