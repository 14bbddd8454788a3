#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "avrplan/errors.hpp"
#include "avrplan/run.hpp"
#include "avrplan/serialize.hpp"

using namespace avrplan;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("avrplan_" + name)) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

int cli(const std::string& args) {
    const std::string cmd = std::string(AVRPLAN_CLI) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

RunConfig small_config(PlannerKind planner) {
    RunConfig c;
    c.scene = SceneSpec{SceneKind::box_field, 20.0, 2, 3, {}};
    c.planner = planner;
    return c;
}

} // namespace

TEST_CASE("config json round trip") {
    RunConfig c = small_config(PlannerKind::gvs);
    c.params.min_angle = 0.2;
    c.k = 7;
    c.r = 2.5;
    c.seed = 99;
    c.open_tour = true;
    c.gain = GainReading::new_faces;
    const auto j = to_json(c);
    const auto back = run_config_from_json(j);
    CHECK(to_json(back) == j);
    CHECK(back.params.min_angle == c.params.min_angle);
    CHECK_FALSE(back.params.max_angle.has_value());
    CHECK(back.gain == GainReading::new_faces);
    CHECK(back.planner == PlannerKind::gvs);
}

TEST_CASE("config validation") {
    RunConfig c = small_config(PlannerKind::avr);
    CHECK_NOTHROW(c.validate());
    c.max_visits = 0;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    c = small_config(PlannerKind::avr);
    c.params.q_star = -1;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    CHECK_THROWS_AS(planner_kind_from_string("astar"), InvalidArgument);
    for (auto k : {PlannerKind::avr, PlannerKind::zigzag, PlannerKind::uniform, PlannerKind::gvs})
        CHECK(planner_kind_from_string(to_string(k)) == k);
}

TEST_CASE("trajectory json round trip") {
    Trajectory t({View::looking(Vec3(0.1, 0.2, 0.3), Vec3(1, 2, 3)), View::looking(Vec3(1e-17, -4, 5), Vec3(0, 0, -1))}, true);
    const auto back = trajectory_from_json(nlohmann::json::parse(to_json(t).dump()));
    REQUIRE(back.size() == 2);
    CHECK(back.closed());
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(back[i].position == t[i].position);
        CHECK(back[i].direction == t[i].direction);
    }
    CHECK(format_double(0.1) == "0.1");
}

TEST_CASE("avr run writes the full artifact set deterministically") {
    TempDir a("run_a"), b("run_b");
    RunConfig c = small_config(PlannerKind::avr);
    c.out = a.path;
    const auto ra = run(c);
    c.out = b.path;
    run(c);
    for (const char* f : {"summary.json", "trajectory.json", "coverage.csv", "certificate.json", "visits.csv", "visit_1.json",
                          "visit_2.json"}) {
        CHECK_MESSAGE(fs::exists(a.path / f), f);
        CHECK_MESSAGE(slurp(a.path / f) == slurp(b.path / f), f);
    }
    const auto summary = read_json_file(a.path / "summary.json");
    CHECK(summary.at("schema") == kSchemaVersion);
    CHECK(summary.at("planner") == "avr");
    CHECK(summary.at("views").get<std::size_t>() == ra.summary.views);
    CHECK(summary.at("views").get<std::size_t>() <= 300);
    CHECK(summary.at("config").at("params").at("q_star") == 0.014);
    CHECK(summary.at("coverage").at("faces").get<std::size_t>() == ra.report.faces.size());
    CHECK(run_config_from_json(summary.at("config")).seed == c.seed);
    const std::string csv = slurp(a.path / "coverage.csv");
    CHECK(csv.rfind("face,visible_count,theta,quality,status\n", 0) == 0);
}

TEST_CASE("compare matches view counts and reports sorted rows") {
    TempDir dir("compare");
    RunConfig c = small_config(PlannerKind::avr);
    c.out = dir.path;
    const auto results = compare(c);
    REQUIRE(results.size() == 4);
    const std::size_t avr_views = results[0].summary.views;
    for (const auto& r : results) {
        CHECK(fs::exists(dir.path / to_string(r.summary.planner) / "summary.json"));
        if (r.summary.planner == PlannerKind::uniform) CHECK(r.summary.views == avr_views);
        if (r.summary.planner == PlannerKind::gvs && !r.summary.stopped_early) CHECK(r.summary.views == avr_views);
    }
    CHECK(fs::exists(dir.path / "compare.csv"));

    std::vector<fs::path> dirs;
    for (const char* p : {"zigzag", "avr", "gvs", "uniform", "missing"}) dirs.push_back(dir.path / p);
    std::ostringstream csv, warn;
    report(dirs, csv, warn);
    CHECK(warn.str().find("missing") != std::string::npos);
    std::istringstream lines(csv.str());
    std::string line;
    std::getline(lines, line);
    CHECK(line.rfind("run,planner,views,explore_views,tour_length,pass_fraction,mean_q,bound_ratio", 0) == 0);
    std::vector<double> pf;
    while (std::getline(lines, line)) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
        pf.push_back(std::stod(cells.at(5)));
    }
    REQUIRE(pf.size() == 4);
    CHECK(std::is_sorted(pf.rbegin(), pf.rend()));
}

TEST_CASE("report on nothing prints only the header") {
    std::ostringstream csv, warn;
    report({}, csv, warn);
    CHECK(csv.str() == "run,planner,views,explore_views,tour_length,pass_fraction,mean_q,bound_ratio\n");
    CHECK_FALSE(warn.str().empty());
}

TEST_CASE("cli exit codes") {
    TempDir dir("cli");
    const std::string out = (dir.path / "x").string();
    CHECK(cli("plan --scene moon --out " + out) == 2);
    CHECK(cli("plan --d -1 --out " + out) == 2);
    CHECK(cli("plan --scene canyon --extent 10 --out " + out) == 2);
    CHECK(cli("plan --bogus") == 2);
    CHECK(cli("plan --mesh " + (dir.path / "none.obj").string() + " --out " + out) == 1);
    CHECK(cli("scene --scene flat --extent 10 --out " + (dir.path / "flat.obj").string()) == 0);
    CHECK(fs::exists(dir.path / "flat.obj"));
    CHECK(cli("plan --mesh " + (dir.path / "flat.obj").string() + " --planner zigzag --out " + out) == 0);
    CHECK(fs::exists(dir.path / "x" / "summary.json"));
    CHECK(cli("report " + out) == 0);
}
