#include "avrplan/serialize.hpp"

#include <charconv>
#include <fstream>
#include <ostream>

#include "avrplan/errors.hpp"

namespace avrplan {

std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

nlohmann::json to_json(const Trajectory& trajectory) {
    nlohmann::json views = nlohmann::json::array();
    for (const auto& v : trajectory.views()) {
        views.push_back({{"x", v.position.x()},
                         {"y", v.position.y()},
                         {"z", v.position.z()},
                         {"dir_x", v.direction.x()},
                         {"dir_y", v.direction.y()},
                         {"dir_z", v.direction.z()}});
    }
    return {{"closed", trajectory.closed()}, {"length", trajectory.length()}, {"views", std::move(views)}};
}

Trajectory trajectory_from_json(const nlohmann::json& j) {
    std::vector<View> views;
    for (const auto& v : j.at("views")) {
        views.push_back(View{Vec3(v.at("x").get<double>(), v.at("y").get<double>(), v.at("z").get<double>()),
                             Vec3(v.at("dir_x").get<double>(), v.at("dir_y").get<double>(),
                                  v.at("dir_z").get<double>())});
    }
    return Trajectory(std::move(views), j.value("closed", false));
}

nlohmann::json to_json(const BoundCertificate& c) {
    nlohmann::json mst = nlohmann::json::array();
    for (const auto& e : c.mst) {
        mst.push_back({{"parent", e.parent},
                       {"child", e.child},
                       {"parent_point", e.parent_point},
                       {"child_point", e.child_point},
                       {"weight", e.weight}});
    }
    return {{"r", c.r},
            {"d", c.d},
            {"tour_lengths", c.tour_lengths},
            {"closing_lengths", c.closing_lengths},
            {"areas", c.areas},
            {"total_area", c.total_area},
            {"mst", std::move(mst)},
            {"mst_weight", c.mst_weight},
            {"stitching_overhead", c.stitching_overhead},
            {"final_length", c.final_length},
            {"bound", c.bound},
            {"slack", c.slack},
            {"lower_bound", c.lower_bound},
            {"ratio", c.ratio},
            {"holds", c.holds()},
            {"per_rectangle_holds", c.per_rectangle_holds()}};
}

nlohmann::json to_json(const CoverageReport& report) {
    return {{"faces", report.faces.size()},
            {"pass", report.count(FaceStatus::pass)},
            {"fail_count", report.count(FaceStatus::fail_count)},
            {"fail_quality", report.count(FaceStatus::fail_quality)},
            {"infeasible", report.count(FaceStatus::infeasible)},
            {"pass_fraction", report.pass_fraction()},
            {"min_Q", report.min_quality()},
            {"mean_Q", report.mean_quality()},
            {"visible_histogram", report.visible_histogram()}};
}

void write_coverage_csv(const CoverageReport& report, std::ostream& out) {
    out << "face,visible_count,theta,quality,status\n";
    for (std::size_t f = 0; f < report.faces.size(); ++f) {
        const auto& fc = report.faces[f];
        out << f << ',' << fc.visible_count << ',' << format_double(fc.quality.theta) << ','
            << format_double(fc.quality.quality) << ',' << to_string(fc.status) << '\n';
    }
}

void write_json_file(const nlohmann::json& j, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path.string());
    return nlohmann::json::parse(in);
}

} // namespace avrplan
