#ifndef AVRPLAN_SERIALIZE_HPP_
#define AVRPLAN_SERIALIZE_HPP_

#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "avrplan/gridtour.hpp"
#include "avrplan/quality.hpp"
#include "avrplan/trajectory.hpp"

namespace avrplan {

inline constexpr int kSchemaVersion = 1;

// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

// {"closed": bool, "length": m, "views": [{x, y, z, dir_x, dir_y, dir_z}, ...]}
nlohmann::json to_json(const Trajectory& trajectory);
Trajectory trajectory_from_json(const nlohmann::json& j);

nlohmann::json to_json(const BoundCertificate& certificate);

// Pass fraction, status counts, min and mean Q, and the visible-count histogram.
nlohmann::json to_json(const CoverageReport& report);

// face,visible_count,theta,quality,status
void write_coverage_csv(const CoverageReport& report, std::ostream& out);

void write_json_file(const nlohmann::json& j, const std::filesystem::path& path);
nlohmann::json read_json_file(const std::filesystem::path& path);

} // namespace avrplan

#endif
