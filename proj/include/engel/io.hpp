#pragma once

// File formats: polynomial / model JSON, cross-check and Sard report JSON,
// trajectory / surface / endpoint-cloud CSV. Every output starts with a
// metadata header (comment lines for CSV, a leading "meta" object for JSON).

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "engel/endpoint.hpp"

namespace engel::io {

using ordered_json = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "0.1.0";

class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// [[coefficient, [ex, ey, ez, ew]], ...]; integer coefficients as JSON numbers,
/// others as "p/q" strings.
nlohmann::json poly_to_json(const Poly& p);
/// Accepts JSON integers, JSON floats (converted exactly), and "p/q" or decimal strings.
Poly poly_from_json(const nlohmann::json& j);

/// {"f": <poly>, "g": <poly>}
PfaffianPair pair_from_json(const nlohmann::json& j);
nlohmann::json pair_to_json(const PfaffianPair& pair);

/// A catalog name (engel_std, d224, d2334a, d2334b) or a path to a model JSON file.
Model resolve_model(const std::string& name_or_path);

/// "%.17g"
std::string fmt(double v);

struct Header {
    std::string command;
    std::string model;
    std::vector<std::pair<std::string, std::string>> params;
    std::uint64_t seed = 0;

    void write_comment(std::ostream& os) const;
    ordered_json to_json() const;
};

ordered_json cross_check_to_json(const std::string& model, const CrossCheckReport& report);
ordered_json sard_report_to_json(const SardReport& r);

void write_trajectory_csv(std::ostream& os, const Trajectory& traj);
void write_surface_csv(std::ostream& os, const SurfaceSample& s);
/// x,y,z,w,score
void write_endpoint_cloud_csv(std::ostream& os, const std::vector<Point4>& endpoints, const std::vector<double>& scores);

/// Rows of "u1,u2" (blank lines and '#' comments ignored).
ControlPath read_control_csv(std::istream& is);

Point4 parse_point(const std::string& text);

}  // namespace engel::io
