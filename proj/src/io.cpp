#include "engel/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace engel::io {

using nlohmann::json;

namespace {

json rational_to_json(const Rational& c)
{
    if (c.get_den() == 1 && c.get_num().fits_slong_p()) return c.get_num().get_si();
    return c.get_str();
}

Rational rational_from_json(const json& j)
{
    if (j.is_number_unsigned()) return Rational(mpz_class(std::to_string(j.get<unsigned long long>())));
    if (j.is_number_integer()) return Rational(mpz_class(std::to_string(j.get<long long>())));
    if (j.is_number_float()) {
        const double d = j.get<double>();
        if (!std::isfinite(d)) throw FormatError("non-finite coefficient");
        return Rational(d);
    }
    if (j.is_string()) {
        try {
            return parse_rational(j.get<std::string>());
        } catch (const std::exception& e) {
            throw FormatError(std::string("bad coefficient: ") + e.what());
        }
    }
    throw FormatError("coefficient must be a number or a \"p/q\" string");
}

}  // namespace

json poly_to_json(const Poly& p)
{
    json out = json::array();
    for (const auto& [e, c] : p.terms()) out.push_back(json::array({rational_to_json(c), json::array({e[0], e[1], e[2], e[3]})}));
    return out;
}

Poly poly_from_json(const json& j)
{
    if (!j.is_array()) throw FormatError("polynomial must be a JSON array of [coefficient, [ex,ey,ez,ew]]");
    Poly p;
    for (const auto& term : j) {
        if (!term.is_array() || term.size() != 2) throw FormatError("term must be [coefficient, [ex,ey,ez,ew]]");
        const json& exps = term[1];
        if (!exps.is_array() || exps.size() != 4) throw FormatError("exponent list must have 4 entries (x,y,z,w)");
        Exponent e{};
        for (std::size_t i = 0; i < 4; ++i) {
            if (!exps[i].is_number_integer() || exps[i].get<long long>() < 0)
                throw FormatError("exponents must be non-negative integers");
            e[i] = static_cast<std::uint32_t>(exps[i].get<long long>());
        }
        p += Poly::monomial(rational_from_json(term[0]), e);
    }
    return p;
}

PfaffianPair pair_from_json(const json& j)
{
    if (!j.is_object() || !j.contains("f") || !j.contains("g")) throw FormatError("model JSON needs keys \"f\" and \"g\"");
    return {poly_from_json(j.at("f")), poly_from_json(j.at("g"))};
}

json pair_to_json(const PfaffianPair& pair) { return json{{"f", poly_to_json(pair.f)}, {"g", poly_to_json(pair.g)}}; }

Model resolve_model(const std::string& name_or_path)
{
    if (auto id = parse_model_id(name_or_path)) return catalog_model(*id);
    std::ifstream in(name_or_path);
    if (!in) throw FormatError("unknown model '" + name_or_path + "' (not a catalog name or readable file)");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw FormatError("model file " + name_or_path + ": " + e.what());
    }
    Model m;
    m.id = ModelId::User;
    m.name = name_or_path;
    m.pair = pair_from_json(j);
    return m;
}

std::string fmt(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void Header::write_comment(std::ostream& os) const
{
    os << "# engel " << kToolVersion << " " << command << "\n";
    os << "# model=" << model << "\n";
    for (const auto& [k, v] : params) os << "# " << k << "=" << v << "\n";
    os << "# seed=" << seed << "\n";
}

ordered_json Header::to_json() const
{
    ordered_json meta;
    meta["tool"] = "engel";
    meta["version"] = kToolVersion;
    meta["command"] = command;
    meta["model"] = model;
    ordered_json p = ordered_json::object();
    for (const auto& [k, v] : params) p[k] = v;
    meta["params"] = p;
    meta["seed"] = seed;
    return meta;
}

ordered_json cross_check_to_json(const std::string& model, const CrossCheckReport& report)
{
    ordered_json out;
    out["model"] = model;
    ordered_json pairs = ordered_json::array();
    for (const auto& c : report.comparisons) {
        ordered_json e;
        e["a"] = variant_name(c.a);
        e["b"] = variant_name(c.b);
        e["identical"] = c.identical;
        e["discrepancy_c"] = poly_to_json(c.discrepancy_c);
        e["discrepancy_e"] = poly_to_json(c.discrepancy_e);
        e["same_line_field"] = c.cross_determinant.is_zero();
        pairs.push_back(e);
    }
    out["variant_pairs"] = pairs;
    return out;
}

namespace {

ordered_json number_or_null(double v)
{
    if (!std::isfinite(v)) return nullptr;
    return v;
}

}  // namespace

ordered_json sard_report_to_json(const SardReport& r)
{
    ordered_json out;
    out["model"] = r.model;
    out["n_curves"] = r.n_curves;
    out["seed"] = r.seed;
    out["max_surface_distance"] = number_or_null(r.max_surface_distance);
    out["min_rho_deviation"] = number_or_null(r.min_rho_deviation);
    out["detector_agreement"] = number_or_null(r.detector_agreement);
    out["ambiguous_count"] = r.ambiguous_count;
    out["on_surface"] = r.on_surface;
    out["origin_reaching"] = r.origin_reaching;
    out["min_rho"] = number_or_null(r.min_rho);
    out["paper_formula_distance"] = number_or_null(r.paper_formula_distance);
    out["singular_count"] = r.singular_count;
    return out;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj)
{
    os << "t,x,y,z,w";
    for (const auto& m : traj.monitors) os << ',' << m.name;
    os << '\n';
    for (std::size_t i = 0; i < traj.size(); ++i) {
        os << fmt(traj.times[i]);
        for (double c : traj.states[i]) os << ',' << fmt(c);
        for (const auto& m : traj.monitors) os << ',' << fmt(m.values[i]);
        os << '\n';
    }
}

void write_surface_csv(std::ostream& os, const SurfaceSample& s)
{
    os << "z,w,x,y,converged\n";
    for (std::size_t i = 0; i < s.size(); ++i) {
        const Point4 p = s.surface_point(i);
        os << fmt(p[2]) << ',' << fmt(p[3]) << ',' << fmt(p[0]) << ',' << fmt(p[1]) << ','
           << (s.converged[i] ? 1 : 0) << '\n';
    }
}

void write_endpoint_cloud_csv(std::ostream& os, const std::vector<Point4>& endpoints, const std::vector<double>& scores)
{
    os << "x,y,z,w,score\n";
    for (std::size_t i = 0; i < endpoints.size(); ++i) {
        const auto& p = endpoints[i];
        const double score = i < scores.size() ? scores[i] : std::numeric_limits<double>::quiet_NaN();
        os << fmt(p[0]) << ',' << fmt(p[1]) << ',' << fmt(p[2]) << ',' << fmt(p[3]) << ',' << fmt(score) << '\n';
    }
}

ControlPath read_control_csv(std::istream& is)
{
    ControlPath c;
    std::string line;
    std::size_t lineno = 0;
    bool header_seen = false;
    while (std::getline(is, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        double u1 = 0.0, u2 = 0.0;
        if (!(ls >> u1 >> u2)) {
            // A non-numeric first row is a column header.
            if (c.u.empty() && !header_seen) {
                header_seen = true;
                continue;
            }
            throw FormatError("control file line " + std::to_string(lineno) + ": expected u1,u2");
        }
        c.u.push_back({u1, u2});
    }
    c.validate();
    return c;
}

Point4 parse_point(const std::string& text)
{
    std::string s = text;
    std::replace(s.begin(), s.end(), ',', ' ');
    std::istringstream is(s);
    Point4 p{};
    for (auto& c : p)
        if (!(is >> c)) throw FormatError("point must be four comma-separated numbers: '" + text + "'");
    std::string extra;
    if (is >> extra) throw FormatError("point has more than four coordinates: '" + text + "'");
    return p;
}

}  // namespace engel::io
