// engel: command-line front end.
//
//   engel analyze  --model d224 --point 0,0,1,0
//   engel char     --model d2334a --out char.json
//   engel flow     --model d2334b --start 0,0,1,0 --t 10 --out traj.csv
//   engel surface  --model d224 --grid 0.01:0.2:20 --out surface.csv
//   engel endpoint --model engel_std --control u.csv
//   engel endpoint --model d224 --sard 200 --out report.json --cloud cloud.csv
//   engel verify   --all
//
// Exit status: 0 success, 1 internal failure (or a failed criterion), 2 bad input.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "engel/acceptance.hpp"
#include "engel/io.hpp"

namespace {

using namespace engel;
using io::fmt;

class BadInput : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Common {
    std::string model = "engel_std";
    std::string out;
    std::uint64_t seed = 0;
    double rtol = 1e-10;
    double atol = 1e-12;

    ode::Options ode() const
    {
        if (!(rtol > 0.0) || !(atol > 0.0)) throw BadInput("--rtol and --atol must be positive");
        ode::Options o;
        o.rtol = rtol;
        o.atol = atol;
        return o;
    }

    io::Header header(const std::string& command) const
    {
        io::Header h;
        h.command = command;
        h.model = model;
        h.params = {{"rtol", fmt(rtol)}, {"atol", fmt(atol)}};
        h.seed = seed;
        return h;
    }
};

void add_common(CLI::App* cmd, Common& c)
{
    cmd->add_option("--model", c.model, "catalog name (engel_std, d224, d2334a, d2334b) or model JSON file");
    cmd->add_option("--out", c.out, "output file (default: stdout)");
    cmd->add_option("--seed", c.seed, "random seed");
    cmd->add_option("--rtol", c.rtol, "integrator relative tolerance");
    cmd->add_option("--atol", c.atol, "integrator absolute tolerance");
}

// Writes to --out when given, stdout otherwise.
class Sink {
public:
    explicit Sink(const std::string& path)
    {
        if (path.empty() || path == "-") return;
        file_ = std::make_unique<std::ofstream>(path);
        if (!*file_) throw BadInput("cannot open output file " + path);
    }
    std::ostream& os() { return file_ ? *file_ : std::cout; }
    bool to_file() const { return static_cast<bool>(file_); }

private:
    std::unique_ptr<std::ofstream> file_;
};

Model load(const Common& c)
{
    try {
        return io::resolve_model(c.model);
    } catch (const io::FormatError& e) {
        throw BadInput(e.what());
    }
}

RationalPoint parse_rational_point(const std::string& text)
{
    std::string s = text;
    std::replace(s.begin(), s.end(), ',', ' ');
    std::istringstream is(s);
    RationalPoint p;
    std::string tok;
    std::size_t n = 0;
    while (is >> tok) {
        if (n == 4) throw BadInput("point has more than four coordinates: " + text);
        try {
            p[n++] = parse_rational(tok);
        } catch (const std::exception&) {
            throw BadInput("bad coordinate '" + tok + "' in " + text);
        }
    }
    if (n != 4) throw BadInput("point must have four coordinates x,y,z,w: " + text);
    return p;
}

Point4 parse_point(const std::string& text)
{
    try {
        return io::parse_point(text);
    } catch (const io::FormatError& e) {
        throw BadInput(e.what());
    }
}

struct GridSpec {
    double lo = 0.0, hi = 0.0;
    int n = 0;
};

GridSpec parse_grid(const std::string& text)
{
    std::string s = text;
    std::replace(s.begin(), s.end(), ':', ' ');
    std::istringstream is(s);
    GridSpec g;
    std::string extra;
    if (!(is >> g.lo >> g.hi >> g.n) || (is >> extra) || g.n < 1 || !(g.hi >= g.lo))
        throw BadInput("--grid must be lo:hi:n with lo <= hi and n >= 1");
    if (g.n == 1 && g.hi != g.lo) throw BadInput("--grid with n = 1 needs lo == hi");
    return g;
}

std::vector<std::array<double, 2>> grid_points(const GridSpec& g, bool quadrants)
{
    if (g.n == 1) {
        std::vector<std::array<double, 2>> pts{{g.lo, g.lo}};
        if (quadrants) pts = {{g.lo, g.lo}, {-g.lo, g.lo}, {g.lo, -g.lo}, {-g.lo, -g.lo}};
        return pts;
    }
    return square_grid(g.lo, g.hi, g.n, quadrants);
}

std::string tuple_string(const std::vector<int>& v)
{
    std::string s = "(";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s + ")";
}

// analyze -------------------------------------------------------------------

struct AnalyzeArgs {
    Common c;
    std::string point;
    std::string grid;
    std::string base = "0,0";
    int max_step = 4;
};

int run_analyze(const AnalyzeArgs& a)
{
    const Model m = load(a.c);
    if (a.point.empty() == a.grid.empty()) throw BadInput("analyze needs exactly one of --point or --grid");
    if (a.max_step < 2) throw BadInput("--max-step must be at least 2");

    std::vector<RationalPoint> points;
    if (!a.point.empty()) {
        points.push_back(parse_rational_point(a.point));
    } else {
        const GridSpec g = parse_grid(a.grid);
        const Point4 b = parse_point(a.base + ",0,0");
        for (const auto& zw : grid_points(g, false)) points.push_back(to_rational(Point4{b[0], b[1], zw[0], zw[1]}));
    }

    io::Header h = a.c.header("analyze");
    h.params.emplace_back("point", a.point);
    h.params.emplace_back("grid", a.grid);
    h.params.emplace_back("base_xy", a.base);
    h.params.emplace_back("max_step", std::to_string(a.max_step));

    std::cout << "model " << m.name << ": f = " << m.pair.f.to_string() << ", g = " << m.pair.g.to_string() << "\n";
    std::cout << "certificate E = " << engel_certificate(m.pair).to_string() << "\n";

    std::ostringstream csv;
    csv << "x,y,z,w,growth,bracket_generating,certificate,engel_by_growth,certificate_says_engel,disagreement\n";
    std::size_t disagreements = 0;
    for (const auto& q : points) {
        SigmaReport s = sigma_check(m.pair, q);
        if (a.max_step != 4) s.growth = growth_vector(m.pair, q, a.max_step);
        if (s.disagreement()) ++disagreements;
        csv << q[0].get_str() << ',' << q[1].get_str() << ',' << q[2].get_str() << ',' << q[3].get_str() << ",\""
            << tuple_string(s.growth.dims) << "\"," << (s.growth.bracket_generating ? 1 : 0) << ','
            << s.certificate_value.get_str() << ',' << (s.is_engel_by_growth ? 1 : 0) << ','
            << (s.certificate_says_engel ? 1 : 0) << ',' << (s.disagreement() ? 1 : 0) << '\n';
        if (points.size() == 1) {
            std::cout << "point (" << q[0].get_str() << ", " << q[1].get_str() << ", " << q[2].get_str() << ", "
                      << q[3].get_str() << ")\n";
            std::cout << "growth " << tuple_string(s.growth.dims) << "\n";
            std::cout << "certificate " << s.certificate_value.get_str() << "\n";
            std::cout << "in Sigma (not Engel by growth): " << (s.is_engel_by_growth ? "no" : "yes") << "\n";
            if (s.disagreement()) std::cout << "DISAGREEMENT: certificate and growth vector differ at this point\n";
        }
    }
    if (points.size() > 1)
        std::cout << points.size() << " points, " << disagreements << " certificate/growth disagreements\n";

    if (!a.c.out.empty()) {
        Sink sink(a.c.out);
        h.write_comment(sink.os());
        sink.os() << csv.str();
    }
    return 0;
}

// char ----------------------------------------------------------------------

int run_char(const Common& c)
{
    const Model m = load(c);
    io::ordered_json variants = io::ordered_json::array();
    for (CharVariant v : {CharVariant::Printed, CharVariant::Corrected, CharVariant::Oracle}) {
        const CharCoefficients ce = coeffs(m.pair, v);
        const PolyVectorField field = assemble_field(m.pair, ce);
        std::cout << variant_name(v) << ": c = " << ce.c.to_string() << ", e = " << ce.e.to_string() << "\n";
        std::cout << "  C = (" << field[0].to_string() << ") d/dx + (" << field[1].to_string() << ") d/dy + ("
                  << field[2].to_string() << ") d/dz + (" << field[3].to_string() << ") d/dw\n";
        io::ordered_json e;
        e["variant"] = variant_name(v);
        e["c"] = ce.c.to_string();
        e["e"] = ce.e.to_string();
        io::ordered_json comps = io::ordered_json::array();
        for (std::size_t i = 0; i < 4; ++i) comps.push_back(io::ordered_json(io::poly_to_json(field[i])));
        e["field"] = comps;
        variants.push_back(e);
    }
    const CrossCheckReport report = cross_check(m.pair);
    for (const auto& cmp : report.comparisons) {
        std::cout << variant_name(cmp.a) << " vs " << variant_name(cmp.b) << ": "
                  << (cmp.identical ? "identical" : "DIFFERENT");
        if (!cmp.identical)
            std::cout << " (c: " << cmp.discrepancy_c.to_string() << ", e: " << cmp.discrepancy_e.to_string()
                      << (cmp.cross_determinant.is_zero() ? "; same line field" : "") << ")";
        std::cout << "\n";
    }
    if (!c.out.empty()) {
        io::ordered_json out;
        out["meta"] = c.header("char").to_json();
        io::ordered_json cc = io::cross_check_to_json(m.name, report);
        out["model"] = cc["model"];
        out["variant_pairs"] = cc["variant_pairs"];
        out["variants"] = variants;
        Sink sink(c.out);
        sink.os() << out.dump(2) << "\n";
    }
    return 0;
}

// flow ----------------------------------------------------------------------

struct FlowArgs {
    Common c;
    std::string start;
    double t = 1.0;
    std::string field = "oracle";
};

int run_flow(const FlowArgs& a)
{
    const Model m = load(a.c);
    if (a.start.empty()) throw BadInput("flow needs --start x,y,z,w");
    if (!std::isfinite(a.t) || a.t == 0.0) throw BadInput("--t must be finite and nonzero");
    const Point4 q0 = parse_point(a.start);
    PolyVectorField field;
    if (a.field == "display") {
        if (m.id == ModelId::User || m.id == ModelId::EngelStd) throw BadInput("--field display needs d224, d2334a or d2334b");
        field = displayed_case_field(m.id);
    } else if (a.field == "oracle") {
        field = char_field(m.pair, CharVariant::Oracle);
    } else if (a.field == "corrected") {
        field = char_field(m.pair, CharVariant::Corrected);
    } else if (a.field == "printed") {
        field = char_field(m.pair, CharVariant::Printed);
    } else {
        throw BadInput("--field must be oracle, corrected, printed or display");
    }
    const Trajectory tr = integrate(field, q0, a.t, a.c.ode(), default_monitors());

    io::Header h = a.c.header("flow");
    h.params.emplace_back("start", a.start);
    h.params.emplace_back("t", fmt(a.t));
    h.params.emplace_back("field", a.field);
    Sink sink(a.c.out);
    h.write_comment(sink.os());
    io::write_trajectory_csv(sink.os(), tr);
    if (sink.to_file()) {
        std::cout << tr.size() << " states, final (" << fmt(tr.final_state()[0]) << ", " << fmt(tr.final_state()[1])
                  << ", " << fmt(tr.final_state()[2]) << ", " << fmt(tr.final_state()[3]) << ")\n";
        std::cout << "rho drift " << fmt(conserved_drift(tr, rho_poly())) << ", zw drift "
                  << fmt(conserved_drift(tr, Poly::variable(Var::Z) * Poly::variable(Var::W))) << "\n";
    }
    return 0;
}

// surface -------------------------------------------------------------------

struct SurfaceArgs {
    Common c;
    std::string grid;
    bool quadrants = false;
    SurfaceOptions opt;
};

int run_surface(SurfaceArgs a)
{
    const Model m = load(a.c);
    if (a.grid.empty()) throw BadInput("surface needs --grid lo:hi:n");
    if (!(a.opt.eps_cut > 0.0) || !(a.opt.t_max > 0.0)) throw BadInput("--eps-cut and --t-max must be positive");
    const GridSpec g = parse_grid(a.grid);
    a.opt.ode = a.c.ode();
    const auto pts = grid_points(g, a.quadrants);
    for (const auto& p : pts)
        if (p[0] == 0.0 && p[1] == 0.0) throw BadInput("grid contains the origin (z, w) = (0, 0)");
    const SurfaceSample s = singular_surface(m.pair, pts, a.opt);

    io::Header h = a.c.header("surface");
    h.params.emplace_back("grid", a.grid);
    h.params.emplace_back("all_quadrants", a.quadrants ? "true" : "false");
    h.params.emplace_back("eps_cut", fmt(a.opt.eps_cut));
    h.params.emplace_back("t_max", fmt(a.opt.t_max));
    h.params.emplace_back("try_backward", a.opt.try_backward ? "true" : "false");
    Sink sink(a.c.out);
    h.write_comment(sink.os());
    io::write_surface_csv(sink.os(), s);
    if (sink.to_file()) std::cout << s.converged_count() << "/" << s.size() << " grid points converged\n";
    return 0;
}

// endpoint ------------------------------------------------------------------

struct EndpointArgs {
    Common c;
    std::string control;
    std::string start = "0,0,0,0";
    std::size_t random_segments = 0;
    std::size_t sard = 0;
    std::string cloud;
    bool fd = false;
};

io::ordered_json matrix_json(const Eigen::MatrixXd& m)
{
    io::ordered_json rows = io::ordered_json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        io::ordered_json row = io::ordered_json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(row);
    }
    return rows;
}

int run_sard(const EndpointArgs& a, const Model& m)
{
    if (m.id == ModelId::User || m.id == ModelId::EngelStd) throw BadInput("--sard needs d224, d2334a or d2334b");
    SardOptions opt;
    opt.surface.ode = a.c.ode();
    const SardReport r = sard_sample(m.id, a.sard, a.c.seed, opt);
    io::Header h = a.c.header("endpoint");
    h.params.emplace_back("sard", std::to_string(a.sard));
    h.params.emplace_back("cloud", a.cloud);

    io::ordered_json out;
    out["meta"] = h.to_json();
    const io::ordered_json report = io::sard_report_to_json(r);
    for (const auto& [k, v] : report.items()) out[k] = v;
    Sink sink(a.c.out);
    sink.os() << out.dump(2) << "\n";
    if (!a.cloud.empty()) {
        Sink cloud(a.cloud);
        h.write_comment(cloud.os());
        io::write_endpoint_cloud_csv(cloud.os(), r.endpoints, r.scores);
    }
    return 0;
}

int run_endpoint(const EndpointArgs& a)
{
    const Model m = load(a.c);
    if (a.sard > 0) return run_sard(a, m);
    if (a.control.empty() == (a.random_segments == 0))
        throw BadInput("endpoint needs exactly one of --control FILE, --random N or --sard N");

    ControlPath ctrl;
    if (!a.control.empty()) {
        std::ifstream in(a.control);
        if (!in) throw BadInput("cannot read control file " + a.control);
        try {
            ctrl = io::read_control_csv(in);
        } catch (const std::exception& e) {
            throw BadInput(e.what());
        }
    } else {
        ctrl = random_control(a.random_segments, a.c.seed);
    }
    const Point4 q0 = parse_point(a.start);
    const ode::Options opt = a.c.ode();

    const Trajectory tr = horizontal_integrate(m.pair, q0, ctrl, opt);
    const EndpointJacobian J = endpoint_jacobian(m.pair, q0, ctrl, opt);
    const SingularVerdict v = bryant_hsu_test(m.pair, q0, ctrl, opt);

    io::Header h = a.c.header("endpoint");
    h.params.emplace_back("control", a.control);
    h.params.emplace_back("random", std::to_string(a.random_segments));
    h.params.emplace_back("start", a.start);
    h.params.emplace_back("fd", a.fd ? "true" : "false");

    io::ordered_json out;
    out["meta"] = h.to_json();
    out["model"] = m.name;
    out["n_segments"] = ctrl.n_segments();
    const Point4 end = tr.final_state();
    out["endpoint"] = {end[0], end[1], end[2], end[3]};
    out["jacobian"] = matrix_json(J);
    out["singular_score"] = v.sigma_ratio;
    out["bh_smallest"] = v.bh_smallest;
    out["classification"] = classification_name(v.classification);
    out["jacobian_classification"] = classification_name(v.jacobian_classification);
    out["detectors_agree"] = v.detectors_agree();
    if (v.witness) {
        const Eigen::Vector4d& l = *v.witness;
        out["witness"] = {l(0), l(1), l(2), l(3)};
        out["witness_residual"] = v.witness_residual;
    } else {
        out["witness"] = nullptr;
    }
    if (a.fd) {
        const EndpointJacobian F = finite_difference_jacobian(m.pair, q0, ctrl);
        out["fd_max_discrepancy"] = max_abs_discrepancy(J, F);
    }
    Sink sink(a.c.out);
    sink.os() << out.dump(2) << "\n";
    if (sink.to_file())
        std::cout << classification_name(v.classification) << " (score " << fmt(v.sigma_ratio) << ", bh "
                  << fmt(v.bh_smallest) << ")\n";
    return 0;
}

// verify --------------------------------------------------------------------

int run_verify(bool all, const std::vector<int>& ids, const std::string& out)
{
    if (!all && ids.empty()) throw BadInput("verify needs --all or --criterion N");
    std::vector<acceptance::CriterionResult> results;
    if (all) {
        results = acceptance::run_all();
    } else {
        for (int id : ids) {
            if (id < 1 || id > acceptance::kCriterionCount) throw BadInput("criterion must be in 1..10");
            results.push_back(acceptance::run_criterion(id));
        }
    }
    int failures = acceptance::report(std::cout, results);
    if (!out.empty()) {
        Sink sink(out);
        sink.os() << "# engel " << io::kToolVersion << " verify\n";
        acceptance::report(sink.os(), results);
    }
    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Singular curves of rank-2 distributions in dimension four"};
    app.set_version_flag("--version", std::string(engel::io::kToolVersion));
    app.require_subcommand(1);

    AnalyzeArgs analyze;
    auto* c_an = app.add_subcommand("analyze", "growth vector, Engel certificate and Sigma membership");
    add_common(c_an, analyze.c);
    c_an->add_option("--point", analyze.point, "x,y,z,w (exact decimals or p/q)");
    c_an->add_option("--grid", analyze.grid, "lo:hi:n grid in (z, w)");
    c_an->add_option("--base", analyze.base, "x,y for grid points");
    c_an->add_option("--max-step", analyze.max_step, "largest bracket length");

    Common chr;
    auto* c_ch = app.add_subcommand("char", "characteristic field by all three routes, with cross-check");
    add_common(c_ch, chr);

    FlowArgs flow;
    auto* c_fl = app.add_subcommand("flow", "integrate a characteristic field, with rho and zw monitors");
    add_common(c_fl, flow.c);
    c_fl->add_option("--start", flow.start, "x,y,z,w");
    c_fl->add_option("--t", flow.t, "end time (negative runs backward)");
    c_fl->add_option("--field", flow.field, "oracle, corrected, printed or display");

    SurfaceArgs surf;
    auto* c_su = app.add_subcommand("surface", "points whose characteristic flow ends at the origin");
    add_common(c_su, surf.c);
    c_su->add_option("--grid", surf.grid, "lo:hi:n grid in (z, w)");
    c_su->add_flag("--all-quadrants", surf.quadrants, "mirror the grid into all sign quadrants");
    c_su->add_option("--eps-cut", surf.opt.eps_cut, "rho threshold for reaching the origin");
    c_su->add_option("--t-max", surf.opt.t_max, "integration time limit");
    c_su->add_flag("!--forward-only", surf.opt.try_backward, "do not try backward time");

    EndpointArgs ep;
    auto* c_ep = app.add_subcommand("endpoint", "endpoint Jacobian and singular-curve tests, or Sard sampling");
    add_common(c_ep, ep.c);
    c_ep->add_option("--control", ep.control, "CSV of u1,u2 rows, one per segment");
    c_ep->add_option("--random", ep.random_segments, "random control with N segments (uses --seed)");
    c_ep->add_option("--start", ep.start, "x,y,z,w");
    c_ep->add_flag("--fd", ep.fd, "also compare with finite differences");
    c_ep->add_option("--sard", ep.sard, "sample N singular curves and write the Sard report");
    c_ep->add_option("--cloud", ep.cloud, "endpoint cloud CSV for --sard");

    bool all = false;
    std::vector<int> ids;
    std::string verify_out;
    auto* c_ve = app.add_subcommand("verify", "run the acceptance criteria");
    c_ve->add_flag("--all", all, "run every criterion");
    c_ve->add_option("--criterion", ids, "criterion number (repeatable)");
    c_ve->add_option("--out", verify_out, "also write the report to a file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*c_an) return run_analyze(analyze);
        if (*c_ch) return run_char(chr);
        if (*c_fl) return run_flow(flow);
        if (*c_su) return run_surface(surf);
        if (*c_ep) return run_endpoint(ep);
        if (*c_ve) return run_verify(all, ids, verify_out);
    } catch (const BadInput& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
