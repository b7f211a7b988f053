#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "engel/endpoint.hpp"

namespace engel {

namespace {

struct Curve {
    Point4 start{};
    Point4 end{};
    double duration = 0.0;
    double min_rho = 0.0;
};

// Flows away from the origin from a point at start_radius until rho reaches target_rho.
Curve grow_from_origin(const CompiledField& field, double angle, double start_radius, double target_rho,
                       const ode::Options& opt)
{
    Curve c;
    c.start = {0.0, 0.0, start_radius * std::cos(angle), start_radius * std::sin(angle)};
    Eigen::VectorXd y(4);
    y << c.start[0], c.start[1], c.start[2], c.start[3];
    auto rhs = [&field](double, const Eigen::VectorXd& s, Eigen::VectorXd& ds) { ds = field(to_point(s)); };
    // Both catalog cases with a 2-dimensional stable set contract towards the origin in forward time.
    const ode::Stats st = ode::integrate(rhs, 0.0, y, -50.0, opt, [target_rho](double, const Eigen::VectorXd& s) {
        return s(2) * s(2) + s(3) * s(3) < target_rho;
    });
    c.end = to_point(y);
    c.duration = st.t_reached;
    c.min_rho = start_radius * start_radius;
    return c;
}

double min_rho_along(const PolyVectorField& field, const Point4& start, double t_span, const ode::Options& opt)
{
    double lowest = std::numeric_limits<double>::infinity();
    for (double dir : {1.0, -1.0}) {
        const Trajectory tr = integrate(field, start, dir * t_span, opt, {{"rho", rho_poly()}});
        for (double r : tr.monitor("rho")->values) lowest = std::min(lowest, r);
    }
    return lowest;
}

}  // namespace

SardReport sard_sample(ModelId model, std::size_t n_curves, std::uint64_t seed, const SardOptions& opt)
{
    const PfaffianPair pair = catalog_model(model).pair;
    const PolyVectorField field = char_field(pair, CharVariant::Oracle);
    const CompiledField compiled(field);
    const ode::Options& ode_opt = opt.surface.ode;

    SardReport r;
    r.model = model_name(model);
    r.n_curves = n_curves;
    r.seed = seed;
    r.min_rho = std::numeric_limits<double>::infinity();
    r.min_rho_deviation = n_curves == 0 ? 0.0 : std::numeric_limits<double>::infinity();
    if (n_curves == 0) return r;

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> angle_dist(0.0, 2.0 * std::numbers::pi);
    std::uniform_real_distribution<double> radius_dist(opt.min_radius, opt.max_radius);
    std::uniform_real_distribution<double> offset_dist(-opt.max_radius, opt.max_radius);

    std::size_t agree = 0;
    std::size_t decided = 0;
    for (std::size_t i = 0; i < n_curves; ++i) {
        Point4 start{};
        Point4 end{};
        double duration = 0.0;
        if (model == ModelId::D2334B) {
            const double angle = angle_dist(rng);
            const double radius = std::sqrt(opt.rho_start);
            start = {offset_dist(rng), offset_dist(rng), radius * std::cos(angle), radius * std::sin(angle)};
            const double lowest = min_rho_along(field, start, opt.t_span, ode_opt);
            r.min_rho = std::min(r.min_rho, lowest);
            r.min_rho_deviation = std::min(r.min_rho_deviation, lowest - opt.rho_start);
            const bool converges = singular_surface(pair, {{start[2], start[3]}}, opt.surface).converged[0];
            if (lowest < opt.surface.eps_cut || converges) ++r.origin_reaching;
            end = integrate(field, start, opt.t_span, ode_opt).final_state();
            duration = 1.0;
        } else {
            const double angle = angle_dist(rng);
            const double radius = radius_dist(rng);
            const Curve c = grow_from_origin(compiled, angle, opt.start_radius, radius * radius, ode_opt);
            start = c.start;
            end = c.end;
            duration = c.duration;
            if (model == ModelId::D2334A && end[3] > 0.0) {
                const double z = end[2], w = end[3];
                const double px = -z * w * std::log(w);
                const double py = -z * z * w * w * std::log(w);
                r.paper_formula_distance =
                    std::max(r.paper_formula_distance, std::hypot(end[0] - px, end[1] - py));
            }
        }
        r.endpoints.push_back(end);

        // Distance to the reconstructed origin-convergent set at the endpoint's (z, w).
        if (end[2] != 0.0 || end[3] != 0.0) {
            const SurfaceSample s = singular_surface(pair, {{end[2], end[3]}}, opt.surface);
            if (s.converged[0]) {
                ++r.on_surface;
                const Point4 p = s.surface_point(0);
                r.max_surface_distance = std::max(r.max_surface_distance, std::hypot(end[0] - p[0], end[1] - p[1]));
            }
        }

        double score = std::numeric_limits<double>::quiet_NaN();
        if (opt.run_detectors) {
            const ControlPath ctrl = char_control(pair, start, duration, opt.detector_segments, ode_opt);
            const SingularVerdict v = bryant_hsu_test(pair, start, ctrl, ode_opt);
            score = v.sigma_ratio;
            if (v.classification == Classification::Ambiguous ||
                v.jacobian_classification == Classification::Ambiguous)
                ++r.ambiguous_count;
            if (v.classification == Classification::Singular) ++r.singular_count;
            if (v.detectors_agree() || v.detectors_disagree()) {
                ++decided;
                if (v.detectors_agree()) ++agree;
            }
        }
        r.scores.push_back(score);
    }
    r.detector_agreement = decided == 0 ? 1.0 : static_cast<double>(agree) / static_cast<double>(decided);
    return r;
}

}  // namespace engel
