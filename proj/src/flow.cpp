#include "engel/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace engel {

CompiledField::CompiledField(const PolyVectorField& v)
{
    for (std::size_t i = 0; i < 4; ++i) comp_[i] = CompiledPoly(v[i]);
}

Eigen::Vector4d CompiledField::operator()(const Point4& q) const
{
    return {comp_[0](q), comp_[1](q), comp_[2](q), comp_[3](q)};
}

CompiledJacobian::CompiledJacobian(const PolyVectorField& v)
{
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 4; ++j) {
            const Poly d = v[i].diff(kAllVars[j]);
            nonzero_[i][j] = !d.is_zero();
            d_[i][j] = CompiledPoly(d);
        }
    }
}

Eigen::Matrix4d CompiledJacobian::operator()(const Point4& q) const
{
    Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j)
            if (nonzero_[i][j]) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = d_[i][j](q);
    return m;
}

const MonitorChannel* Trajectory::monitor(const std::string& name) const
{
    for (const auto& m : monitors)
        if (m.name == name) return &m;
    return nullptr;
}

void Trajectory::append(double t, const Point4& q)
{
    times.push_back(t);
    states.push_back(q);
}

Poly rho_poly()
{
    const Poly z = Poly::variable(Var::Z);
    const Poly w = Poly::variable(Var::W);
    return z * z + w * w;
}

std::vector<Monitor> default_monitors()
{
    return {{"rho", rho_poly()}, {"zw", Poly::variable(Var::Z) * Poly::variable(Var::W)}};
}

void attach_monitors(Trajectory& traj, const std::vector<Monitor>& monitors)
{
    traj.monitors.clear();
    for (const auto& m : monitors) {
        const CompiledPoly q(m.quantity);
        MonitorChannel ch{m.name, {}};
        ch.values.reserve(traj.size());
        for (const auto& s : traj.states) ch.values.push_back(q(s));
        traj.monitors.push_back(std::move(ch));
    }
}

Trajectory integrate(const PolyVectorField& field, const Point4& q0, double t_end, const ode::Options& opt,
                     const std::vector<Monitor>& monitors)
{
    if (t_end == 0.0) throw std::invalid_argument("integrate: t_end must be nonzero");
    const CompiledField v(field);
    Trajectory traj;
    traj.append(0.0, q0);
    Eigen::VectorXd y(4);
    y << q0[0], q0[1], q0[2], q0[3];
    auto rhs = [&v](double, const Eigen::VectorXd& s, Eigen::VectorXd& dy) { dy = v(to_point(s)); };
    ode::integrate(rhs, 0.0, y, t_end, opt, [&traj](double t, const Eigen::VectorXd& s) {
        traj.append(t, to_point(s));
        return true;
    });
    attach_monitors(traj, monitors);
    return traj;
}

PolyVectorField displayed_case_field(ModelId model)
{
    const Poly z = Poly::variable(Var::Z);
    const Poly w = Poly::variable(Var::W);
    PolyVectorField v;
    switch (model) {
    case ModelId::D224:
        v.comp = {Poly(2) * z * z * w, Poly(2) * z * w * w, Poly(-2) * z, Poly(-2) * w};
        break;
    case ModelId::D2334A:
        v.comp = {Poly(-2) * z * w, Poly(-2) * z * z * w * w, Poly(-2) * z, Poly(2) * w};
        break;
    case ModelId::D2334B:
        v.comp = {Poly(-2) * z * z, Poly(-2) * (Rational(1, 3) * z * z * z * z + z * z * w * w), Poly(-2) * w,
                  Poly(2) * z};
        break;
    default:
        throw std::invalid_argument("displayed_case_field: only the three degenerate models have a case display");
    }
    return v;
}

bool has_closed_form(ModelId model) { return model == ModelId::D224 || model == ModelId::D2334A; }

Point4 closed_form(ModelId model, const Point4& q, double t)
{
    const auto [x0, y0, z0, w0] = q;
    switch (model) {
    case ModelId::D224: {
        const double decay = -std::expm1(-6.0 * t);  // 1 - e^{-6t}
        return {x0 + z0 * z0 * w0 * decay / 3.0, y0 + z0 * w0 * w0 * decay / 3.0, std::exp(-2.0 * t) * z0,
                std::exp(-2.0 * t) * w0};
    }
    case ModelId::D2334A:
        return {-2.0 * z0 * w0 * t + x0, -2.0 * z0 * z0 * w0 * w0 * t + y0, std::exp(-2.0 * t) * z0,
                std::exp(2.0 * t) * w0};
    default:
        throw std::invalid_argument("closed_form: no closed form for " + model_name(model));
    }
}

double conserved_drift(const Trajectory& traj, const Poly& quantity)
{
    if (traj.empty()) throw std::invalid_argument("conserved_drift: empty trajectory");
    const CompiledPoly q(quantity);
    const double ref = q(traj.states.front());
    double drift = 0.0;
    for (const auto& s : traj.states) drift = std::max(drift, std::abs(q(s) - ref));
    return drift;
}

LyapunovReport lyapunov_report(const Point4& q0, double t_end, const ode::Options& opt)
{
    if (std::abs(q0[2]) > 0.5 || std::abs(q0[3]) > 0.5)
        throw std::invalid_argument("lyapunov_report: start must satisfy |z|, |w| <= 1/2");
    LyapunovReport r;
    const PolyVectorField c = char_field(catalog_model(ModelId::D224).pair, CharVariant::Oracle);
    if (q0[2] == 0.0 && q0[3] == 0.0) {
        // Equilibrium set of the field.
        r.trajectory.append(0.0, q0);
        r.trajectory.append(t_end, q0);
        attach_monitors(r.trajectory, {{"rho", rho_poly()}});
        r.strictly_decreasing = false;
        return r;
    }
    r.trajectory = integrate(c, q0, t_end, opt, {{"rho", rho_poly()}});
    const auto& rho = r.trajectory.monitor("rho")->values;
    r.initial_rho = rho.front();
    r.final_rho = rho.back();
    for (std::size_t i = 1; i < rho.size(); ++i) {
        if (rho[i] > rho[i - 1]) {
            r.rho_monotone = false;
            r.violations.push_back(i);
        }
        if (!(rho[i] < rho[i - 1])) r.strictly_decreasing = false;
    }
    return r;
}

// Surface reconstruction --------------------------------------------------------

bool is_skew_product(const PolyVectorField& field)
{
    return std::all_of(field.comp.begin(), field.comp.end(),
                       [](const Poly& p) { return !p.depends_on(Var::X) && !p.depends_on(Var::Y); });
}

std::size_t SurfaceSample::converged_count() const
{
    return static_cast<std::size_t>(std::count(converged.begin(), converged.end(), true));
}

Point4 SurfaceSample::surface_point(std::size_t i) const
{
    return {-offsets[i][0], -offsets[i][1], grid[i][0], grid[i][1]};
}

namespace {

struct Attempt {
    bool reached = false;
    double tail = std::numeric_limits<double>::infinity();
    Point4 final{};
};

// Flows (0,0,z,w) in direction `dir` until rho < eps_cut, escape, or |t| = t_max.
Attempt flow_to_origin(const CompiledField& v, double z, double w, double dir, const SurfaceOptions& opt)
{
    Attempt a;
    const double rho0 = z * z + w * w;
    const double escape = std::max(opt.escape_rho, 1e4 * rho0);
    Eigen::VectorXd y(4);
    y << 0.0, 0.0, z, w;
    std::vector<std::pair<double, double>> speed;  // (|t|, |C^x| + |C^y|)
    auto rhs = [&v](double, const Eigen::VectorXd& s, Eigen::VectorXd& dy) { dy = v(to_point(s)); };
    auto observer = [&](double t, const Eigen::VectorXd& s) {
        const Point4 q = to_point(s);
        speed.emplace_back(std::abs(t), std::abs(v.component(0, q)) + std::abs(v.component(1, q)));
        const double rho = q[2] * q[2] + q[3] * q[3];
        if (rho < opt.eps_cut) {
            a.reached = true;
            return false;
        }
        return rho <= escape;
    };
    try {
        ode::integrate(rhs, 0.0, y, dir * opt.t_max, opt.ode, observer);
    } catch (const ode::IntegrationError&) {
        a.reached = false;
        return a;
    }
    a.final = to_point(y);
    if (!a.reached) return a;

    // Remaining contribution of the x,y drift, assuming the exponential decay
    // rate measured over the last few accepted steps persists.
    const auto& last = speed.back();
    if (last.second == 0.0) {
        a.tail = 0.0;
        return a;
    }
    const std::size_t back = speed.size() >= 5 ? speed.size() - 5 : 0;
    const auto& earlier = speed[back];
    if (earlier.second > last.second && last.first > earlier.first) {
        const double rate = std::log(earlier.second / last.second) / (last.first - earlier.first);
        a.tail = last.second / rate;
    }
    return a;
}

}  // namespace

SurfaceSample singular_surface(const PfaffianPair& pair, const std::vector<std::array<double, 2>>& grid,
                               const SurfaceOptions& opt)
{
    if (!(opt.eps_cut > 0.0) || !(opt.t_max > 0.0)) throw std::invalid_argument("singular_surface: eps_cut, t_max > 0");
    const PolyVectorField field = char_field(pair, CharVariant::Oracle);
    const CompiledField v(field);
    SurfaceSample out;
    out.skew_product = is_skew_product(field);
    for (const auto& [z, w] : grid) {
        if (z == 0.0 && w == 0.0) throw std::invalid_argument("singular_surface: grid must exclude (0,0)");
        out.grid.push_back({z, w});
        std::array<double, 2> offset{0.0, 0.0};
        bool converged = false;
        int direction = 0;
        double tail = std::numeric_limits<double>::infinity();
        for (double dir : {1.0, -1.0}) {
            if (dir < 0.0 && !opt.try_backward) break;
            const Attempt a = flow_to_origin(v, z, w, dir, opt);
            if (!a.reached) continue;
            tail = a.tail;
            if (out.skew_product) {
                // The x,y increments do not depend on the starting x,y, so the shift is exact.
                offset = {a.final[0], a.final[1]};
                converged = a.tail < opt.tail_tol;
            } else {
                // Fallback: shift by the observed limit, then confirm the shifted start reaches the origin.
                offset = {a.final[0], a.final[1]};
                const Point4 p{-offset[0], -offset[1], z, w};
                const Trajectory check = integrate(field, p, dir * opt.t_max, opt.ode);
                const Point4& end = check.final_state();
                converged = std::abs(end[0]) + std::abs(end[1]) < 1e-6 && end[2] * end[2] + end[3] * end[3] < 2 * opt.eps_cut;
            }
            if (converged) {
                direction = static_cast<int>(dir);
                break;
            }
        }
        out.offsets.push_back(offset);
        out.converged.push_back(converged);
        out.direction.push_back(direction);
        out.tail_estimate.push_back(tail);
    }
    return out;
}

SurfaceSample singular_surface(ModelId model, const std::vector<std::array<double, 2>>& grid,
                               const SurfaceOptions& opt)
{
    return singular_surface(catalog_model(model).pair, grid, opt);
}

std::vector<std::array<double, 2>> square_grid(double lo, double hi, int n, bool all_quadrants)
{
    if (n < 1) throw std::invalid_argument("square_grid: n must be >= 1");
    std::vector<double> axis;
    for (int i = 0; i < n; ++i) axis.push_back(n == 1 ? lo : lo + (hi - lo) * i / (n - 1));
    std::vector<std::array<double, 2>> grid;
    const std::vector<double> signs = all_quadrants ? std::vector<double>{1.0, -1.0} : std::vector<double>{1.0};
    for (double sz : signs)
        for (double sw : signs)
            for (double z : axis)
                for (double w : axis) grid.push_back({sz * z, sw * w});
    return grid;
}

}  // namespace engel
