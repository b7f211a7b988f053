#pragma once

// Integration of characteristic fields and reconstruction of the set of
// points whose characteristic flow line ends at the origin.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "engel/charfield.hpp"
#include "engel/integrator.hpp"

namespace engel {

/// Double-coefficient copy of a polynomial field for integrator right-hand sides.
class CompiledField {
public:
    CompiledField() = default;
    explicit CompiledField(const PolyVectorField& v);

    Eigen::Vector4d operator()(const Point4& q) const;
    double component(std::size_t i, const Point4& q) const { return comp_[i](q); }

private:
    std::array<CompiledPoly, 4> comp_;
};

/// Jacobian dV^i/dq^j of a polynomial field, compiled.
class CompiledJacobian {
public:
    CompiledJacobian() = default;
    explicit CompiledJacobian(const PolyVectorField& v);

    Eigen::Matrix4d operator()(const Point4& q) const;

private:
    std::array<std::array<CompiledPoly, 4>, 4> d_;
    std::array<std::array<bool, 4>, 4> nonzero_{};
};

inline Point4 to_point(const Eigen::Ref<const Eigen::VectorXd>& y) { return {y(0), y(1), y(2), y(3)}; }

struct Monitor {
    std::string name;
    Poly quantity;
};

struct MonitorChannel {
    std::string name;
    std::vector<double> values;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Point4> states;
    std::vector<MonitorChannel> monitors;

    std::size_t size() const { return times.size(); }
    bool empty() const { return times.empty(); }
    const Point4& final_state() const { return states.back(); }
    const MonitorChannel* monitor(const std::string& name) const;
    void append(double t, const Point4& q);
};

/// rho = z^2 + w^2 and zw.
std::vector<Monitor> default_monitors();
Poly rho_poly();

/// Evaluates every monitor on every stored state (replacing existing channels).
void attach_monitors(Trajectory& traj, const std::vector<Monitor>& monitors);

/// Adaptive integration of a polynomial field from q0 over [0, t_end] (t_end < 0 runs backward).
/// States are recorded at every accepted step, starting with q0 at t = 0.
Trajectory integrate(const PolyVectorField& field, const Point4& q0, double t_end, const ode::Options& opt = {},
                     const std::vector<Monitor>& monitors = {});

/// The characteristic fields as displayed in the published case analysis (Cases 1-3).
PolyVectorField displayed_case_field(ModelId model);

/// Published closed-form solutions of the displayed Case 1 (D224) and Case 2 (D2334A) fields.
/// For D224 the constants are chosen so that the solution passes through q_init at t = 0:
///   x(t) = x0 + (1/3) z0^2 w0 (1 - e^{-6t}),  y(t) = y0 + (1/3) z0 w0^2 (1 - e^{-6t}).
Point4 closed_form(ModelId model, const Point4& q_init, double t);
bool has_closed_form(ModelId model);

/// max_i |quantity(q_i) - quantity(q_0)|.
double conserved_drift(const Trajectory& traj, const Poly& quantity);

struct LyapunovReport {
    bool rho_monotone = true;          // non-increasing at every accepted step
    bool strictly_decreasing = true;   // decreasing at every accepted step
    std::vector<std::size_t> violations;  // indices i with rho_i > rho_{i-1}
    double initial_rho = 0.0;
    double final_rho = 0.0;
    Trajectory trajectory;
};

/// rho = z^2 + w^2 along the oracle field of D224. Requires |z|, |w| <= 1/2.
LyapunovReport lyapunov_report(const Point4& q0, double t_end, const ode::Options& opt = {});

struct SurfaceOptions {
    double eps_cut = 1e-10;
    double t_max = 30.0;
    double tail_tol = 1e-10;
    /// Samples whose rho grows past max(escape_rho, 1e4 rho(0)) stop as non-convergent.
    double escape_rho = 1e2;
    /// Also try backward time when the forward flow does not reach the origin.
    bool try_backward = true;
    ode::Options ode{};
};

struct SurfaceSample {
    std::vector<std::array<double, 2>> grid;     // (z, w)
    std::vector<std::array<double, 2>> offsets;  // (dx, dy)
    std::vector<bool> converged;
    std::vector<int> direction;                  // +1 forward, -1 backward, 0 none
    std::vector<double> tail_estimate;
    bool skew_product = true;

    std::size_t size() const { return grid.size(); }
    std::size_t converged_count() const;
    /// (-dx, -dy, z, w)
    Point4 surface_point(std::size_t i) const;
};

/// True when the (z,w) part of the field is autonomous and the (x,y) part depends only on (z,w).
bool is_skew_product(const PolyVectorField& field);

SurfaceSample singular_surface(const PfaffianPair& pair, const std::vector<std::array<double, 2>>& grid,
                               const SurfaceOptions& opt = {});
SurfaceSample singular_surface(ModelId model, const std::vector<std::array<double, 2>>& grid,
                               const SurfaceOptions& opt = {});

/// Cartesian grid {lo + i (hi - lo)/(n-1)}^2, optionally mirrored into all four sign quadrants.
std::vector<std::array<double, 2>> square_grid(double lo, double hi, int n, bool all_quadrants = false);

}  // namespace engel
