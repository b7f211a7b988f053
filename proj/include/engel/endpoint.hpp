#pragma once

// Endpoint map of horizontal curves with piecewise-constant controls on [0, 1],
// and the two singular-curve detectors: rank deficiency of the endpoint
// Jacobian, and existence of an annihilating covector (abnormal lift) along
// the curve.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "engel/flow.hpp"

namespace engel {

struct ControlPath {
    std::vector<std::array<double, 2>> u;  // (u1, u2) per segment; segment k is [k/N, (k+1)/N]

    std::size_t n_segments() const { return u.size(); }
    /// Each segment split into `factor` equal pieces with the same control.
    ControlPath refined(std::size_t factor) const;
    void validate() const;
};

ControlPath constant_control(double u1, double u2, std::size_t n_segments);
/// i.i.d. uniform entries in [-1, 1].
ControlPath random_control(std::size_t n_segments, std::uint64_t seed);

/// q' = u1 Z(q) + u2 W(q) together with its linearization.
class HorizontalSystem {
public:
    explicit HorizontalSystem(const PfaffianPair& pair);

    Eigen::Vector4d Z(const Point4& q) const { return z_(q); }
    Eigen::Vector4d W(const Point4& q) const { return w_(q); }
    Eigen::Vector4d velocity(const Point4& q, const std::array<double, 2>& u) const;
    /// d(velocity)/dq
    Eigen::Matrix4d linearization(const Point4& q, const std::array<double, 2>& u) const;

private:
    CompiledField z_, w_;
    CompiledJacobian dz_, dw_;
};

Trajectory horizontal_integrate(const PfaffianPair& pair, const Point4& q0, const ControlPath& ctrl,
                                const ode::Options& opt = {});

using EndpointJacobian = Eigen::Matrix<double, 4, Eigen::Dynamic>;

/// d endpoint / d control entries via the variational equations. Column 2k + j
/// is the derivative with respect to u_{j+1} on segment k.
EndpointJacobian endpoint_jacobian(const PfaffianPair& pair, const Point4& q0, const ControlPath& ctrl,
                                   const ode::Options& opt = {});

/// Central differences of the endpoint map with a fixed-step classical RK4
/// integrator (steps_per_segment steps per segment), independent of the
/// variational route.
EndpointJacobian finite_difference_jacobian(const PfaffianPair& pair, const Point4& q0, const ControlPath& ctrl,
                                            double step = 1e-6, int steps_per_segment = 32);

/// max |a - b| entrywise.
double max_abs_discrepancy(const EndpointJacobian& a, const EndpointJacobian& b);

/// sigma_4 / sigma_1 of the endpoint Jacobian (0 when it has fewer than 4 columns).
double singular_score(const EndpointJacobian& J);

enum class Classification { Singular, Regular, Ambiguous };
std::string classification_name(Classification c);

inline constexpr double kSingularBelow = 1e-7;
inline constexpr double kRegularAbove = 1e-4;
Classification classify(double statistic);

/// Covector transport along the curve: lambda(t) = transport(t) lambda(0) solves
/// the adjoint (transposed) variational equation lambda' = -A(t)^T lambda.
struct AdjointRecord {
    Trajectory base;                      // state at every integration stop
    std::vector<double> sample_times;
    std::vector<Point4> sample_states;
    std::vector<Eigen::Matrix4d> transport;    // covector transport from t = 0
    std::vector<Eigen::Matrix4d> variational;  // tangent transport from t = 0
    /// Row pair per sample: (h1, h2) = (<lambda, Z>, <lambda, W>) as linear functions of lambda(0).
    std::vector<Eigen::Matrix<double, 2, 4>> constraints;
    double min_transport_det = 0.0;

    /// Stacked constraint map (2m x 4), scaled by 1 / sqrt(m).
    Eigen::MatrixXd constraint_map() const;
};

/// m = max(16, 2N) uniformly spaced samples covering [0, 1], endpoints included.
std::vector<double> constraint_sample_times(std::size_t n_segments);

AdjointRecord adjoint_record(const PfaffianPair& pair, const Point4& q0, const ControlPath& ctrl,
                             const std::vector<double>& sample_times, const ode::Options& opt = {});

struct SingularVerdict {
    double sigma_ratio = 0.0;  ///< endpoint Jacobian sigma_min / sigma_max
    double bh_smallest = 0.0;  ///< covector constraint map sigma_min / sigma_max
    Classification classification = Classification::Ambiguous;           ///< from bh_smallest
    Classification jacobian_classification = Classification::Ambiguous;  ///< from sigma_ratio
    std::optional<Eigen::Vector4d> witness;  ///< unit initial covector when SINGULAR
    double witness_residual = 0.0;           ///< max_t |h1| + |h2| for the witness
    double min_transport_det = 0.0;

    bool detectors_agree() const;
    bool detectors_disagree() const;
};

SingularVerdict bryant_hsu_test(const PfaffianPair& pair, const Point4& q0, const ControlPath& ctrl,
                                const ode::Options& opt = {});

class FieldVanishingError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Piecewise-constant approximation of the characteristic flow from p0 for the
/// given duration, rescaled to unit time: u_k = duration * (c, e) at the k-th midpoint.
ControlPath char_control(const PfaffianPair& pair, const Point4& p0, double duration, std::size_t n_segments,
                         const ode::Options& opt = {});

struct DetectorSweep {
    std::size_t n_controls = 0;
    std::size_t regular = 0;    // classified REGULAR by both detectors
    std::size_t ambiguous = 0;  // AMBIGUOUS for at least one detector
    std::size_t agreements = 0;
    std::size_t disagreements = 0;
    std::vector<SingularVerdict> verdicts;

    double agreement_fraction() const;
    double regular_fraction() const;
};

/// Random controls (seeded) from q0, both detectors on each.
DetectorSweep detector_sweep(const PfaffianPair& pair, const Point4& q0, std::size_t n_controls,
                             std::size_t n_segments, std::uint64_t seed, const ode::Options& opt = {});

struct SardOptions {
    double start_radius = 1e-3;  ///< distance from the origin where sampled curves start
    double min_radius = 0.02;    ///< endpoint radius in (z,w) drawn from [min_radius, max_radius]
    double max_radius = 0.1;
    double rho_start = 0.01;     ///< D2334B starting rho
    double t_span = 10.0;        ///< D2334B integration span in each direction
    bool run_detectors = true;
    std::size_t detector_segments = 64;
    SurfaceOptions surface{};
};

struct SardReport {
    std::string model;
    std::size_t n_curves = 0;
    std::uint64_t seed = 0;
    std::vector<Point4> endpoints;
    std::vector<double> scores;          // Jacobian score of each curve's control, NaN if not run
    std::size_t on_surface = 0;          // endpoints whose (z,w) has a converged surface sample
    double max_surface_distance = 0.0;   // over endpoints with a surface sample
    double min_rho = 0.0;                // D2334B: min over curves and times of rho
    double min_rho_deviation = 0.0;      // D2334B: min over curves of (min_t rho - rho(0))
    std::size_t origin_reaching = 0;     // D2334B: starts whose flow reaches the origin in either direction
    double paper_formula_distance = 0.0; // D2334A: distance to (-zw ln w, -z^2 w^2 ln w), w > 0 only
    double detector_agreement = 1.0;
    std::size_t ambiguous_count = 0;
    std::size_t singular_count = 0;
};

SardReport sard_sample(ModelId model, std::size_t n_curves, std::uint64_t seed, const SardOptions& opt = {});

}  // namespace engel
