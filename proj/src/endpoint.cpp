#include "engel/endpoint.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

namespace engel {

ControlPath ControlPath::refined(std::size_t factor) const
{
    if (factor == 0) throw std::invalid_argument("ControlPath::refined: factor must be >= 1");
    ControlPath out;
    out.u.reserve(u.size() * factor);
    for (const auto& seg : u)
        for (std::size_t i = 0; i < factor; ++i) out.u.push_back(seg);
    return out;
}

void ControlPath::validate() const
{
    if (u.empty()) throw std::invalid_argument("ControlPath: at least one segment required");
    for (const auto& seg : u)
        if (!std::isfinite(seg[0]) || !std::isfinite(seg[1]))
            throw std::invalid_argument("ControlPath: non-finite control entry");
}

ControlPath constant_control(double u1, double u2, std::size_t n_segments)
{
    ControlPath c;
    c.u.assign(n_segments, {u1, u2});
    return c;
}

ControlPath random_control(std::size_t n_segments, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    ControlPath c;
    c.u.resize(n_segments);
    for (auto& seg : c.u) {
        seg[0] = uni(rng);
        seg[1] = uni(rng);
    }
    return c;
}

HorizontalSystem::HorizontalSystem(const PfaffianPair& pair)
{
    const Frame fr = frame(pair);
    z_ = CompiledField(fr.Z);
    w_ = CompiledField(fr.W);
    dz_ = CompiledJacobian(fr.Z);
    dw_ = CompiledJacobian(fr.W);
}

Eigen::Vector4d HorizontalSystem::velocity(const Point4& q, const std::array<double, 2>& u) const
{
    return u[0] * z_(q) + u[1] * w_(q);
}

Eigen::Matrix4d HorizontalSystem::linearization(const Point4& q, const std::array<double, 2>& u) const
{
    return u[0] * dz_(q) + u[1] * dw_(q);
}

namespace {

double segment_length(const ControlPath& ctrl) { return 1.0 / static_cast<double>(ctrl.n_segments()); }

Eigen::VectorXd state_vector(const Point4& q)
{
    Eigen::VectorXd y(4);
    y << q[0], q[1], q[2], q[3];
    return y;
}

}  // namespace

Trajectory horizontal_integrate(const PfaffianPair& pair, const Point4& q0, const ControlPath& ctrl,
                                const ode::Options& opt)
{
    ctrl.validate();
    const HorizontalSystem sys(pair);
    const double dt = segment_length(ctrl);
    Trajectory traj;
    traj.append(0.0, q0);
    Eigen::VectorXd y = state_vector(q0);
    for (std::size_t k = 0; k < ctrl.n_segments(); ++k) {
        const auto u = ctrl.u[k];
        const double t0 = static_cast<double>(k) * dt;
        const double t1 = k + 1 == ctrl.n_segments() ? 1.0 : static_cast<double>(k + 1) * dt;
        auto rhs = [&](double, const Eigen::VectorXd& s, Eigen::VectorXd& ds) { ds = sys.velocity(to_point(s), u); };
        ode::integrate(rhs, t0, y, t1, opt, [&traj](double t, const Eigen::VectorXd& s) {
            traj.append(t, to_point(s));
            return true;
        });
    }
    return traj;
}

EndpointJacobian endpoint_jacobian(const PfaffianPair& pair, const Point4& q0, const ControlPath& ctrl,
                                   const ode::Options& opt)
{
    ctrl.validate();
    const HorizontalSystem sys(pair);
    const std::size_t n = ctrl.n_segments();
    const double dt = segment_length(ctrl);

    // Per segment: state q, transition matrix of the segment, and the response
    // G' = A G + [Z W] to a control perturbation on that segment.
    std::vector<Eigen::Matrix4d> transition(n);
    std::vector<Eigen::Matrix<double, 4, 2>> response(n);
    Eigen::VectorXd y(4 + 16 + 8);
    Point4 q = q0;
    for (std::size_t k = 0; k < n; ++k) {
        const auto u = ctrl.u[k];
        y.setZero();
        y.head<4>() = state_vector(q);
        Eigen::Map<Eigen::Matrix4d>(y.data() + 4) = Eigen::Matrix4d::Identity();
        auto rhs = [&](double, const Eigen::VectorXd& s, Eigen::VectorXd& ds) {
            const Point4 p = to_point(s.head<4>());
            const Eigen::Matrix4d a = sys.linearization(p, u);
            ds.head<4>() = sys.velocity(p, u);
            Eigen::Map<Eigen::Matrix4d>(ds.data() + 4) = a * Eigen::Map<const Eigen::Matrix4d>(s.data() + 4);
            Eigen::Matrix<double, 4, 2> forcing;
            forcing.col(0) = sys.Z(p);
            forcing.col(1) = sys.W(p);
            Eigen::Map<Eigen::Matrix<double, 4, 2>>(ds.data() + 20) =
                a * Eigen::Map<const Eigen::Matrix<double, 4, 2>>(s.data() + 20) + forcing;
        };
        const double t0 = static_cast<double>(k) * dt;
        const double t1 = k + 1 == n ? 1.0 : static_cast<double>(k + 1) * dt;
        ode::integrate(rhs, t0, y, t1, opt);
        q = to_point(y.head<4>());
        transition[k] = Eigen::Map<const Eigen::Matrix4d>(y.data() + 4);
        response[k] = Eigen::Map<const Eigen::Matrix<double, 4, 2>>(y.data() + 20);
    }

    EndpointJacobian J(4, static_cast<Eigen::Index>(2 * n));
    Eigen::Matrix4d later = Eigen::Matrix4d::Identity();  // transition from end of segment k to t = 1
    for (std::size_t k = n; k-- > 0;) {
        J.middleCols<2>(static_cast<Eigen::Index>(2 * k)) = later * response[k];
        later = later * transition[k];
    }
    return J;
}

namespace {

Point4 endpoint_rk4(const HorizontalSystem& sys, const Point4& q0, const ControlPath& ctrl, int steps_per_segment)
{
    const double h = segment_length(ctrl) / steps_per_segment;
    Eigen::Vector4d y(q0[0], q0[1], q0[2], q0[3]);
    auto f = [&sys](const Eigen::Vector4d& s, const std::array<double, 2>& u) {
        return sys.velocity({s(0), s(1), s(2), s(3)}, u);
    };
    for (const auto& u : ctrl.u) {
        for (int i = 0; i < steps_per_segment; ++i) {
            const Eigen::Vector4d k1 = f(y, u);
            const Eigen::Vector4d k2 = f(y + 0.5 * h * k1, u);
            const Eigen::Vector4d k3 = f(y + 0.5 * h * k2, u);
            const Eigen::Vector4d k4 = f(y + h * k3, u);
            y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
    }
    return {y(0), y(1), y(2), y(3)};
}

}  // namespace

EndpointJacobian finite_difference_jacobian(const PfaffianPair& pair, const Point4& q0, const ControlPath& ctrl,
                                            double step, int steps_per_segment)
{
    ctrl.validate();
    const HorizontalSystem sys(pair);
    const std::size_t n = ctrl.n_segments();
    EndpointJacobian J(4, static_cast<Eigen::Index>(2 * n));
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t j = 0; j < 2; ++j) {
            ControlPath plus = ctrl;
            ControlPath minus = ctrl;
            plus.u[k][j] += step;
            minus.u[k][j] -= step;
            const Point4 ep = endpoint_rk4(sys, q0, plus, steps_per_segment);
            const Point4 em = endpoint_rk4(sys, q0, minus, steps_per_segment);
            for (std::size_t i = 0; i < 4; ++i)
                J(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(2 * k + j)) = (ep[i] - em[i]) / (2.0 * step);
        }
    }
    return J;
}

double max_abs_discrepancy(const EndpointJacobian& a, const EndpointJacobian& b)
{
    if (a.cols() != b.cols()) throw std::invalid_argument("max_abs_discrepancy: shape mismatch");
    return (a - b).cwiseAbs().maxCoeff();
}

double singular_score(const EndpointJacobian& J)
{
    if (J.size() == 0 || J.isZero(0.0)) throw std::invalid_argument("singular_score: zero Jacobian");
    if (J.cols() < 4) return 0.0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(J);
    const auto& s = svd.singularValues();
    return s(3) / s(0);
}

std::string classification_name(Classification c)
{
    switch (c) {
    case Classification::Singular: return "SINGULAR";
    case Classification::Regular: return "REGULAR";
    case Classification::Ambiguous: return "AMBIGUOUS";
    }
    return "?";
}

Classification classify(double statistic)
{
    if (statistic < kSingularBelow) return Classification::Singular;
    if (statistic > kRegularAbove) return Classification::Regular;
    return Classification::Ambiguous;
}

// Covector transport --------------------------------------------------------------

Eigen::MatrixXd AdjointRecord::constraint_map() const
{
    const auto m = static_cast<Eigen::Index>(constraints.size());
    Eigen::MatrixXd phi(2 * m, 4);
    for (Eigen::Index i = 0; i < m; ++i) phi.middleRows<2>(2 * i) = constraints[static_cast<std::size_t>(i)];
    return phi / std::sqrt(static_cast<double>(m));
}

std::vector<double> constraint_sample_times(std::size_t n_segments)
{
    const std::size_t m = std::max<std::size_t>(16, 2 * n_segments);
    std::vector<double> t(m);
    for (std::size_t i = 0; i < m; ++i) t[i] = static_cast<double>(i) / static_cast<double>(m - 1);
    return t;
}

AdjointRecord adjoint_record(const PfaffianPair& pair, const Point4& q0, const ControlPath& ctrl,
                             const std::vector<double>& sample_times, const ode::Options& opt)
{
    ctrl.validate();
    if (!std::is_sorted(sample_times.begin(), sample_times.end()))
        throw std::invalid_argument("adjoint_record: sample times must be sorted");
    const HorizontalSystem sys(pair);
    const std::size_t n = ctrl.n_segments();

    std::vector<double> stops;
    for (std::size_t k = 0; k <= n; ++k) stops.push_back(static_cast<double>(k) / static_cast<double>(n));
    for (double t : sample_times) {
        if (t < 0.0 || t > 1.0) throw std::invalid_argument("adjoint_record: sample times must lie in [0, 1]");
        stops.push_back(t);
    }
    std::sort(stops.begin(), stops.end());
    stops.erase(std::unique(stops.begin(), stops.end(), [](double a, double b) { return std::abs(a - b) < 1e-14; }),
                stops.end());

    AdjointRecord rec;
    Eigen::VectorXd y(4 + 16 + 16);
    y.head<4>() = state_vector(q0);
    Eigen::Map<Eigen::Matrix4d>(y.data() + 4) = Eigen::Matrix4d::Identity();
    Eigen::Map<Eigen::Matrix4d>(y.data() + 20) = Eigen::Matrix4d::Identity();
    rec.min_transport_det = std::numeric_limits<double>::infinity();

    std::size_t next_sample = 0;
    auto record_samples = [&](double t) {
        while (next_sample < sample_times.size() && std::abs(sample_times[next_sample] - t) < 1e-14) {
            const Point4 q = to_point(y.head<4>());
            const Eigen::Matrix4d psi = Eigen::Map<const Eigen::Matrix4d>(y.data() + 20);
            rec.sample_times.push_back(sample_times[next_sample]);
            rec.sample_states.push_back(q);
            rec.variational.emplace_back(Eigen::Map<const Eigen::Matrix4d>(y.data() + 4));
            rec.transport.push_back(psi);
            Eigen::Matrix<double, 2, 4> rows;
            rows.row(0) = sys.Z(q).transpose() * psi;
            rows.row(1) = sys.W(q).transpose() * psi;
            rec.constraints.push_back(rows);
            rec.min_transport_det = std::min(rec.min_transport_det, std::abs(psi.determinant()));
            ++next_sample;
        }
    };

    rec.base.append(0.0, q0);
    record_samples(0.0);
    for (std::size_t i = 0; i + 1 < stops.size(); ++i) {
        const double a = stops[i];
        const double b = stops[i + 1];
        const auto k = std::min(n - 1, static_cast<std::size_t>(0.5 * (a + b) * static_cast<double>(n)));
        const auto u = ctrl.u[k];
        auto rhs = [&](double, const Eigen::VectorXd& s, Eigen::VectorXd& ds) {
            const Point4 p = to_point(s.head<4>());
            const Eigen::Matrix4d A = sys.linearization(p, u);
            ds.head<4>() = sys.velocity(p, u);
            Eigen::Map<Eigen::Matrix4d>(ds.data() + 4) = A * Eigen::Map<const Eigen::Matrix4d>(s.data() + 4);
            Eigen::Map<Eigen::Matrix4d>(ds.data() + 20) =
                -A.transpose() * Eigen::Map<const Eigen::Matrix4d>(s.data() + 20);
        };
        ode::integrate(rhs, a, y, b, opt);
        rec.base.append(b, to_point(y.head<4>()));
        record_samples(b);
    }
    if (next_sample != sample_times.size()) throw std::logic_error("adjoint_record: not every sample time was reached");
    return rec;
}

bool SingularVerdict::detectors_agree() const
{
    return classification != Classification::Ambiguous &&
           jacobian_classification != Classification::Ambiguous && classification == jacobian_classification;
}

bool SingularVerdict::detectors_disagree() const
{
    return classification != Classification::Ambiguous &&
           jacobian_classification != Classification::Ambiguous && classification != jacobian_classification;
}

SingularVerdict bryant_hsu_test(const PfaffianPair& pair, const Point4& q0, const ControlPath& ctrl,
                                const ode::Options& opt)
{
    SingularVerdict v;
    const EndpointJacobian J = endpoint_jacobian(pair, q0, ctrl, opt);
    v.sigma_ratio = singular_score(J);
    v.jacobian_classification = classify(v.sigma_ratio);

    const AdjointRecord rec = adjoint_record(pair, q0, ctrl, constraint_sample_times(ctrl.n_segments()), opt);
    v.min_transport_det = rec.min_transport_det;
    const Eigen::MatrixXd phi = rec.constraint_map();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(phi, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    v.bh_smallest = s(0) > 0.0 ? s(3) / s(0) : 0.0;
    v.classification = classify(v.bh_smallest);

    if (v.classification == Classification::Singular) {
        Eigen::Vector4d lam = svd.matrixV().col(3).normalized();
        Eigen::Index big = 0;
        lam.cwiseAbs().maxCoeff(&big);
        if (lam(big) < 0.0) lam = -lam;
        double residual = 0.0;
        for (const auto& rows : rec.constraints) residual = std::max(residual, (rows * lam).cwiseAbs().sum());
        v.witness = lam;
        v.witness_residual = residual;
    }
    return v;
}

ControlPath char_control(const PfaffianPair& pair, const Point4& p0, double duration, std::size_t n_segments,
                         const ode::Options& opt)
{
    if (duration == 0.0 || !std::isfinite(duration)) throw std::invalid_argument("char_control: duration must be nonzero");
    if (n_segments == 0) throw std::invalid_argument("char_control: n_segments must be >= 1");
    const CharCoefficients ce = coeffs_oracle(pair);
    const CompiledPoly c(ce.c), e(ce.e);
    const CompiledField field(assemble_field(pair, ce));
    auto rhs = [&field](double, const Eigen::VectorXd& s, Eigen::VectorXd& ds) { ds = field(to_point(s)); };

    ControlPath ctrl;
    ctrl.u.reserve(n_segments);
    Eigen::VectorXd y = state_vector(p0);
    double t = 0.0;
    for (std::size_t k = 0; k < n_segments; ++k) {
        const double mid = duration * (static_cast<double>(k) + 0.5) / static_cast<double>(n_segments);
        ode::integrate(rhs, t, y, mid, opt);
        t = mid;
        const Point4 q = to_point(y);
        const double cv = c(q);
        const double ev = e(q);
        if (std::hypot(cv, ev) < 1e-12)
            throw FieldVanishingError("char_control: characteristic field vanishes along the curve");
        ctrl.u.push_back({duration * cv, duration * ev});
    }
    return ctrl;
}

double DetectorSweep::agreement_fraction() const
{
    const std::size_t decided = agreements + disagreements;
    return decided == 0 ? 1.0 : static_cast<double>(agreements) / static_cast<double>(decided);
}

double DetectorSweep::regular_fraction() const
{
    return n_controls == 0 ? 0.0 : static_cast<double>(regular) / static_cast<double>(n_controls);
}

DetectorSweep detector_sweep(const PfaffianPair& pair, const Point4& q0, std::size_t n_controls,
                             std::size_t n_segments, std::uint64_t seed, const ode::Options& opt)
{
    DetectorSweep sweep;
    sweep.n_controls = n_controls;
    for (std::size_t i = 0; i < n_controls; ++i) {
        const ControlPath ctrl = random_control(n_segments, seed + i);
        SingularVerdict v = bryant_hsu_test(pair, q0, ctrl, opt);
        if (v.classification == Classification::Regular && v.jacobian_classification == Classification::Regular)
            ++sweep.regular;
        if (v.classification == Classification::Ambiguous || v.jacobian_classification == Classification::Ambiguous)
            ++sweep.ambiguous;
        if (v.detectors_agree()) ++sweep.agreements;
        if (v.detectors_disagree()) ++sweep.disagreements;
        sweep.verdicts.push_back(std::move(v));
    }
    return sweep;
}

}  // namespace engel
