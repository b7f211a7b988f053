#pragma once

// Dormand-Prince 5(4) with per-step error control.
//
// The right-hand side is called as rhs(t, y, dydt). The observer is called
// as observer(t, y) after every accepted step and returns false to stop.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace engel::ode {

struct Options {
    double rtol = 1e-10;
    double atol = 1e-12;
    double initial_step = 0.0;  // 0 selects automatically
    double max_step = std::numeric_limits<double>::infinity();
    long max_steps = 2'000'000;
};

class IntegrationError : public std::runtime_error {
public:
    IntegrationError(const std::string& what, double last_time)
        : std::runtime_error(what + " (last time reached: " + std::to_string(last_time) + ")"),
          last_time_(last_time)
    {
    }
    double last_time() const { return last_time_; }

private:
    double last_time_;
};

struct Stats {
    long accepted = 0;
    long rejected = 0;
    double t_reached = 0.0;
    bool stopped_by_observer = false;
};

namespace detail {

// Butcher tableau, Dormand & Prince (1980).
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                        a65 = -5103.0 / 18656;
inline constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// b - bhat
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                        e6 = 22.0 / 525, e7 = -1.0 / 40;

inline double error_norm(const Eigen::VectorXd& err, const Eigen::VectorXd& y0, const Eigen::VectorXd& y1,
                         const Options& opt)
{
    double sum = 0.0;
    for (Eigen::Index i = 0; i < err.size(); ++i) {
        const double sc = opt.atol + opt.rtol * std::max(std::abs(y0(i)), std::abs(y1(i)));
        const double r = err(i) / sc;
        sum += r * r;
    }
    return std::sqrt(sum / static_cast<double>(err.size()));
}

}  // namespace detail

template <class Rhs, class Observer>
Stats integrate(Rhs&& rhs, double t0, Eigen::VectorXd& y, double t1, const Options& opt, Observer&& observer)
{
    using namespace detail;
    if (!(opt.rtol > 0.0) || !(opt.atol > 0.0)) throw std::invalid_argument("integrate: tolerances must be positive");
    Stats stats;
    stats.t_reached = t0;
    if (t1 == t0) return stats;
    if (!y.allFinite()) throw IntegrationError("non-finite initial state", t0);

    const double dir = t1 > t0 ? 1.0 : -1.0;
    const double span = std::abs(t1 - t0);
    const Eigen::Index n = y.size();
    Eigen::VectorXd k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n), err(n);

    double t = t0;
    rhs(t, y, k1);

    double h = opt.initial_step;
    if (h <= 0.0) {
        // Hairer, Norsett & Wanner, starting step selection.
        Eigen::VectorXd sc = (opt.atol + opt.rtol * y.array().abs()).matrix();
        const double d0 = std::sqrt((y.array() / sc.array()).square().mean());
        const double d1 = std::sqrt((k1.array() / sc.array()).square().mean());
        double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        h0 = std::min(h0, span);
        ytmp = y + dir * h0 * k1;
        rhs(t + dir * h0, ytmp, k2);
        const double d2 = std::sqrt(((k2 - k1).array() / sc.array()).square().mean()) / h0;
        const double dm = std::max(d1, d2);
        const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 1.0 / 5.0);
        h = std::min(100.0 * h0, h1);
    }
    h = std::min({h, opt.max_step, span});

    bool last_rejected = false;
    bool last_nonfinite = false;
    while (dir * (t1 - t) > 0.0) {
        if (stats.accepted + stats.rejected >= opt.max_steps) throw IntegrationError("step limit exceeded", t);
        const double remaining = std::abs(t1 - t);
        bool final_step = false;
        if (h >= remaining) {
            h = remaining;
            final_step = true;
        }
        if (h < 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t)))
            throw IntegrationError(last_nonfinite ? "non-finite state" : "step size underflow", t);

        const double s = dir * h;
        ytmp = y + s * a21 * k1;
        rhs(t + c2 * s, ytmp, k2);
        ytmp = y + s * (a31 * k1 + a32 * k2);
        rhs(t + c3 * s, ytmp, k3);
        ytmp = y + s * (a41 * k1 + a42 * k2 + a43 * k3);
        rhs(t + c4 * s, ytmp, k4);
        ytmp = y + s * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
        rhs(t + c5 * s, ytmp, k5);
        ytmp = y + s * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
        rhs(t + s, ytmp, k6);
        ynew = y + s * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        rhs(t + s, ynew, k7);
        err = s * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        const double en = error_norm(err, y, ynew, opt);
        if (!std::isfinite(en) || !ynew.allFinite()) {
            ++stats.rejected;
            h *= 0.25;
            last_rejected = true;
            last_nonfinite = true;
            continue;
        }
        last_nonfinite = false;
        if (en <= 1.0) {
            t = final_step ? t1 : t + s;
            y = ynew;
            k1 = k7;
            ++stats.accepted;
            stats.t_reached = t;
            if (!observer(t, static_cast<const Eigen::VectorXd&>(y))) {
                stats.stopped_by_observer = true;
                return stats;
            }
            double fac = en == 0.0 ? 5.0 : 0.9 * std::pow(en, -0.2);
            fac = std::clamp(fac, 0.2, last_rejected ? 1.0 : 5.0);
            h = std::min(h * fac, opt.max_step);
            last_rejected = false;
        } else {
            ++stats.rejected;
            h *= std::max(0.2, 0.9 * std::pow(en, -0.2));
            last_rejected = true;
        }
    }
    return stats;
}

template <class Rhs>
Stats integrate(Rhs&& rhs, double t0, Eigen::VectorXd& y, double t1, const Options& opt)
{
    return integrate(std::forward<Rhs>(rhs), t0, y, t1, opt, [](double, const Eigen::VectorXd&) { return true; });
}

}  // namespace engel::ode
