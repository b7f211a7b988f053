#include "engel/acceptance.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "engel/endpoint.hpp"
#include "engel/io.hpp"

namespace engel::acceptance {

namespace {

using io::fmt;

const Poly z = Poly::variable(Var::Z);
const Poly w = Poly::variable(Var::W);

ode::Options tight()
{
    ode::Options o;
    o.rtol = 1e-10;
    o.atol = 1e-12;
    return o;
}

std::string field_string(const PolyVectorField& v)
{
    std::string s = "(";
    for (std::size_t i = 0; i < 4; ++i) s += (i ? ", " : "") + v[i].to_string();
    return s + ")";
}

// 1 ------------------------------------------------------------------------

CriterionResult growth_vectors()
{
    CriterionResult r{1, "growth vectors", true, ""};
    const RationalPoint origin{Rational(0), Rational(0), Rational(0), Rational(0)};
    const std::vector<std::pair<ModelId, std::vector<int>>> expected = {
        {ModelId::D224, {2, 2, 4}}, {ModelId::D2334A, {2, 3, 3, 4}}, {ModelId::D2334B, {2, 3, 3, 4}}};
    std::ostringstream d;
    for (const auto& [id, dims] : expected) {
        const GrowthVector g = growth_vector(catalog_model(id).pair, origin);
        d << model_name(id) << "=" << g.to_string() << " ";
        if (g.dims != dims) r.pass = false;
    }
    std::mt19937_64 rng(101);
    std::uniform_int_distribution<int> num(-40, 40);
    std::uniform_int_distribution<int> den(1, 13);
    const PfaffianPair engel = catalog_model(ModelId::EngelStd).pair;
    int ok = 0;
    for (int i = 0; i < 50; ++i) {
        RationalPoint q;
        for (auto& c : q) {
            c = Rational(num(rng), den(rng));
            c.canonicalize();
        }
        if (growth_vector(engel, q).dims == std::vector<int>{2, 3, 4}) ++ok;
    }
    d << "engel_std (2,3,4) at " << ok << "/50 random rational points";
    if (ok != 50) r.pass = false;
    r.detail = d.str();
    return r;
}

// 2 ------------------------------------------------------------------------

CriterionResult char_identities()
{
    CriterionResult r{2, "characteristic-field identities", true, ""};
    std::ostringstream d;

    for (ModelId id : {ModelId::D2334A, ModelId::D2334B}) {
        const bool same = char_field(catalog_model(id).pair) == displayed_case_field(id);
        d << model_name(id) << " oracle==display:" << (same ? "yes" : "NO") << "; ";
        if (!same) r.pass = false;
    }

    // Case 1 as stated: oracle = (2z^2w, 2zw^2, -2z(1+zw), -2w), and oracle - display = -2z^2w in d/dz.
    const PolyVectorField oracle = char_field(catalog_model(ModelId::D224).pair);
    PolyVectorField claimed;
    claimed.comp = {2 * z * z * w, 2 * z * w * w, -2 * z * (Poly(1) + z * w), -2 * w};
    const PolyVectorField diff = oracle - displayed_case_field(ModelId::D224);
    const bool claim_field = oracle == claimed;
    const bool claim_diff = diff[0].is_zero() && diff[1].is_zero() && diff[3].is_zero() && diff[2] == -2 * z * z * w;
    d << "d224 oracle=" << field_string(oracle) << " claimed=" << field_string(claimed)
      << " match:" << (claim_field ? "yes" : "NO") << ", dz-discrepancy vs display=" << diff[2].to_string()
      << " (claimed -2*z^2*w):" << (claim_diff ? "yes" : "NO") << "; ";
    if (!claim_field || !claim_diff) r.pass = false;

    int agree = 0, total = 0;
    for (ModelId id : catalog_ids()) {
        const CrossCheckReport rep = cross_check(catalog_model(id).pair);
        ++total;
        if (rep.find(CharVariant::Corrected, CharVariant::Oracle).identical) ++agree;
    }
    for (std::uint64_t s = 0; s < 20; ++s) {
        const CrossCheckReport rep = cross_check(random_pair(1000 + s));
        ++total;
        if (rep.find(CharVariant::Corrected, CharVariant::Oracle).identical) ++agree;
    }
    d << "corrected==oracle on " << agree << "/" << total << " pairs";
    if (agree != total) r.pass = false;
    r.detail = d.str();
    return r;
}

// 3 ------------------------------------------------------------------------

CriterionResult horizontality()
{
    CriterionResult r{3, "horizontality", true, ""};
    int ok = 0, total = 0;
    for (ModelId id : catalog_ids()) {
        const PfaffianPair pair = catalog_model(id).pair;
        for (CharVariant v : {CharVariant::Printed, CharVariant::Corrected, CharVariant::Oracle}) {
            const PolyVectorField c = char_field(pair, v);
            ++total;
            if (theta1(pair, c).is_zero() && theta2(pair, c).is_zero()) ++ok;
        }
    }
    r.pass = ok == total;
    r.detail = "theta1(C) = theta2(C) = 0 for " + std::to_string(ok) + "/" + std::to_string(total) + " model/variant pairs";
    return r;
}

// 4 ------------------------------------------------------------------------

CriterionResult conservation()
{
    CriterionResult r{4, "conservation and Lyapunov decay", true, ""};
    const ode::Options opt = tight();
    std::mt19937_64 rng(404);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_real_distribution<double> half(-0.5, 0.5);

    const PolyVectorField fb = char_field(catalog_model(ModelId::D2334B).pair);
    double drift_b = 0.0;
    for (double rho0 : {1.0, 0.01}) {
        for (int i = 0; i < 20; ++i) {
            const double a = angle(rng), rad = std::sqrt(rho0);
            const Point4 q0{unit(rng), unit(rng), rad * std::cos(a), rad * std::sin(a)};
            drift_b = std::max(drift_b, conserved_drift(integrate(fb, q0, 10.0, opt), rho_poly()));
        }
    }

    const PolyVectorField fa = char_field(catalog_model(ModelId::D2334A).pair);
    double drift_a = 0.0;
    for (int i = 0; i < 20; ++i) {
        const Point4 q0{unit(rng), unit(rng), half(rng), half(rng)};
        drift_a = std::max(drift_a, conserved_drift(integrate(fa, q0, 10.0, opt), z * w));
    }

    int decreasing = 0;
    double worst_final = 0.0;
    for (int i = 0; i < 20; ++i) {
        const Point4 q0{unit(rng), unit(rng), half(rng), half(rng)};
        const LyapunovReport lr = lyapunov_report(q0, 10.0, opt);
        if (lr.strictly_decreasing) ++decreasing;
        worst_final = std::max(worst_final, lr.final_rho);
    }

    r.pass = drift_b <= 1e-8 && drift_a <= 1e-8 && decreasing == 20 && worst_final < 1e-6;
    r.detail = "d2334b rho drift " + fmt(drift_b) + ", d2334a zw drift " + fmt(drift_a) + ", d224 rho strictly decreasing " +
               std::to_string(decreasing) + "/20, max final rho " + fmt(worst_final);
    return r;
}

// 5 ------------------------------------------------------------------------

CriterionResult closed_forms()
{
    CriterionResult r{5, "closed-form solutions", true, ""};
    const ode::Options opt = tight();
    std::mt19937_64 rng(505);
    std::uniform_real_distribution<double> half(-0.5, 0.5);
    std::ostringstream d;
    for (ModelId id : {ModelId::D224, ModelId::D2334A}) {
        const PolyVectorField field = displayed_case_field(id);
        double worst = 0.0;
        for (int i = 0; i < 10; ++i) {
            const Point4 q0{half(rng), half(rng), half(rng), half(rng)};
            for (double t : {0.5, 1.0, 2.0}) {
                const Point4 num = integrate(field, q0, t, opt).final_state();
                const Point4 ref = closed_form(id, q0, t);
                for (std::size_t k = 0; k < 4; ++k) worst = std::max(worst, std::abs(num[k] - ref[k]));
            }
        }
        d << model_name(id) << " max error " << fmt(worst) << "; ";
        if (!(worst <= 1e-8)) r.pass = false;
    }
    r.detail = d.str();
    return r;
}

// 6 ------------------------------------------------------------------------

struct SurfaceCheck {
    std::size_t converged = 0;
    std::size_t total = 0;
    double worst_relative = 0.0;
    double worst_return = 0.0;
};

SurfaceCheck check_surface(double lo, double hi)
{
    const PfaffianPair pair = catalog_model(ModelId::D224).pair;
    const SurfaceSample s = singular_surface(pair, square_grid(lo, hi, 10, true));
    const CompiledField field(char_field(pair));
    const ode::Options opt = SurfaceOptions{}.ode;
    SurfaceCheck c;
    c.total = s.size();
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!s.converged[i]) continue;
        ++c.converged;
        const Point4 p = s.surface_point(i);
        const double zz = p[2], ww = p[3];
        const double ex = -ww * zz * zz / 3.0, ey = -zz * ww * ww / 3.0;
        c.worst_relative = std::max(c.worst_relative, std::hypot(p[0] - ex, p[1] - ey) / std::hypot(ex, ey));

        Eigen::VectorXd q(4);
        q << p[0], p[1], p[2], p[3];
        auto rhs = [&field](double, const Eigen::VectorXd& s_, Eigen::VectorXd& ds) { ds = field(to_point(s_)); };
        const double t_end = s.direction[i] >= 0 ? 30.0 : -30.0;
        ode::integrate(rhs, 0.0, q, t_end, opt,
                       [](double, const Eigen::VectorXd& s_) { return s_(2) * s_(2) + s_(3) * s_(3) >= 1e-16; });
        c.worst_return = std::max(c.worst_return, q.lpNorm<Eigen::Infinity>());
    }
    return c;
}

CriterionResult surface()
{
    CriterionResult r{6, "D224 origin-convergent surface", true, ""};
    const SurfaceCheck outer = check_surface(0.01, 0.1);
    const SurfaceCheck inner = check_surface(0.001, 0.01);
    r.pass = outer.converged == outer.total && inner.converged == inner.total && outer.worst_relative <= 0.05 &&
             inner.worst_relative <= 0.005 && outer.worst_return <= 1e-6 && inner.worst_return <= 1e-6;
    r.detail = "converged " + std::to_string(outer.converged + inner.converged) + "/" +
               std::to_string(outer.total + inner.total) + ", rel. error vs -(1/3)(wz^2, zw^2): " +
               fmt(outer.worst_relative) + " on [0.01,0.1], " + fmt(inner.worst_relative) +
               " on [0.001,0.01]; max distance to origin after re-integration " +
               fmt(std::max(outer.worst_return, inner.worst_return));
    return r;
}

// 7 ------------------------------------------------------------------------

CriterionResult case3_single_point()
{
    CriterionResult r{7, "D2334B flow lines stay off the origin", true, ""};
    SardOptions opt;
    opt.run_detectors = false;
    const SardReport rep = sard_sample(ModelId::D2334B, 50, 707, opt);
    r.pass = rep.min_rho >= 0.01 - 1e-8;
    r.detail = "50 trajectories from rho=0.01: min rho " + fmt(rep.min_rho) + " (deviation " + fmt(rep.min_rho_deviation) + ")";
    return r;
}

// 8 ------------------------------------------------------------------------

CriterionResult detectors()
{
    CriterionResult r{8, "singular-curve detectors", true, ""};
    std::ostringstream d;
    const ode::Options opt;
    const Point4 origin{0.0, 0.0, 0.0, 0.0};

    const PfaffianPair engel = catalog_model(ModelId::EngelStd).pair;
    const SingularVerdict ev = bryant_hsu_test(engel, origin, constant_control(0.0, 1.0, 16), opt);
    const bool engel_ok = ev.sigma_ratio < 1e-7 && ev.bh_smallest < 1e-7 && ev.witness.has_value() &&
                          ev.witness_residual <= 1e-6;
    d << "engel_std u=(0,1): score " << fmt(ev.sigma_ratio) << ", bh " << fmt(ev.bh_smallest) << ", witness residual "
      << fmt(ev.witness_residual) << "; ";
    if (!engel_ok) r.pass = false;

    d << "random controls (8 segments) REGULAR:";
    for (ModelId id : catalog_ids()) {
        const DetectorSweep sw = detector_sweep(catalog_model(id).pair, origin, 100, 8, 808, opt);
        d << " " << model_name(id) << " " << sw.regular << "/100 (" << sw.disagreements << " disagreements)";
        if (sw.regular < 95 || sw.disagreements != 0) r.pass = false;
    }
    d << "; char_control (64 segments):";
    const std::vector<std::pair<ModelId, Point4>> starts = {{ModelId::D224, {0.0, 0.0, 0.1, 0.05}},
                                                             {ModelId::D2334A, {0.0, 0.0, 0.1, 0.05}},
                                                             {ModelId::D2334B, {0.0, 0.0, 0.1, 0.0}}};
    for (const auto& [id, p0] : starts) {
        const PfaffianPair pair = catalog_model(id).pair;
        const SingularVerdict v = bryant_hsu_test(pair, p0, char_control(pair, p0, 1.0, 64, opt), opt);
        const bool singular = v.classification == Classification::Singular &&
                              v.jacobian_classification == Classification::Singular;
        d << " " << model_name(id) << " " << classification_name(v.classification) << " (bh " << fmt(v.bh_smallest)
          << ")";
        if (!singular) r.pass = false;
    }
    r.detail = d.str();
    return r;
}

// 9 ------------------------------------------------------------------------

CriterionResult jacobians()
{
    CriterionResult r{9, "endpoint Jacobian vs finite differences", true, ""};
    const Point4 q0{0.1, -0.2, 0.3, 0.4};
    double worst = 0.0;
    for (ModelId id : catalog_ids()) {
        const PfaffianPair pair = catalog_model(id).pair;
        for (std::size_t n : {4u, 16u, 32u}) {
            const ControlPath ctrl = random_control(n, 900 + n);
            worst = std::max(worst, max_abs_discrepancy(endpoint_jacobian(pair, q0, ctrl, tight()),
                                                        finite_difference_jacobian(pair, q0, ctrl)));
        }
    }
    r.pass = worst <= 1e-5;
    r.detail = "max entrywise discrepancy " + fmt(worst) + " over 4 models x {4,16,32} segments";
    return r;
}

// 10 -----------------------------------------------------------------------

CriterionResult sard()
{
    CriterionResult r{10, "Sard sampling", true, ""};
    const SardReport a = sard_sample(ModelId::D224, 200, 1010);
    SardOptions ob;
    ob.run_detectors = false;
    const SardReport b = sard_sample(ModelId::D2334B, 50, 1011, ob);
    r.pass = a.on_surface == a.n_curves && a.max_surface_distance <= 1e-6 && b.origin_reaching == 0;
    r.detail = "d224: " + std::to_string(a.on_surface) + "/200 endpoints on the surface, max distance " +
               fmt(a.max_surface_distance) + ", detector agreement " + fmt(a.detector_agreement) +
               "; d2334b: origin-reaching starts " + std::to_string(b.origin_reaching) + "/50";
    return r;
}

}  // namespace

PfaffianPair random_pair(std::uint64_t seed, int max_degree)
{
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> coef(-3, 3);
    std::bernoulli_distribution keep(0.3);
    auto draw = [&] {
        Poly p;
        for (std::uint32_t a = 0; a <= static_cast<std::uint32_t>(max_degree); ++a)
            for (std::uint32_t b = 0; a + b <= static_cast<std::uint32_t>(max_degree); ++b)
                for (std::uint32_t c = 0; a + b + c <= static_cast<std::uint32_t>(max_degree); ++c)
                    for (std::uint32_t e = 0; a + b + c + e <= static_cast<std::uint32_t>(max_degree); ++e)
                        if (keep(rng)) p += Poly::monomial(Rational(coef(rng)), {a, b, c, e});
        return p;
    };
    PfaffianPair pair;
    pair.f = draw();
    pair.g = draw();
    return pair;
}

CriterionResult run_criterion(int id)
{
    static const std::vector<std::function<CriterionResult()>> table = {
        growth_vectors, char_identities, horizontality, conservation, closed_forms,
        surface,        case3_single_point, detectors,  jacobians,    sard};
    if (id < 1 || id > kCriterionCount) throw std::out_of_range("criterion id must be 1.." + std::to_string(kCriterionCount));
    try {
        return table[static_cast<std::size_t>(id - 1)]();
    } catch (const std::exception& e) {
        return {id, "criterion " + std::to_string(id), false, std::string("exception: ") + e.what()};
    }
}

std::vector<CriterionResult> run_all()
{
    std::vector<CriterionResult> out;
    for (int i = 1; i <= kCriterionCount; ++i) out.push_back(run_criterion(i));
    return out;
}

std::string format_line(const CriterionResult& r)
{
    return std::string(r.pass ? "PASS" : "FAIL") + " [" + std::to_string(r.id) + "] " + r.name + ": " + r.detail;
}

int report(std::ostream& os, const std::vector<CriterionResult>& results)
{
    int failures = 0;
    for (const auto& r : results) {
        os << format_line(r) << '\n';
        if (!r.pass) ++failures;
    }
    os << (results.size() - static_cast<std::size_t>(failures)) << "/" << results.size() << " criteria passed\n";
    return failures;
}

}  // namespace engel::acceptance
