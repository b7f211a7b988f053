#include <cmath>
#include <numbers>

#include <doctest.h>

#include "engel/flow.hpp"
#include "support.hpp"

using namespace engel;
using namespace engel::testing;

namespace {

ode::Options tight()
{
    ode::Options o;
    o.rtol = 1e-10;
    o.atol = 1e-12;
    return o;
}

double max_diff(const Point4& a, const Point4& b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < 4; ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace

TEST_SUITE("integrator") {

TEST_CASE("exponential growth is reproduced, and tighter tolerances help")
{
    auto rhs = [](double, const Eigen::VectorXd& y, Eigen::VectorXd& dy) { dy = y; };
    double previous = 1.0;
    for (double tol : {1e-4, 1e-7, 1e-10}) {
        ode::Options o;
        o.rtol = tol;
        o.atol = tol * 1e-2;
        Eigen::VectorXd y(1);
        y << 1.0;
        ode::integrate(rhs, 0.0, y, 2.0, o);
        const double err = std::abs(y(0) - std::exp(2.0));
        CHECK(err < previous);
        CHECK(err < 50.0 * tol * std::exp(2.0));
        previous = err;
    }
}

TEST_CASE("fifth-order accuracy with a fixed step")
{
    // With tolerances out of reach and max_step pinned, halving h shrinks the error ~32x.
    auto rhs = [](double t, const Eigen::VectorXd&, Eigen::VectorXd& dy) { dy.resize(1); dy(0) = std::cos(t); };
    auto run = [&](double h) {
        ode::Options o;
        o.rtol = 1.0;
        o.atol = 1.0;
        o.initial_step = h;
        o.max_step = h;
        Eigen::VectorXd y(1);
        y << 0.0;
        ode::integrate(rhs, 0.0, y, 4.0, o);
        return std::abs(y(0) - std::sin(4.0));
    };
    const double ratio = run(0.2) / run(0.1);
    CHECK(ratio > 20.0);
    CHECK(ratio < 90.0);
}

TEST_CASE("forward then backward returns to the start")
{
    const PolyVectorField f = char_field(catalog_model(ModelId::D2334B).pair);
    const Point4 q0{0.3, -0.2, 0.6, -0.4};
    const Point4 q1 = integrate(f, q0, 3.0, tight()).final_state();
    const Point4 back = integrate(f, q1, -3.0, tight()).final_state();
    CHECK(max_diff(back, q0) < 1e-8);
}

TEST_CASE("blow-up is reported")
{
    auto rhs = [](double, const Eigen::VectorXd& y, Eigen::VectorXd& dy) { dy = y.cwiseProduct(y); };
    Eigen::VectorXd y(1);
    y << 1.0;
    CHECK_THROWS_AS(ode::integrate(rhs, 0.0, y, 2.0, ode::Options{}), ode::IntegrationError);
}

TEST_CASE("observer can stop the integration")
{
    auto rhs = [](double, const Eigen::VectorXd&, Eigen::VectorXd& dy) { dy.setOnes(1); };
    Eigen::VectorXd y(1);
    y << 0.0;
    const ode::Stats st = ode::integrate(rhs, 0.0, y, 10.0, ode::Options{},
                                         [](double, const Eigen::VectorXd& s) { return s(0) < 1.0; });
    CHECK(st.stopped_by_observer);
    CHECK(st.t_reached < 10.0);
    CHECK(y(0) >= 1.0);
}

}

TEST_SUITE("flow") {

TEST_CASE("rotation in the (z,w) plane")
{
    const PolyVectorField f = char_field(catalog_model(ModelId::D2334B).pair);
    const Trajectory tr = integrate(f, {0, 0, 1, 0}, std::numbers::pi / 4.0, tight(), default_monitors());
    CHECK(tr.final_state()[2] == doctest::Approx(0.0).scale(1.0).epsilon(1e-8));
    CHECK(tr.final_state()[3] == doctest::Approx(1.0).epsilon(1e-8));
    for (double r : tr.monitor("rho")->values) CHECK(std::abs(r - 1.0) <= 1e-9);
    CHECK(tr.times.front() == 0.0);
    CHECK(tr.states.front() == Point4{0, 0, 1, 0});
}

TEST_CASE("zw is conserved along the (2,3,3,4)(A) field")
{
    const PolyVectorField f = char_field(catalog_model(ModelId::D2334A).pair);
    CHECK(lie_derivative(f, Z * W).is_zero());
    const Trajectory tr = integrate(f, {0, 0, 1, 1}, 2.0, tight(), default_monitors());
    for (double v : tr.monitor("zw")->values) CHECK(std::abs(v - 1.0) <= 1e-9);
    CHECK(conserved_drift(tr, Z * W) <= 1e-8);
}

TEST_CASE("rho is conserved along the (2,3,3,4)(B) field")
{
    const PolyVectorField f = char_field(catalog_model(ModelId::D2334B).pair);
    CHECK(lie_derivative(f, rho_poly()).is_zero());
    CHECK(conserved_drift(integrate(f, {0, 0, 1, 0}, 10.0, tight()), rho_poly()) <= 1e-8);
}

TEST_CASE("monitor channels match the monitored polynomial")
{
    const PolyVectorField f = char_field(catalog_model(ModelId::D224).pair);
    const Trajectory tr = integrate(f, {0.1, 0.2, 0.3, -0.2}, 1.0, tight(), default_monitors());
    const MonitorChannel* rho = tr.monitor("rho");
    REQUIRE(rho != nullptr);
    for (std::size_t i = 0; i < tr.size(); ++i) CHECK(rho->values[i] == doctest::Approx(rho_poly().eval(tr.states[i])).epsilon(1e-14));
    CHECK(tr.monitor("nope") == nullptr);
}

TEST_CASE("zero field gives a constant trajectory")
{
    const Point4 q0{1, 2, 3, 4};
    const Trajectory tr = integrate(PolyVectorField{}, q0, 5.0);
    CHECK(tr.final_state() == q0);
    CHECK(conserved_drift(tr, X * Y + Z) == 0.0);
    CHECK_THROWS_AS(integrate(PolyVectorField{}, q0, 0.0), std::invalid_argument);
}

TEST_CASE("closed forms")
{
    const Point4 a = closed_form(ModelId::D2334A, {0, 0, 1, 1}, 1.0);
    CHECK(a[0] == doctest::Approx(-2.0));
    CHECK(a[1] == doctest::Approx(-2.0));
    CHECK(a[2] == doctest::Approx(std::exp(-2.0)));
    CHECK(a[3] == doctest::Approx(std::exp(2.0)));

    const Point4 lim = closed_form(ModelId::D224, {-1.0 / 3.0, -1.0 / 3.0, 1, 1}, 40.0);
    CHECK(max_diff(lim, {0, 0, 0, 0}) < 1e-15);
    for (ModelId id : {ModelId::D224, ModelId::D2334A}) {
        const Point4 q0{0.3, -0.1, 0.7, 0.2};
        CHECK(closed_form(id, q0, 0.0) == q0);
        const Point4 num = integrate(displayed_case_field(id), q0, 1.5, tight()).final_state();
        CHECK(max_diff(num, closed_form(id, q0, 1.5)) < 1e-8);
    }
    CHECK_FALSE(has_closed_form(ModelId::D2334B));
    CHECK_THROWS_AS(closed_form(ModelId::D2334B, {0, 0, 1, 0}, 1.0), std::invalid_argument);
}

TEST_CASE("rho decays along the (2,2,4) field")
{
    const LyapunovReport a = lyapunov_report({0, 0, 0.3, 0.3}, 10.0, tight());
    CHECK(a.rho_monotone);
    CHECK(a.strictly_decreasing);
    CHECK(a.final_rho < 1e-6);
    const LyapunovReport b = lyapunov_report({0, 0, 0.5, -0.5}, 10.0, tight());
    CHECK(b.strictly_decreasing);
    CHECK(b.violations.empty());
    const LyapunovReport c = lyapunov_report({0, 0, 0, 0}, 10.0, tight());
    CHECK(c.final_rho == 0.0);
    CHECK(c.rho_monotone);
    CHECK_THROWS_AS(lyapunov_report({0, 0, 0.8, 0}, 1.0), std::invalid_argument);
}

TEST_CASE("surface offsets for (2,2,4)")
{
    const SurfaceSample s = singular_surface(ModelId::D224, {{0.1, 0.1}, {0.05, 0.0}, {-0.02, 0.07}});
    REQUIRE(s.converged_count() == 3);
    CHECK(s.skew_product);
    const Point4 p = s.surface_point(0);
    CHECK(p[0] == doctest::Approx(-1.0 / 3.0 * 0.1 * 0.01).epsilon(0.05));
    CHECK(p[1] == doctest::Approx(-1.0 / 3.0 * 0.1 * 0.01).epsilon(0.05));
    CHECK(s.offsets[1][0] == 0.0);
    CHECK(s.offsets[1][1] == 0.0);
    CHECK_THROWS(singular_surface(ModelId::D224, {{0.0, 0.0}}));
}

TEST_CASE("no surface for (2,3,3,4)(B)")
{
    std::vector<std::array<double, 2>> grid;
    for (int k = 0; k < 8; ++k) {
        const double a = k * std::numbers::pi / 4.0;
        grid.push_back({0.1 * std::cos(a), 0.1 * std::sin(a)});
    }
    SurfaceOptions opt;
    opt.t_max = 10.0;
    const SurfaceSample s = singular_surface(ModelId::D2334B, grid, opt);
    CHECK(s.converged_count() == 0);
}

TEST_CASE("(2,3,3,4)(A) axes converge in opposite time directions")
{
    const SurfaceSample s = singular_surface(ModelId::D2334A, {{0.05, 0.0}, {0.0, 0.05}, {0.05, 0.05}});
    CHECK(s.converged[0]);
    CHECK(s.direction[0] == 1);
    CHECK(s.converged[1]);
    CHECK(s.direction[1] == -1);
    CHECK_FALSE(s.converged[2]);
}

TEST_CASE("square grid")
{
    const auto g = square_grid(0.1, 0.2, 3);
    CHECK(g.size() == 9);
    CHECK(g.front() == std::array<double, 2>{0.1, 0.1});
    CHECK(square_grid(0.1, 0.2, 3, true).size() == 36);
}

}
