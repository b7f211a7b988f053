#include <cmath>

#include <doctest.h>

#include "engel/endpoint.hpp"
#include "support.hpp"

using namespace engel;
using namespace engel::testing;

namespace {

const Point4 kOrigin{0, 0, 0, 0};

ode::Options tight()
{
    ode::Options o;
    o.rtol = 1e-10;
    o.atol = 1e-12;
    return o;
}

PfaffianPair engel_pair() { return catalog_model(ModelId::EngelStd).pair; }

}  // namespace

TEST_SUITE("endpoint") {

TEST_CASE("horizontal curves with constant controls")
{
    const Point4 a = horizontal_integrate(engel_pair(), kOrigin, constant_control(0, 1, 4)).final_state();
    CHECK(a[0] == 0.0);
    CHECK(a[1] == 0.0);
    CHECK(a[3] == doctest::Approx(1.0));

    for (ModelId id : catalog_ids()) {
        const Point4 b = horizontal_integrate(catalog_model(id).pair, kOrigin, constant_control(1, 0, 3)).final_state();
        CHECK(b[0] == 0.0);
        CHECK(b[2] == doctest::Approx(1.0));
        CHECK(b[3] == 0.0);
    }

    // z = w = t, x' = -t, y' = -t^2/2.
    const Point4 c = horizontal_integrate(engel_pair(), kOrigin, constant_control(1, 1, 1), tight()).final_state();
    CHECK(c[0] == doctest::Approx(-0.5).epsilon(1e-10));
    CHECK(c[1] == doctest::Approx(-1.0 / 6.0).epsilon(1e-10));
    CHECK(c[2] == doctest::Approx(1.0));
    CHECK(c[3] == doctest::Approx(1.0));
}

TEST_CASE("controls")
{
    const ControlPath r = random_control(5, 42);
    CHECK(r.n_segments() == 5);
    for (const auto& u : r.u) {
        CHECK(std::abs(u[0]) <= 1.0);
        CHECK(std::abs(u[1]) <= 1.0);
    }
    CHECK(random_control(5, 42).u == r.u);
    CHECK(random_control(5, 43).u != r.u);
    CHECK(r.refined(3).n_segments() == 15);
    CHECK(r.refined(3).u[4] == r.u[1]);
    CHECK_THROWS_AS(ControlPath{}.validate(), std::invalid_argument);
}

TEST_CASE("variational Jacobian matches finite differences")
{
    const Point4 q0{0.2, 0.1, -0.3, 0.25};
    for (ModelId id : catalog_ids()) {
        const PfaffianPair pair = catalog_model(id).pair;
        const ControlPath one{{{1.0, 0.0}}};
        CHECK(max_abs_discrepancy(endpoint_jacobian(pair, q0, one, tight()), finite_difference_jacobian(pair, q0, one)) <
              1e-6);
        const ControlPath ctrl = random_control(6, 61);
        const EndpointJacobian J = endpoint_jacobian(pair, q0, ctrl, tight());
        CHECK(J.cols() == 12);
        CHECK(max_abs_discrepancy(J, finite_difference_jacobian(pair, q0, ctrl)) < 1e-6);
    }
}

TEST_CASE("refining a control splits each Jacobian column into its halves")
{
    const PfaffianPair pair = catalog_model(ModelId::D2334B).pair;
    const Point4 q0{0.0, 0.1, 0.4, -0.2};
    const ControlPath ctrl = random_control(5, 71);
    const EndpointJacobian J = endpoint_jacobian(pair, q0, ctrl, tight());
    const EndpointJacobian Jr = endpoint_jacobian(pair, q0, ctrl.refined(2), tight());
    for (Eigen::Index k = 0; k < 5; ++k)
        for (Eigen::Index j = 0; j < 2; ++j) {
            const Eigen::Vector4d merged = Jr.col(4 * k + j) + Jr.col(4 * k + 2 + j);
            CHECK((merged - J.col(2 * k + j)).cwiseAbs().maxCoeff() < 1e-8);
        }
    const Point4 a = horizontal_integrate(pair, q0, ctrl, tight()).final_state();
    const Point4 b = horizontal_integrate(pair, q0, ctrl.refined(2), tight()).final_state();
    for (std::size_t i = 0; i < 4; ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-9));
    CHECK(classify(singular_score(J)) == classify(singular_score(Jr)));
}

TEST_CASE("covector transport is dual to tangent transport")
{
    const PfaffianPair pair = catalog_model(ModelId::D2334A).pair;
    const AdjointRecord rec =
        adjoint_record(pair, {0.1, 0.0, 0.3, -0.4}, random_control(8, 81), constraint_sample_times(8), tight());
    REQUIRE(rec.transport.size() == 16);
    for (std::size_t i = 0; i < rec.transport.size(); ++i) {
        const Eigen::Matrix4d prod = rec.transport[i].transpose() * rec.variational[i];
        CHECK((prod - Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff() < 1e-8);
    }
    CHECK(rec.min_transport_det > 0.0);
    CHECK(rec.constraint_map().rows() == 32);
}

TEST_CASE("sample times")
{
    const auto t = constraint_sample_times(4);
    CHECK(t.size() == 16);
    CHECK(t.front() == 0.0);
    CHECK(t.back() == 1.0);
    CHECK(constraint_sample_times(32).size() == 64);
}

TEST_CASE("scores and classification")
{
    EndpointJacobian I = EndpointJacobian::Zero(4, 6);
    I.leftCols<4>() = Eigen::Matrix4d::Identity();
    CHECK(singular_score(I) == doctest::Approx(1.0));
    CHECK(singular_score(EndpointJacobian::Identity(4, 3)) == 0.0);
    CHECK_THROWS_AS(singular_score(EndpointJacobian::Zero(4, 6)), std::invalid_argument);
    CHECK(classify(1e-9) == Classification::Singular);
    CHECK(classify(1e-5) == Classification::Ambiguous);
    CHECK(classify(1e-2) == Classification::Regular);
    CHECK(classification_name(Classification::Ambiguous) == "AMBIGUOUS");
}

TEST_CASE("motion along W is singular for the standard Engel pair")
{
    const ControlPath ctrl = constant_control(0, 1, 32);
    CHECK(singular_score(endpoint_jacobian(engel_pair(), kOrigin, ctrl)) < 1e-8);
    const SingularVerdict v = bryant_hsu_test(engel_pair(), kOrigin, ctrl);
    CHECK(v.classification == Classification::Singular);
    CHECK(v.detectors_agree());
    REQUIRE(v.witness.has_value());
    // lambda = (g_z, -f_z) = (0, -1) on z = 0, up to sign and scale.
    CHECK(std::abs((*v.witness)(1)) == doctest::Approx(1.0));
    CHECK(v.witness->norm() == doctest::Approx(1.0));
    CHECK(v.witness_residual < 1e-6);
}

TEST_CASE("the witness covector keeps h1 = h2 = 0 along the curve")
{
    const PfaffianPair pair = catalog_model(ModelId::D2334B).pair;
    const Point4 p0{0, 0, 0.1, 0};
    const ControlPath ctrl = char_control(pair, p0, 1.0, 64);
    const SingularVerdict v = bryant_hsu_test(pair, p0, ctrl);
    REQUIRE(v.witness.has_value());
    const std::vector<double> fine = [] {
        std::vector<double> t(201);
        for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<double>(i) / 200.0;
        return t;
    }();
    const AdjointRecord rec = adjoint_record(pair, p0, ctrl, fine);
    double worst = 0.0;
    for (const auto& rows : rec.constraints) worst = std::max(worst, (rows * *v.witness).cwiseAbs().maxCoeff());
    CHECK(worst < 1e-6);
}

TEST_CASE("a curve leaving the singular direction is regular")
{
    const SingularVerdict v = bryant_hsu_test(engel_pair(), kOrigin, constant_control(1, 1, 32));
    CHECK(v.classification == Classification::Regular);
    CHECK(v.jacobian_classification == Classification::Regular);
    CHECK_FALSE(v.witness.has_value());
}

TEST_CASE("characteristic controls give singular curves")
{
    const std::vector<std::pair<ModelId, Point4>> starts = {{ModelId::D224, {-1e-3 / 3.0, -1e-3 / 3.0, 0.1, 0.1}},
                                                             {ModelId::D2334A, {0, 0, 0.1, 0.05}},
                                                             {ModelId::D2334B, {0, 0, 0.1, 0}}};
    for (const auto& [id, p0] : starts) {
        const PfaffianPair pair = catalog_model(id).pair;
        const SingularVerdict v = bryant_hsu_test(pair, p0, char_control(pair, p0, 1.0, 64));
        CHECK(v.classification == Classification::Singular);
        CHECK(v.jacobian_classification == Classification::Singular);
    }
}

TEST_CASE("characteristic control for the standard Engel pair is pure W motion")
{
    const ControlPath c = char_control(engel_pair(), {0, 0, 0, 0.5}, 0.7, 8);
    for (const auto& u : c.u) {
        CHECK(u[0] == 0.0);
        CHECK(u[1] == doctest::Approx(0.7));
    }
    CHECK_THROWS_AS(char_control(engel_pair(), kOrigin, 0.0, 8), std::invalid_argument);
    CHECK_THROWS_AS(char_control(catalog_model(ModelId::D224).pair, kOrigin, 1.0, 8), FieldVanishingError);
}

TEST_CASE("random controls: detector sweep and calibration")
{
    const DetectorSweep s = detector_sweep(engel_pair(), kOrigin, 20, 8, 5);
    CHECK(s.n_controls == 20);
    CHECK(s.disagreements == 0);
    CHECK(s.regular == 20);
    CHECK(s.agreement_fraction() == 1.0);

    // Frozen calibration: count of 32-segment random controls with score above 1e-3.
    std::size_t above = 0;
    for (std::uint64_t i = 0; i < 100; ++i)
        if (singular_score(endpoint_jacobian(engel_pair(), kOrigin, random_control(32, 1 + i))) > 1e-3) ++above;
    CHECK(above == 65);
}

TEST_CASE("Sard sampling")
{
    const SardReport empty = sard_sample(ModelId::D224, 0, 1);
    CHECK(empty.endpoints.empty());
    CHECK(empty.n_curves == 0);

    const SardReport a = sard_sample(ModelId::D224, 20, 3);
    CHECK(a.on_surface == 20);
    CHECK(a.max_surface_distance < 1e-6);
    CHECK(a.singular_count == 20);

    SardOptions no_detectors;
    no_detectors.run_detectors = false;
    const SardReport b = sard_sample(ModelId::D2334B, 10, 4, no_detectors);
    CHECK(b.min_rho >= 0.01 - 1e-8);
    CHECK(b.origin_reaching == 0);
    CHECK(std::isnan(b.scores.front()));

    const SardReport c = sard_sample(ModelId::D2334A, 10, 5, no_detectors);
    CHECK(c.paper_formula_distance < 1e-4);
}

}
