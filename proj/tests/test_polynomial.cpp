#include <doctest.h>

#include "engel/polynomial.hpp"
#include "support.hpp"

using namespace engel;
using namespace engel::testing;

TEST_SUITE("polycore") {

TEST_CASE("addition merges and cancels coefficients")
{
    CHECK((Z * Z + (-(Z * Z))).is_zero());
    const Poly s = Z * Z + Z * W;
    CHECK(s.size() == 2);
    const Poly t = s + Z * W;
    CHECK(t == Z * Z + 2 * Z * W);
    CHECK(t.terms().at({0, 0, 1, 1}) == 2);
}

TEST_CASE("multiplication")
{
    CHECK(Z * Z == Poly::monomial(1, {0, 0, 2, 0}));
    CHECK((Z + W) * (Z - W) == Z * Z - W * W);
    CHECK((Poly() * (Z + X)).is_zero());
}

TEST_CASE("derivatives")
{
    CHECK(diff(Z * Z, Var::Z) == 2 * Z);
    const Poly b = Poly(q(1, 3)) * Z * Z * Z + Z * W * W;
    CHECK(diff(b, Var::W) == 2 * Z * W);
    CHECK(diff(Z * W, Var::X).is_zero());
}

TEST_CASE("evaluation")
{
    CHECK((Z * Z + W * W).eval(Point4{0, 0, 1, 1}) == 2.0);
    CHECK((Z * W).eval(Point4{5, 7, 0, 3}) == 0.0);
    const Poly b = Poly(q(1, 3)) * Z * Z * Z + Z * W * W;
    CHECK(b.eval(rpt(0, 0, 1, 1)) == q(4, 3));
    CHECK(b.eval(Point4{0, 0, 1, 1}) == doctest::Approx(4.0 / 3.0).epsilon(1e-16));
}

TEST_CASE("printing and structure")
{
    const Poly p = -2 * Z * Z * W - Poly(q(2, 3)) * Z * Z * Z * Z;
    CHECK(p.total_degree() == 4);
    CHECK(p.depends_on(Var::W));
    CHECK_FALSE(p.depends_on(Var::X));
    CHECK(Poly().to_string() == "0");
    CHECK(p.vanish({Var::W}) == -Poly(q(2, 3)) * Z * Z * Z * Z);
    CHECK(p.vanish({Var::Z}).is_zero());
    CHECK(Poly::monomial(0, {1, 0, 0, 0}).is_zero());
}

TEST_CASE("partial derivatives commute")
{
    std::mt19937_64 rng(11);
    for (int i = 0; i < 40; ++i) {
        const Poly p = random_poly(rng, 4);
        for (Var a : kAllVars)
            for (Var b : kAllVars) CHECK(diff(diff(p, a), b) == diff(diff(p, b), a));
    }
}

TEST_CASE("Leibniz rule")
{
    std::mt19937_64 rng(12);
    for (int i = 0; i < 40; ++i) {
        const Poly p = random_poly(rng), r = random_poly(rng);
        for (Var v : kAllVars) CHECK(diff(p * r, v) == diff(p, v) * r + p * diff(r, v));
    }
}

TEST_CASE("evaluation is a ring homomorphism at rational points")
{
    std::mt19937_64 rng(13);
    for (int i = 0; i < 40; ++i) {
        const Poly p = random_poly(rng), r = random_poly(rng);
        const RationalPoint pt = random_rational_point(rng);
        CHECK((p + r).eval(pt) == p.eval(pt) + r.eval(pt));
        CHECK((p * r).eval(pt) == p.eval(pt) * r.eval(pt));
        CHECK((-p).eval(pt) == -p.eval(pt));
    }
}

TEST_CASE("compiled evaluation tracks exact evaluation")
{
    std::mt19937_64 rng(14);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (int i = 0; i < 40; ++i) {
        const Poly p = random_poly(rng, 4);
        const CompiledPoly c(p);
        const Point4 pt{u(rng), u(rng), u(rng), u(rng)};
        CHECK(c(pt) == doctest::Approx(p.eval(pt)).epsilon(1e-12).scale(1.0));
    }
}

}
