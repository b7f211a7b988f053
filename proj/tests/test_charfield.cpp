#include <doctest.h>

#include "engel/acceptance.hpp"
#include "engel/charfield.hpp"
#include "engel/flow.hpp"
#include "support.hpp"

using namespace engel;
using namespace engel::testing;

TEST_SUITE("charfield") {

TEST_CASE("coefficients for the (2,3,3,4) models")
{
    for (CharVariant v : {CharVariant::Printed, CharVariant::Corrected, CharVariant::Oracle}) {
        const CharCoefficients a = coeffs(catalog_model(ModelId::D2334A).pair, v);
        CHECK(a.c == -2 * Z);
        CHECK(a.e == 2 * W);
        const CharCoefficients b = coeffs(catalog_model(ModelId::D2334B).pair, v);
        CHECK(b.c == -2 * W);
        CHECK(b.e == 2 * Z);
    }
}

TEST_CASE("coefficients for d224 agree across routes")
{
    // [Z,[Z,W]] = -2 d/dx and [W,[Z,W]] = -d/dy with lambda = (w, -2z).
    for (CharVariant v : {CharVariant::Printed, CharVariant::Corrected, CharVariant::Oracle}) {
        const CharCoefficients c = coeffs(catalog_model(ModelId::D224).pair, v);
        CHECK(c.c == -2 * Z);
        CHECK(c.e == -2 * W);
    }
}

TEST_CASE("standard Engel pair: C is proportional to W")
{
    const CharCoefficients c = coeffs_oracle(catalog_model(ModelId::EngelStd).pair);
    CHECK(c.c.is_zero());
    CHECK(c.e == Poly(1));
    const CharCoefficients z = coeffs_corrected({Poly(), Poly()});
    CHECK(z.c.is_zero());
    CHECK(z.e.is_zero());
}

TEST_CASE("assembled fields")
{
    CHECK(char_field(catalog_model(ModelId::D2334A).pair) == displayed_case_field(ModelId::D2334A));
    CHECK(char_field(catalog_model(ModelId::D2334B).pair) == displayed_case_field(ModelId::D2334B));
    const PolyVectorField d = char_field(catalog_model(ModelId::D224).pair);
    const Point4 p{0, 0, 1, 1};
    CHECK(d[0].eval(p) == 2.0);
    CHECK(d[1].eval(p) == 2.0);
    CHECK(d[2].eval(p) == -2.0);
    CHECK(d[3].eval(p) == -2.0);
    CHECK(d == displayed_case_field(ModelId::D224));
}

TEST_CASE("cross check reports")
{
    for (ModelId id : catalog_ids()) {
        const CrossCheckReport r = cross_check(catalog_model(id).pair);
        REQUIRE(r.comparisons.size() == 3);
        CHECK(r.find(CharVariant::Corrected, CharVariant::Oracle).identical);
    }
    // The printed route drops the f, g weights, so it differs once the pair depends on x or y.
    const PfaffianPair pair{X * Z, Y * Z * Z};
    const CrossCheckReport report = cross_check(pair);
    const VariantComparison& c = report.find(CharVariant::Printed, CharVariant::Oracle);
    CHECK_FALSE(c.identical);
    CHECK_FALSE((c.discrepancy_c.is_zero() && c.discrepancy_e.is_zero()));
    CHECK(c.discrepancy_c == coeffs_printed(pair).c - coeffs_oracle(pair).c);
}

TEST_CASE("corrected route equals the bracket route on random pairs")
{
    for (std::uint64_t s = 0; s < 30; ++s) {
        const PfaffianPair pair = acceptance::random_pair(500 + s);
        const CharCoefficients a = coeffs_corrected(pair), b = coeffs_oracle(pair);
        CHECK(a.c == b.c);
        CHECK(a.e == b.e);
    }
}

TEST_CASE("the covector annihilates the first bracket")
{
    std::mt19937_64 rng(31);
    for (int i = 0; i < 30; ++i) {
        const PfaffianPair pair{random_poly(rng), random_poly(rng)};
        const Frame fr = frame(pair);
        CHECK(pair_with(char_covector(pair), lie_bracket(fr.Z, fr.W)).is_zero());
    }
}

TEST_CASE("characteristic fields are horizontal")
{
    std::mt19937_64 rng(32);
    std::vector<PfaffianPair> pairs;
    for (ModelId id : catalog_ids()) pairs.push_back(catalog_model(id).pair);
    for (int i = 0; i < 10; ++i) pairs.push_back({random_poly(rng), random_poly(rng)});
    for (const auto& pair : pairs)
        for (CharVariant v : {CharVariant::Printed, CharVariant::Corrected, CharVariant::Oracle}) {
            const PolyVectorField c = char_field(pair, v);
            CHECK(theta1(pair, c).is_zero());
            CHECK(theta2(pair, c).is_zero());
        }
}

TEST_CASE("C vanishes where z = w = 0 for the degenerate models")
{
    for (ModelId id : degenerate_ids()) {
        const PolyVectorField c = char_field(catalog_model(id).pair);
        for (std::size_t i = 0; i < 4; ++i) CHECK(c[i].vanish({Var::Z, Var::W}).is_zero());
    }
}

TEST_CASE("bracket route succeeds on random pairs")
{
    CHECK_NOTHROW(coeffs_oracle(acceptance::random_pair(7)));
    CHECK(variant_name(CharVariant::Oracle) == "oracle");
}

}
