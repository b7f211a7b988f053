#pragma once

#include <random>

#include "engel/distribution.hpp"

namespace engel::testing {

inline const Poly X = Poly::variable(Var::X);
inline const Poly Y = Poly::variable(Var::Y);
inline const Poly Z = Poly::variable(Var::Z);
inline const Poly W = Poly::variable(Var::W);

inline Rational q(long p, long d = 1)
{
    Rational r(p, d);
    r.canonicalize();
    return r;
}

inline RationalPoint rpt(const Rational& x, const Rational& y, const Rational& z, const Rational& w) { return {x, y, z, w}; }

/// Sparse polynomial in all four variables with small rational coefficients.
inline Poly random_poly(std::mt19937_64& rng, int max_degree = 3, double density = 0.25)
{
    std::uniform_int_distribution<int> num(-5, 5);
    std::uniform_int_distribution<int> den(1, 4);
    std::bernoulli_distribution keep(density);
    Poly p;
    for (std::uint32_t a = 0; a <= static_cast<std::uint32_t>(max_degree); ++a)
        for (std::uint32_t b = 0; a + b <= static_cast<std::uint32_t>(max_degree); ++b)
            for (std::uint32_t c = 0; a + b + c <= static_cast<std::uint32_t>(max_degree); ++c)
                for (std::uint32_t e = 0; a + b + c + e <= static_cast<std::uint32_t>(max_degree); ++e)
                    if (keep(rng)) p += Poly::monomial(q(num(rng), den(rng)), {a, b, c, e});
    return p;
}

inline PolyVectorField random_field(std::mt19937_64& rng, int max_degree = 2)
{
    PolyVectorField v;
    for (auto& c : v.comp) c = random_poly(rng, max_degree, 0.3);
    return v;
}

inline RationalPoint random_rational_point(std::mt19937_64& rng)
{
    std::uniform_int_distribution<int> num(-9, 9);
    std::uniform_int_distribution<int> den(1, 7);
    RationalPoint p;
    for (auto& c : p) c = q(num(rng), den(rng));
    return p;
}

}  // namespace engel::testing
