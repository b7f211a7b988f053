#pragma once

// Exact sparse polynomials in the chart coordinates (x, y, z, w).

#include <array>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace engel {

using Rational = mpq_class;

enum class Var : std::uint8_t { X = 0, Y = 1, Z = 2, W = 3 };

inline constexpr std::array<Var, 4> kAllVars{Var::X, Var::Y, Var::Z, Var::W};

/// Exponents in the fixed order (x, y, z, w).
using Exponent = std::array<std::uint32_t, 4>;

/// A point of the chart, ordered (x, y, z, w).
using Point4 = std::array<double, 4>;
using RationalPoint = std::array<Rational, 4>;

char var_name(Var v);

class Poly {
public:
    using TermMap = std::map<Exponent, Rational>;

    Poly() = default;
    Poly(long c);  // NOLINT(google-explicit-constructor): constants read naturally in formulas
    Poly(const Rational& c);  // NOLINT(google-explicit-constructor)

    static Poly variable(Var v);
    static Poly monomial(const Rational& coeff, const Exponent& exps);

    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }
    std::uint32_t total_degree() const;
    bool depends_on(Var v) const;

    Poly& operator+=(const Poly& other);
    Poly& operator-=(const Poly& other);
    Poly& operator*=(const Poly& other);

    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
    friend Poly operator*(const Poly& a, const Poly& b);
    friend Poly operator-(const Poly& a);
    friend bool operator==(const Poly& a, const Poly& b) { return a.terms_ == b.terms_; }
    friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

    /// Partial derivative with respect to `v`, exact.
    Poly diff(Var v) const;

    /// Substitute zero for each listed variable.
    Poly vanish(std::initializer_list<Var> vars) const;

    /// Value at a floating point. The point is converted to exact rationals,
    /// evaluated exactly, and the result rounded once.
    double eval(const Point4& q) const;
    Rational eval(const RationalPoint& q) const;

    std::string to_string() const;

private:
    void add_term(const Exponent& e, const Rational& c);

    TermMap terms_;
};

inline Poly diff(const Poly& p, Var v) { return p.diff(v); }

/// Polynomial with double coefficients for evaluation in integrator hot loops.
class CompiledPoly {
public:
    CompiledPoly() = default;
    explicit CompiledPoly(const Poly& p);

    double operator()(const Point4& q) const;
    bool is_zero() const { return coeffs_.empty(); }

private:
    std::vector<double> coeffs_;
    std::vector<std::array<std::uint8_t, 4>> exps_;
    std::array<std::uint8_t, 4> max_exp_{};
};

}  // namespace engel
