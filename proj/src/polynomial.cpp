#include "engel/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace engel {

char var_name(Var v)
{
    static constexpr char names[] = {'x', 'y', 'z', 'w'};
    return names[static_cast<std::size_t>(v)];
}

Poly::Poly(long c) : Poly(Rational(c)) {}

Poly::Poly(const Rational& c)
{
    if (c != 0) terms_.emplace(Exponent{0, 0, 0, 0}, c);
}

Poly Poly::variable(Var v)
{
    Exponent e{0, 0, 0, 0};
    e[static_cast<std::size_t>(v)] = 1;
    return monomial(1, e);
}

Poly Poly::monomial(const Rational& coeff, const Exponent& exps)
{
    Poly p;
    p.add_term(exps, coeff);
    return p;
}

std::uint32_t Poly::total_degree() const
{
    std::uint32_t d = 0;
    for (const auto& [e, c] : terms_) d = std::max(d, e[0] + e[1] + e[2] + e[3]);
    return d;
}

bool Poly::depends_on(Var v) const
{
    const auto i = static_cast<std::size_t>(v);
    return std::any_of(terms_.begin(), terms_.end(), [i](const auto& t) { return t.first[i] != 0; });
}

void Poly::add_term(const Exponent& e, const Rational& c)
{
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace(e, c);
    if (inserted) return;
    it->second += c;
    if (it->second == 0) terms_.erase(it);
}

Poly& Poly::operator+=(const Poly& other)
{
    for (const auto& [e, c] : other.terms_) add_term(e, c);
    return *this;
}

Poly& Poly::operator-=(const Poly& other)
{
    for (const auto& [e, c] : other.terms_) add_term(e, -c);
    return *this;
}

Poly operator*(const Poly& a, const Poly& b)
{
    Poly out;
    for (const auto& [ea, ca] : a.terms_) {
        for (const auto& [eb, cb] : b.terms_) {
            Exponent e{ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2], ea[3] + eb[3]};
            out.add_term(e, ca * cb);
        }
    }
    return out;
}

Poly& Poly::operator*=(const Poly& other)
{
    *this = *this * other;
    return *this;
}

Poly operator-(const Poly& a)
{
    Poly out = a;
    for (auto& [e, c] : out.terms_) c = -c;
    return out;
}

Poly Poly::diff(Var v) const
{
    const auto i = static_cast<std::size_t>(v);
    Poly out;
    for (const auto& [e, c] : terms_) {
        if (e[i] == 0) continue;
        Exponent de = e;
        --de[i];
        out.add_term(de, c * e[i]);
    }
    return out;
}

Poly Poly::vanish(std::initializer_list<Var> vars) const
{
    Poly out;
    for (const auto& [e, c] : terms_) {
        const bool killed = std::any_of(vars.begin(), vars.end(),
                                        [&e](Var v) { return e[static_cast<std::size_t>(v)] != 0; });
        if (!killed) out.terms_.emplace(e, c);
    }
    return out;
}

namespace {

Rational ipow(const Rational& base, std::uint32_t n)
{
    Rational r = 1;
    Rational b = base;
    while (n != 0) {
        if (n & 1U) r *= b;
        b *= b;
        n >>= 1U;
    }
    return r;
}

}  // namespace

Rational Poly::eval(const RationalPoint& q) const
{
    Rational sum = 0;
    for (const auto& [e, c] : terms_) {
        Rational t = c;
        for (std::size_t i = 0; i < 4; ++i)
            if (e[i] != 0) t *= ipow(q[i], e[i]);
        sum += t;
    }
    return sum;
}

double Poly::eval(const Point4& q) const
{
    RationalPoint exact;
    for (std::size_t i = 0; i < 4; ++i) {
        if (!std::isfinite(q[i])) throw std::domain_error("Poly::eval: non-finite coordinate");
        exact[i] = Rational(q[i]);
    }
    return eval(exact).get_d();
}

std::string Poly::to_string() const
{
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    // Highest total degree first reads better than the map's lexicographic order.
    std::vector<std::pair<Exponent, Rational>> sorted(terms_.begin(), terms_.end());
    std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
        const auto da = a.first[0] + a.first[1] + a.first[2] + a.first[3];
        const auto db = b.first[0] + b.first[1] + b.first[2] + b.first[3];
        return da > db;
    });
    for (const auto& [e, c] : sorted) {
        Rational mag = abs(c);
        if (first) {
            if (c < 0) os << '-';
        } else {
            os << (c < 0 ? " - " : " + ");
        }
        first = false;
        const bool constant = e == Exponent{0, 0, 0, 0};
        if (mag != 1 || constant) {
            os << mag.get_str();
            if (!constant) os << '*';
        }
        bool need_star = false;
        for (std::size_t i = 0; i < 4; ++i) {
            if (e[i] == 0) continue;
            if (need_star) os << '*';
            os << var_name(static_cast<Var>(i));
            if (e[i] > 1) os << '^' << e[i];
            need_star = true;
        }
    }
    return os.str();
}

CompiledPoly::CompiledPoly(const Poly& p)
{
    coeffs_.reserve(p.size());
    exps_.reserve(p.size());
    for (const auto& [e, c] : p.terms()) {
        std::array<std::uint8_t, 4> small{};
        for (std::size_t i = 0; i < 4; ++i) {
            if (e[i] > 255) throw std::invalid_argument("CompiledPoly: exponent too large");
            small[i] = static_cast<std::uint8_t>(e[i]);
            max_exp_[i] = std::max(max_exp_[i], small[i]);
        }
        coeffs_.push_back(c.get_d());
        exps_.push_back(small);
    }
}

double CompiledPoly::operator()(const Point4& q) const
{
    if (coeffs_.empty()) return 0.0;
    // Low degrees dominate here; a small power table per call beats pow().
    std::array<std::array<double, 16>, 4> pw{};
    std::array<std::vector<double>, 4> big;
    for (std::size_t i = 0; i < 4; ++i) {
        const std::size_t n = max_exp_[i];
        double* table = pw[i].data();
        if (n >= 16) {
            big[i].resize(n + 1);
            table = big[i].data();
        }
        table[0] = 1.0;
        for (std::size_t k = 1; k <= n; ++k) table[k] = table[k - 1] * q[i];
    }
    auto power = [&](std::size_t i, std::size_t k) { return max_exp_[i] >= 16 ? big[i][k] : pw[i][k]; };
    double sum = 0.0;
    for (std::size_t t = 0; t < coeffs_.size(); ++t) {
        const auto& e = exps_[t];
        sum += coeffs_[t] * power(0, e[0]) * power(1, e[1]) * power(2, e[2]) * power(3, e[3]);
    }
    return sum;
}

}  // namespace engel
