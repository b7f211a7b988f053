#include "engel/distribution.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>

namespace engel {

bool PolyVectorField::is_zero() const
{
    return std::all_of(comp.begin(), comp.end(), [](const Poly& p) { return p.is_zero(); });
}

PolyVectorField operator+(const PolyVectorField& a, const PolyVectorField& b)
{
    PolyVectorField out;
    for (std::size_t i = 0; i < 4; ++i) out[i] = a[i] + b[i];
    return out;
}

PolyVectorField operator-(const PolyVectorField& a, const PolyVectorField& b)
{
    PolyVectorField out;
    for (std::size_t i = 0; i < 4; ++i) out[i] = a[i] - b[i];
    return out;
}

PolyVectorField operator*(const Poly& s, const PolyVectorField& v)
{
    PolyVectorField out;
    for (std::size_t i = 0; i < 4; ++i) out[i] = s * v[i];
    return out;
}

Frame frame(const PfaffianPair& pair)
{
    Frame fr;
    fr.Z[2] = Poly(1);
    fr.W[0] = -pair.f;
    fr.W[1] = -pair.g;
    fr.W[3] = Poly(1);
    return fr;
}

Poly lie_derivative(const PolyVectorField& a, const Poly& p)
{
    Poly out;
    for (std::size_t j = 0; j < 4; ++j) {
        if (a[j].is_zero()) continue;
        out += a[j] * p.diff(kAllVars[j]);
    }
    return out;
}

PolyVectorField lie_bracket(const PolyVectorField& a, const PolyVectorField& b)
{
    PolyVectorField out;
    for (std::size_t i = 0; i < 4; ++i) out[i] = lie_derivative(a, b[i]) - lie_derivative(b, a[i]);
    return out;
}

std::string GrowthVector::to_string() const
{
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < dims.size(); ++i) os << (i ? "," : "") << dims[i];
    os << ')';
    return os.str();
}

namespace {

// Bracket words grouped by length: level[0] = {Z, W}, level[k] = {[Z, V], [W, V] : V in level[k-1]}.
std::vector<std::vector<PolyVectorField>> bracket_levels(const PfaffianPair& pair, int max_step)
{
    if (max_step < 2) throw std::invalid_argument("growth_vector: max_step must be >= 2");
    const Frame fr = frame(pair);
    std::vector<std::vector<PolyVectorField>> levels;
    levels.push_back({fr.Z, fr.W});
    for (int k = 1; k < max_step; ++k) {
        std::vector<PolyVectorField> next;
        for (const auto& v : levels.back()) {
            for (const auto* gen : {&fr.Z, &fr.W}) {
                PolyVectorField b = lie_bracket(*gen, v);
                if (b.is_zero()) continue;
                const bool dup = std::any_of(next.begin(), next.end(), [&b](const PolyVectorField& o) {
                    return o == b || o == Poly(-1) * b;
                });
                if (!dup) next.push_back(std::move(b));
            }
        }
        levels.push_back(std::move(next));
    }
    return levels;
}

// Incremental exact row reduction over Q for vectors of length 4.
class ExactSpan {
public:
    int rank() const { return static_cast<int>(rows_.size()); }

    void add(std::array<Rational, 4> v)
    {
        for (const auto& [pivot, row] : rows_) {
            if (v[pivot] == 0) continue;
            const Rational factor = v[pivot] / row[pivot];
            for (std::size_t j = 0; j < 4; ++j) v[j] -= factor * row[j];
        }
        for (std::size_t j = 0; j < 4; ++j) {
            if (v[j] != 0) {
                rows_.emplace_back(j, v);
                return;
            }
        }
    }

private:
    std::vector<std::pair<std::size_t, std::array<Rational, 4>>> rows_;
};

int numeric_rank(const std::vector<std::array<double, 4>>& vecs, double rank_tol)
{
    if (vecs.empty()) return 0;
    Eigen::MatrixXd m(4, static_cast<Eigen::Index>(vecs.size()));
    for (std::size_t c = 0; c < vecs.size(); ++c)
        for (std::size_t r = 0; r < 4; ++r) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = vecs[c][r];
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const auto& s = svd.singularValues();
    if (s.size() == 0 || s(0) == 0.0) return 0;
    int rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > rank_tol * s(0)) ++rank;
    return rank;
}

void finish(GrowthVector& gv, int dim)
{
    gv.dims.push_back(dim);
    if (dim == 4) gv.bracket_generating = true;
}

}  // namespace

GrowthVector growth_vector(const PfaffianPair& pair, const RationalPoint& q, int max_step)
{
    const auto levels = bracket_levels(pair, max_step);
    GrowthVector gv;
    ExactSpan span;
    for (const auto& level : levels) {
        for (const auto& v : level) {
            std::array<Rational, 4> val;
            for (std::size_t i = 0; i < 4; ++i) val[i] = v[i].eval(q);
            span.add(std::move(val));
        }
        finish(gv, span.rank());
        if (gv.bracket_generating) break;
    }
    return gv;
}

GrowthVector growth_vector(const PfaffianPair& pair, const Point4& q, int max_step, double rank_tol)
{
    const auto levels = bracket_levels(pair, max_step);
    GrowthVector gv;
    std::vector<std::array<double, 4>> vecs;
    for (const auto& level : levels) {
        for (const auto& v : level) {
            std::array<double, 4> val{};
            for (std::size_t i = 0; i < 4; ++i) val[i] = v[i].eval(q);
            vecs.push_back(val);
        }
        finish(gv, numeric_rank(vecs, rank_tol));
        if (gv.bracket_generating) break;
    }
    return gv;
}

Poly engel_certificate(const PfaffianPair& pair)
{
    const Poly fz = pair.f.diff(Var::Z);
    const Poly gz = pair.g.diff(Var::Z);
    return gz * fz.diff(Var::Z) - fz * gz.diff(Var::Z);
}

SigmaReport sigma_check(const PfaffianPair& pair, const RationalPoint& q)
{
    SigmaReport r;
    r.certificate_value = engel_certificate(pair).eval(q);
    r.certificate_says_engel = r.certificate_value != 0;
    r.growth = growth_vector(pair, q, 4);
    r.is_engel_by_growth = r.growth.dims == std::vector<int>{2, 3, 4};
    return r;
}

// Catalog -------------------------------------------------------------------

Model catalog_model(ModelId id)
{
    const Poly z = Poly::variable(Var::Z);
    const Poly w = Poly::variable(Var::W);
    Model m;
    m.id = id;
    m.name = model_name(id);
    switch (id) {
    case ModelId::EngelStd:
        m.pair = {z, Rational(1, 2) * z * z};
        break;
    case ModelId::D224:
        m.pair = {z * z, z * w};
        break;
    case ModelId::D2334A:
        m.pair = {z, z * z * w};
        break;
    case ModelId::D2334B:
        m.pair = {z, Rational(1, 3) * z * z * z + z * w * w};
        break;
    case ModelId::User:
        throw std::invalid_argument("catalog_model: USER models are loaded from file");
    }
    return m;
}

const std::vector<ModelId>& catalog_ids()
{
    static const std::vector<ModelId> ids{ModelId::EngelStd, ModelId::D224, ModelId::D2334A, ModelId::D2334B};
    return ids;
}

const std::vector<ModelId>& degenerate_ids()
{
    static const std::vector<ModelId> ids{ModelId::D224, ModelId::D2334A, ModelId::D2334B};
    return ids;
}

std::string model_name(ModelId id)
{
    switch (id) {
    case ModelId::EngelStd: return "engel_std";
    case ModelId::D224: return "d224";
    case ModelId::D2334A: return "d2334a";
    case ModelId::D2334B: return "d2334b";
    case ModelId::User: return "user";
    }
    return "user";
}

std::optional<ModelId> parse_model_id(const std::string& name)
{
    std::string lower = name;
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    for (ModelId id : catalog_ids())
        if (model_name(id) == lower) return id;
    return std::nullopt;
}

RationalPoint to_rational(const Point4& q)
{
    RationalPoint r;
    for (std::size_t i = 0; i < 4; ++i) r[i] = Rational(q[i]);
    return r;
}

Rational parse_rational(const std::string& text)
{
    std::string s = text;
    s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }), s.end());
    if (s.empty()) throw std::invalid_argument("empty rational");
    const auto slash = s.find('/');
    if (slash != std::string::npos) {
        Rational r;
        if (r.set_str(s, 10) != 0) throw std::invalid_argument("bad rational: " + text);
        if (r.get_den() == 0) throw std::invalid_argument("zero denominator: " + text);
        r.canonicalize();
        return r;
    }
    // Decimal: split at the point and build n / 10^k exactly.
    bool neg = false;
    std::size_t pos = 0;
    if (s[0] == '+' || s[0] == '-') {
        neg = s[0] == '-';
        pos = 1;
    }
    std::string digits;
    long frac_digits = 0;
    bool seen_point = false;
    for (; pos < s.size(); ++pos) {
        const char c = s[pos];
        if (c == '.' && !seen_point) {
            seen_point = true;
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            digits.push_back(c);
            if (seen_point) ++frac_digits;
        } else if (c == 'e' || c == 'E') {
            break;
        } else {
            throw std::invalid_argument("bad number: " + text);
        }
    }
    if (digits.empty()) throw std::invalid_argument("bad number: " + text);
    long exp10 = -frac_digits;
    if (pos < s.size()) exp10 += std::stol(s.substr(pos + 1));
    mpz_class num(digits, 10);
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(exp10 < 0 ? -exp10 : exp10));
    Rational r = exp10 < 0 ? Rational(num, scale) : Rational(num * scale);
    r.canonicalize();
    return neg ? Rational(-r) : r;
}

}  // namespace engel
