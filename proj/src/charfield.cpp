#include "engel/charfield.hpp"

namespace engel {

std::string variant_name(CharVariant v)
{
    switch (v) {
    case CharVariant::Printed: return "printed";
    case CharVariant::Corrected: return "corrected";
    case CharVariant::Oracle: return "oracle";
    }
    return "?";
}

namespace {

// First and second partials used by the coefficient formulas.
struct Partials {
    Poly f, g;
    Poly fx, fy, fz, gx, gy, gz;
    Poly fzz, fzw, fzx, fzy, gzz, gzw, gzx, gzy;

    explicit Partials(const PfaffianPair& p) : f(p.f), g(p.g)
    {
        fx = f.diff(Var::X);
        fy = f.diff(Var::Y);
        fz = f.diff(Var::Z);
        gx = g.diff(Var::X);
        gy = g.diff(Var::Y);
        gz = g.diff(Var::Z);
        fzz = fz.diff(Var::Z);
        fzw = fz.diff(Var::W);
        fzx = fz.diff(Var::X);
        fzy = fz.diff(Var::Y);
        gzz = gz.diff(Var::Z);
        gzw = gz.diff(Var::W);
        gzx = gz.diff(Var::X);
        gzy = gz.diff(Var::Y);
    }

    Poly e() const { return fz * gzz - gz * fzz; }
};

}  // namespace

CharCovector char_covector(const PfaffianPair& pair)
{
    return {pair.g.diff(Var::Z), -pair.f.diff(Var::Z)};
}

Poly pair_with(const CharCovector& lambda, const PolyVectorField& v)
{
    return lambda.lambda1 * v[0] + lambda.lambda2 * v[1];
}

CharCoefficients coeffs_printed(const PfaffianPair& pair)
{
    const Partials d(pair);
    const Poly k = d.fzw - d.fzy - d.fzx + d.gz * d.fy - d.fz * d.gy + d.fz * d.fx;
    const Poly h = d.gzy - d.gzw + d.gzx - d.fz * d.gx;
    return {d.gz * k + d.fz * h, d.e(), CharVariant::Printed};
}

CharCoefficients coeffs_corrected(const PfaffianPair& pair)
{
    const Partials d(pair);
    const Poly k = d.fzw - d.f * d.fzx - d.g * d.fzy + d.gz * d.fy - d.fz * d.gy + d.fz * d.fx;
    const Poly h = d.g * d.gzy - d.gzw + d.f * d.gzx - d.fz * d.gx;
    return {d.gz * k + d.fz * h, d.e(), CharVariant::Corrected};
}

CharCoefficients coeffs_oracle(const PfaffianPair& pair)
{
    const Frame fr = frame(pair);
    const PolyVectorField zw = lie_bracket(fr.Z, fr.W);
    const PolyVectorField z_zw = lie_bracket(fr.Z, zw);
    const PolyVectorField w_zw = lie_bracket(fr.W, zw);
    for (const auto* v : {&zw, &z_zw, &w_zw}) {
        if (!(*v)[2].is_zero() || !(*v)[3].is_zero())
            throw StructuralError("coeffs_oracle: bracket has a d/dz or d/dw component");
    }
    const CharCovector lambda = char_covector(pair);
    return {-pair_with(lambda, w_zw), pair_with(lambda, z_zw), CharVariant::Oracle};
}

CharCoefficients coeffs(const PfaffianPair& pair, CharVariant variant)
{
    switch (variant) {
    case CharVariant::Printed: return coeffs_printed(pair);
    case CharVariant::Corrected: return coeffs_corrected(pair);
    case CharVariant::Oracle: return coeffs_oracle(pair);
    }
    return coeffs_oracle(pair);
}

PolyVectorField assemble_field(const PfaffianPair& pair, const CharCoefficients& ce)
{
    PolyVectorField v;
    v[0] = -(ce.e * pair.f);
    v[1] = -(ce.e * pair.g);
    v[2] = ce.c;
    v[3] = ce.e;
    return v;
}

PolyVectorField char_field(const PfaffianPair& pair, CharVariant variant)
{
    return assemble_field(pair, coeffs(pair, variant));
}

const VariantComparison& CrossCheckReport::find(CharVariant a, CharVariant b) const
{
    for (const auto& c : comparisons)
        if (c.a == a && c.b == b) return c;
    throw std::out_of_range("CrossCheckReport::find: comparison not present");
}

CrossCheckReport cross_check(const PfaffianPair& pair)
{
    const CharCoefficients printed = coeffs_printed(pair);
    const CharCoefficients corrected = coeffs_corrected(pair);
    const CharCoefficients oracle = coeffs_oracle(pair);
    auto compare = [](const CharCoefficients& a, const CharCoefficients& b) {
        VariantComparison v;
        v.a = a.variant;
        v.b = b.variant;
        v.discrepancy_c = a.c - b.c;
        v.discrepancy_e = a.e - b.e;
        v.identical = v.discrepancy_c.is_zero() && v.discrepancy_e.is_zero();
        v.cross_determinant = a.c * b.e - a.e * b.c;
        return v;
    };
    CrossCheckReport r;
    r.comparisons.push_back(compare(corrected, oracle));
    r.comparisons.push_back(compare(printed, oracle));
    r.comparisons.push_back(compare(printed, corrected));
    return r;
}

Poly theta1(const PfaffianPair& pair, const PolyVectorField& v) { return v[0] + pair.f * v[3]; }
Poly theta2(const PfaffianPair& pair, const PolyVectorField& v) { return v[1] + pair.g * v[3]; }

}  // namespace engel
