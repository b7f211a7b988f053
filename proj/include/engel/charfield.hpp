#pragma once

// Characteristic (singular-curve) line field C = c Z + e W of an Engel-type
// pair, built three independent ways so they can be compared exactly.

#include <stdexcept>
#include <string>
#include <vector>

#include "engel/distribution.hpp"

namespace engel {

enum class CharVariant {
    Printed,    ///< coefficient formula exactly as published
    Corrected,  ///< published structure with the f, g multipliers restored
    Oracle      ///< from brackets: c = -<lambda,[W,[Z,W]]>, e = <lambda,[Z,[Z,W]]>
};

std::string variant_name(CharVariant v);

struct CharCoefficients {
    Poly c;
    Poly e;
    CharVariant variant = CharVariant::Oracle;
};

/// lambda = lambda1 theta1 + lambda2 theta2 with (lambda1, lambda2) = (g_z, -f_z).
struct CharCovector {
    Poly lambda1;
    Poly lambda2;
};

CharCovector char_covector(const PfaffianPair& pair);

/// <lambda, V> for a field with only d/dx, d/dy components.
Poly pair_with(const CharCovector& lambda, const PolyVectorField& v);

/// Raised by coeffs_oracle when a second bracket has a d/dz or d/dw part.
class StructuralError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

CharCoefficients coeffs_printed(const PfaffianPair& pair);
CharCoefficients coeffs_corrected(const PfaffianPair& pair);
CharCoefficients coeffs_oracle(const PfaffianPair& pair);
CharCoefficients coeffs(const PfaffianPair& pair, CharVariant variant);

/// Coordinate components (-e f, -e g, c, e).
PolyVectorField assemble_field(const PfaffianPair& pair, const CharCoefficients& ce);
PolyVectorField char_field(const PfaffianPair& pair, CharVariant variant = CharVariant::Oracle);

struct VariantComparison {
    CharVariant a;
    CharVariant b;
    bool identical = false;
    /// a - b
    Poly discrepancy_c;
    Poly discrepancy_e;
    /// c_a e_b - e_a c_b; zero when both describe the same line field.
    Poly cross_determinant;
};

struct CrossCheckReport {
    std::vector<VariantComparison> comparisons;  // corrected/oracle, printed/oracle, printed/corrected

    const VariantComparison& find(CharVariant a, CharVariant b) const;
};

CrossCheckReport cross_check(const PfaffianPair& pair);

/// theta1(V) = V^x + f V^w and theta2(V) = V^y + g V^w.
Poly theta1(const PfaffianPair& pair, const PolyVectorField& v);
Poly theta2(const PfaffianPair& pair, const PolyVectorField& v);

}  // namespace engel
