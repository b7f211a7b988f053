#pragma once

// Rank-2 distributions on R^4 presented as Pfaffian pairs
//   theta1 = dx + f dw,  theta2 = dy + g dw,
// with horizontal frame Z = d/dz, W = d/dw - f d/dx - g d/dy.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "engel/polynomial.hpp"

namespace engel {

struct PfaffianPair {
    Poly f;
    Poly g;
};

/// Vector field with polynomial components in the coordinate frame (d/dx, d/dy, d/dz, d/dw).
struct PolyVectorField {
    std::array<Poly, 4> comp;

    const Poly& operator[](std::size_t i) const { return comp[i]; }
    Poly& operator[](std::size_t i) { return comp[i]; }
    bool is_zero() const;

    friend bool operator==(const PolyVectorField& a, const PolyVectorField& b) { return a.comp == b.comp; }
    friend PolyVectorField operator+(const PolyVectorField& a, const PolyVectorField& b);
    friend PolyVectorField operator-(const PolyVectorField& a, const PolyVectorField& b);
    friend PolyVectorField operator*(const Poly& s, const PolyVectorField& v);
};

struct Frame {
    PolyVectorField Z;
    PolyVectorField W;
};

Frame frame(const PfaffianPair& pair);

/// Coordinate Lie bracket [a, b]^i = a^j d_j b^i - b^j d_j a^i.
PolyVectorField lie_bracket(const PolyVectorField& a, const PolyVectorField& b);

/// Lie derivative of a function along a field, a^j d_j p.
Poly lie_derivative(const PolyVectorField& a, const Poly& p);

struct GrowthVector {
    std::vector<int> dims;
    bool bracket_generating = false;

    friend bool operator==(const GrowthVector&, const GrowthVector&) = default;
    std::string to_string() const;
};

inline constexpr double kDefaultRankTol = 1e-9;

/// Bracket flag D ⊂ D^2 ⊂ ... where D^k is spanned by all right-normed
/// bracket words of length <= k in Z, W. Rank is exact over Q at rational points.
GrowthVector growth_vector(const PfaffianPair& pair, const RationalPoint& q, int max_step = 4);
GrowthVector growth_vector(const PfaffianPair& pair, const Point4& q, int max_step = 4,
                           double rank_tol = kDefaultRankTol);

/// E = g_z f_zz - f_z g_zz.
Poly engel_certificate(const PfaffianPair& pair);

struct SigmaReport {
    Rational certificate_value;
    GrowthVector growth;
    bool is_engel_by_growth = false;
    bool certificate_says_engel = false;
    bool disagreement() const { return is_engel_by_growth != certificate_says_engel; }
};

SigmaReport sigma_check(const PfaffianPair& pair, const RationalPoint& q);

// Model catalog -------------------------------------------------------------

enum class ModelId { EngelStd, D224, D2334A, D2334B, User };

struct Model {
    ModelId id = ModelId::User;
    std::string name;
    PfaffianPair pair;
};

/// The four built-in models. ENGEL_STD uses f = z, g = z^2/2.
Model catalog_model(ModelId id);
const std::vector<ModelId>& catalog_ids();
const std::vector<ModelId>& degenerate_ids();
std::string model_name(ModelId id);
/// Accepts engel_std, d224, d2334a, d2334b (case-insensitive).
std::optional<ModelId> parse_model_id(const std::string& name);

RationalPoint to_rational(const Point4& q);
/// Parses "p/q" or decimal strings exactly.
Rational parse_rational(const std::string& s);

}  // namespace engel
