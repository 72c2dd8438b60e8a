#pragma once

#include <climits>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hlcf/finite_field.hpp"

namespace hlcf {

/// User-facing description of K = F_q((t_1))...((t_d)).
struct FieldConfig {
    int p = 2;
    int f = 1;
    FpPoly modulus;                  ///< empty: use the shipped table
    std::vector<std::string> vars;   ///< uniformizer names, innermost first
    std::vector<int> prec;           ///< relative truncation orders M_1..M_d
    std::string gen_name = "z";      ///< name of the generator of F_q in expressions
    int max_d = 2;                   ///< raise to 3 to allow three-level towers
};

/// Validated, interned tower of Laurent series fields. An element of level L
/// lives in F_q((t_1))...((t_L)); level 0 is the constant field F_q, level
/// d() is K itself and level d()-1 is its residue field.
class Tower {
public:
    static const Tower& get(const FieldConfig& cfg);

    const FieldConfig& config() const { return cfg_; }
    const FiniteField& field() const { return *field_; }
    int p() const { return cfg_.p; }
    int d() const { return static_cast<int>(cfg_.vars.size()); }
    /// Relative precision used when inverting at `level` (1-based).
    int prec(int level) const { return cfg_.prec.at(level - 1); }
    const std::string& var(int level) const { return cfg_.vars.at(level - 1); }
    /// Compact description used in reports, e.g. "F_4((t))((u))".
    std::string describe(int level) const;

private:
    explicit Tower(FieldConfig cfg);
    FieldConfig cfg_;
    const FiniteField* field_;
};

/// Element of a truncated iterated Laurent series field, with explicit
/// precision: terms at exponents >= known_to() are unknown. Exact elements
/// carry known_to() == kExact. Level-0 elements are constants of F_q.
class Elem {
public:
    static constexpr int kExact = INT_MAX / 4;

    Elem() = default;
    static Elem zero(const Tower& tw, int level);
    static Elem one(const Tower& tw, int level);
    static Elem constant(const Tower& tw, int level, FFElem c);
    static Elem from_int(const Tower& tw, int level, long long n);
    /// The uniformizer t_k viewed at `level` (k <= level).
    static Elem var(const Tower& tw, int level, int k);
    /// c * prod t_k^{exps[k-1]}, exps innermost first, size == level.
    static Elem monomial(const Tower& tw, FFElem c, const std::vector<int>& exps);
    /// Series at `level` with given coefficients starting at exponent lo.
    static Elem series(const Tower& tw, int level, int lo, std::vector<Elem> coeffs,
                       int known_to = kExact);

    const Tower& tower() const { return *tower_; }
    int level() const { return level_; }
    FFElem constant_value() const { return c_; }  ///< level 0 only
    int lo() const { return lo_; }
    int known_to() const { return known_; }
    const std::vector<Elem>& coeffs() const { return co_; }

    bool is_exact_zero() const;
    /// No known nonzero term but only known to finite precision.
    bool is_indeterminate() const;
    /// Exact at every level.
    bool is_exact() const;
    /// Coefficient of t_level^e; PrecisionError if e >= known_to().
    Elem coeff(int e) const;
    /// Exponent of the first coefficient that is not an exact zero.
    std::optional<int> first_exponent() const;

    Elem operator+(const Elem& o) const;
    Elem operator-(const Elem& o) const;
    Elem operator-() const;
    Elem operator*(const Elem& o) const;
    Elem operator/(const Elem& o) const { return *this * o.inverse(); }
    Elem& operator+=(const Elem& o) { return *this = *this + o; }
    Elem& operator-=(const Elem& o) { return *this = *this - o; }
    Elem& operator*=(const Elem& o) { return *this = *this * o; }
    Elem scale(FFElem c) const;
    Elem inverse() const;
    Elem pow(long long e) const;
    /// Multiply by t_k^n for k <= level.
    Elem shift(int k, int n) const;
    /// Apply x -> x^p coefficientwise together with exponents (the Frobenius).
    Elem frobenius() const;
    Elem truncate(int known_to) const;
    /// Same element viewed one level higher (constant in the new variable).
    Elem lift(int to_level) const;
    /// Partial derivative with respect to t_k (k <= level).
    Elem derivative(int k) const;

    /// Lexicographic valuation, outermost variable first.
    std::vector<int> valuation() const;
    /// Leading coefficient at the outermost level (level-1 element).
    Elem leading_coeff() const;
    /// Leading F_q coefficient through all levels.
    FFElem leading_constant() const;
    /// Iterated coefficient of t_1^0 ... t_level^0.
    FFElem constant_term() const;

    /// Known parts agree on the overlap of both precisions.
    bool agrees_with(const Elem& o) const;
    /// Structural equality of representations (including precision).
    friend bool operator==(const Elem& a, const Elem& b);
    friend bool operator!=(const Elem& a, const Elem& b) { return !(a == b); }

    /// Canonical serialization: terms in increasing exponent order, exponents
    /// listed innermost first, F_q coefficients as little-endian digit lists.
    std::string to_string() const;

private:
    void normalize();
    void check_same(const Elem& o) const;

    const Tower* tower_ = nullptr;
    int level_ = 0;
    FFElem c_{};
    int lo_ = 0;
    int known_ = kExact;
    std::vector<Elem> co_;
};

std::ostream& operator<<(std::ostream& os, const Elem& e);

/// a = t_level^m * lift(c) * w with c the leading coefficient (a unit of the
/// residue field, constant-section lift) and w a principal unit.
struct UnitDecomposition {
    int m = 0;
    Elem residue;  ///< level - 1
    Elem principal;
};

UnitDecomposition unit_decompose(const Elem& a);

/// A single known term c * prod t_k^{exps[k-1]} (exps innermost first).
struct MonomialTerm {
    std::vector<int> exps;
    FFElem coeff;
};

/// Every known nonzero term of a, in increasing lexicographic order (outermost
/// exponent first). Unknown tails are ignored; check is_exact() when needed.
std::vector<MonomialTerm> monomial_terms(const Elem& a);

/// r with r^p == a, when every known exponent is divisible by p at every
/// level; std::nullopt otherwise.
std::optional<Elem> pth_root(const Elem& a);

}  // namespace hlcf
