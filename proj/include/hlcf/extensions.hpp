#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hlcf/kgroup.hpp"
#include "hlcf/tower.hpp"

namespace hlcf {

enum class ExtKind { Kummer, ArtinSchreier };
enum class Ramification { Unramified, Tame, Wild, Ferocious };
std::string to_string(ExtKind k);
std::string to_string(Ramification r);

namespace detail {
struct ExtData;
}

class CyclicExt;

/// Element of L = K[y]/(f) as c_0 + c_1 y + ... + c_{ell-1} y^{ell-1}.
class LElement {
public:
    LElement(std::shared_ptr<const detail::ExtData> ext, std::vector<Elem> coeffs);

    const std::vector<Elem>& coeffs() const { return c_; }
    int degree() const { return static_cast<int>(c_.size()); }

    LElement operator+(const LElement& o) const;
    LElement operator-(const LElement& o) const;
    LElement operator-() const;
    LElement operator*(const LElement& o) const;
    LElement operator*(const Elem& x) const;
    /// Via the norm: z^{-1} = prod_{k>0} sigma^k(z) / N(z).
    LElement inverse() const;
    LElement pow(long long e) const;
    /// sigma^k.
    LElement sigma(int k = 1) const;
    /// The element as a member of K when every y-coefficient vanishes.
    std::optional<Elem> in_base() const;
    bool agrees_with(const LElement& o) const;
    bool is_exact_zero() const;
    std::string to_string() const;

    const detail::ExtData& ext() const { return *ext_; }

private:
    void check(const LElement& o) const;
    std::shared_ptr<const detail::ExtData> ext_;
    std::vector<Elem> c_;
};

/// prod_{k < ell} sigma^k(z), coerced into K. DomainError on zero input or if
/// the y-coefficients of the product do not vanish.
Elem field_norm(const LElement& z);

/// Residue-field data of L/K.
struct ResidueData {
    std::string field;                 ///< description of F_L
    LElement pi_L;                     ///< a prime element of L
    std::optional<LElement> h;         ///< ferocious: h with F_L = F(h-bar)
    std::optional<Elem> residue_norm;  ///< ferocious: N_{F_L/F}(h-bar) = h-bar^p, in F
};

/// A cyclic extension L/K of prime degree ell over the top level of a tower,
/// given by X^ell = a (Kummer, ell | q - 1) or X^p - X = a (Artin-Schreier).
class CyclicExt {
public:
    /// Reduces a, classifies the ramification and computes pi_L, a_sigma, b
    /// and the break. DomainError for trivial extensions or unsupported ell.
    static CyclicExt classify(ExtKind kind, const Elem& a, int ell);

    /// Canonical representative of a modulo (F-1)K (Artin-Schreier) or K^{*ell} (Kummer).
    static Elem reduce(ExtKind kind, const Elem& a, int ell);

    ExtKind kind() const;
    const Tower& tower() const;
    int level() const;
    int ell() const;
    const Elem& a() const;
    const Elem& original() const;
    Ramification ramification() const;
    /// Ramification index and residue degree (inseparable degree counted for ferocious).
    int e() const;
    int f() const;
    /// Break i = v_K(b) for wild and ferocious extensions, 0 otherwise.
    int break_index() const;
    /// Conductor exponent: 0 unramified, 1 tame, i + 1 wild or ferocious.
    int conductor() const;
    /// Kummer root of unity with sigma(y) = zeta y.
    std::optional<FFElem> zeta() const;

    LElement y() const;
    LElement lift(const Elem& x) const;
    LElement pi_L() const;
    /// sigma(pi_L)/pi_L - 1, or sigma(h)/h - 1 when ferocious.
    LElement a_sigma() const;
    /// N_{L/K}(a_sigma); absent when a_sigma = 0 (unramified).
    std::optional<Elem> b() const;
    ResidueData residue_data() const;
    std::string describe() const;

    std::shared_ptr<const detail::ExtData> data() const { return d_; }

private:
    explicit CyclicExt(std::shared_ptr<const detail::ExtData> d) : d_(std::move(d)) {}
    std::shared_ptr<const detail::ExtData> d_;
};

struct NormCongruenceReport {
    int samples = 0;
    int passed = 0;
    std::vector<std::string> failures;
};
/// N(1 + x a_sigma) = 1 + (x^p - x) b mod U_{i+1} for each integral x.
NormCongruenceReport norm_congruence_check(const CyclicExt& ext, const std::vector<Elem>& xs);
bool norm_congruence_holds(const CyclicExt& ext, const Elem& x);

/// A symbol over L: entries are elements of K or of L.
using LEntry = std::variant<Elem, LElement>;
struct LSymbolTerm {
    long long coeff = 1;
    std::vector<LEntry> entries;
};

/// N_{L/K} on K_n(L)/ell via the projection formula
/// N{z, x_2, ..., x_n} = {N(z), x_2, ..., x_n}. A symbol with two entries from
/// L is accepted in the form {1 + pi_L^m x, pi_L, ...} with x in K and
/// gcd(m, ell) = 1; anything else raises DomainError.
KClass k_norm(const std::vector<LSymbolTerm>& eta, const CyclicExt& ext);

}  // namespace hlcf
