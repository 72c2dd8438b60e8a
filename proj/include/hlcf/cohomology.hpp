#pragma once

#include <string>
#include <vector>

#include "hlcf/kgroup.hpp"
#include "hlcf/tower.hpp"

namespace hlcf {

/// An element of (1/ell)Z/Z stored as num / ell with 0 <= num < ell.
struct InvValue {
    int num = 0;
    int ell = 1;

    static InvValue make(long long num, int ell);
    bool is_zero() const { return num == 0; }
    InvValue operator+(const InvValue& o) const;
    InvValue operator-() const;
    friend bool operator==(const InvValue& a, const InvValue& b) { return a.num == b.num && a.ell == b.ell; }
    friend bool operator!=(const InvValue& a, const InvValue& b) { return !(a == b); }
    /// "num/ell".
    std::string to_string() const;
};

/// coeff * (w (x) b_1 (x) ... (x) b_{q-1}).
struct CohTerm {
    long long coeff = 1;
    Elem w;
    std::vector<Elem> bs;
};

/// A class in H^q of a tower level with coefficients Z/ell.
///
/// ell = p: formal sums of w (x) b_1 (x) ... (x) b_{q-1} in
/// k (x) (k^*)^{(x)(q-1)} / J with w in k = W_1(k).
///
/// ell != p (ell | q - 1): the Kummer symbol {w, b_1, ..., b_{q-1}}, the twist
/// being trivialized by the fixed primitive root of F_q.
class CohClass {
public:
    CohClass(const Tower& tw, int level, int degree, int ell);

    const Tower& tower() const { return *tower_; }
    int level() const { return level_; }
    int degree() const { return degree_; }
    int ell() const { return ell_; }
    bool is_p_part() const { return ell_ == tower_->p(); }
    const std::vector<CohTerm>& terms() const { return terms_; }

    /// Entries are lifted to the class level; DomainError on a zero unit.
    void add_term(long long coeff, const Elem& w, std::vector<Elem> bs);
    CohClass operator+(const CohClass& o) const;
    CohClass operator-(const CohClass& o) const;
    CohClass times(long long k) const;

    std::string to_string() const;

private:
    const Tower* tower_;
    int level_;
    int degree_;
    int ell_;
    std::vector<CohTerm> terms_;
};

/// The class of w (x) b_1 (x) ... (x) b_{q-1}, at the highest level among the inputs.
CohClass make_class(const Elem& w, std::vector<Elem> bs, int ell);

/// The canonical lift i_F^K from level L to level L + 1.
CohClass lift_class(const CohClass& xi);

/// i(a, b) = i_F^K(a) + i_F^K(b) cup pi for a in H^q(F), b in H^{q-1}(F).
CohClass kato_i(const CohClass& a, const CohClass& b, const Elem& pi);

/// inv on H^{d+1} of the level-d field.
/// p-part: (1/p) Tr res(w dlog b_1 ^ ... ^ dlog b_d), residues iterated over all levels.
/// Tame part: the coefficient of {g, t_1, ..., t_d} in K_{d+1}/ell, g the
/// fixed primitive root of F_q.
InvValue inv(const CohClass& xi);

/// Conductor exponent of a degree-1 class: 0 unramified (or trivial), 1 tame,
/// i + 1 for an Artin-Schreier character of break i.
int conductor(const CohClass& chi);

/// inv(chi cup xi) for chi of degree 1 and xi in K_d/ell of the level-d field.
/// FiltrationError when M is below the conductor of chi.
InvValue cup_pair(const CohClass& chi, const KClass& xi, int M);

}  // namespace hlcf
