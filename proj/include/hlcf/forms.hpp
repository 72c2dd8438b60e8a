#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hlcf/tower.hpp"

namespace hlcf {

/// The p-base t_1, ..., t_r of the tower level F = F_q((t_1))...((t_r)), r >= 0.
class PBase {
public:
    PBase(const Tower& tw, int level);

    const Tower& tower() const { return *tower_; }
    int level() const { return level_; }
    int size() const { return level_; }
    std::vector<Elem> elems() const;
    /// log_p |F : F^p|.
    int degree_of_imperfection() const { return level_; }

private:
    const Tower* tower_;
    int level_;
};

/// A q-form sum_T x_T dlog t_{T_1} ^ ... ^ dlog t_{T_q} over a tower level.
/// T is a subset of the p-base stored as a bitmask (bit k-1 for t_k); the
/// wedge order is increasing k. Exact-zero coefficients are dropped.
class DiffForm {
public:
    using Mask = std::uint32_t;

    DiffForm(const Tower& tw, int level, int degree);
    static DiffForm function(const Elem& x);
    /// x dlog t_{i_1} ^ ... ^ dlog t_{i_q} for any order of the indices.
    static DiffForm monomial(const Elem& x, const std::vector<int>& indices);

    const Tower& tower() const { return *tower_; }
    int level() const { return level_; }
    int degree() const { return degree_; }
    const std::map<Mask, Elem>& terms() const { return terms_; }
    /// Coefficient of the monomial `mask` (zero if absent).
    Elem coeff(Mask mask) const;
    bool is_zero() const { return terms_.empty(); }

    DiffForm operator+(const DiffForm& o) const;
    DiffForm operator-(const DiffForm& o) const;
    DiffForm operator-() const;
    /// Multiply every coefficient by a function.
    DiffForm operator*(const Elem& x) const;
    DiffForm wedge(const DiffForm& o) const;

    bool agrees_with(const DiffForm& o) const;
    std::string to_string() const;

private:
    void add_term(Mask mask, const Elem& x);
    void check_same(const DiffForm& o) const;

    const Tower* tower_;
    int level_;
    int degree_;
    std::map<Mask, Elem> terms_;
};

/// Sign of dlog t_a ^ dlog t_B relative to the sorted order, or 0 if a in B.
int wedge_sign(DiffForm::Mask a, DiffForm::Mask b);

DiffForm dlog(const Elem& y);
DiffForm d(const Elem& x);
DiffForm d(const DiffForm& w);
/// x dlog y_1 ^ ... ^ dlog y_q -> x^p dlog y_1 ^ ... ^ dlog y_q.
DiffForm inverse_cartier(const DiffForm& w);

/// Iterated constant coefficient of a top-degree form x dlog t_1 ^ ... ^ dlog t_r.
FFElem residue(const DiffForm& w);

/// Class of a top-degree form in Omega^r / ((F-1)Omega^r + d Omega^{r-1}),
/// as Tr(residue) in Z/p.
int quotient_reduce(const DiffForm& w);

/// Some y with y^p - y = x, solved one coefficient at a time from the lowest
/// exponent upward; nullopt if x is not in (F-1)F.
std::optional<Elem> solve_artin_schreier(const Elem& x);

/// Canonical representative of w modulo closed forms: monomials whose
/// exponents are all divisible by p are dropped, and for every other exponent
/// vector E the dlog t_k with k the outermost index with p not dividing E_k is
/// eliminated using exact forms. Unknown tails are left untouched.
DiffForm reduce_mod_closed(const DiffForm& w);

/// w lies in (F-1)Omega^q.
bool in_frobenius_image(const DiffForm& w);

/// The smallest element of F_q (in packed order) with trace 1.
FFElem trace_one_element(const FiniteField& F);

/// w = (F-1)eta + d xi + rep * dlog t_1 ^ ... ^ dlog t_r with rep = rho(w) * gamma,
/// gamma = trace_one_element. Needs a top-degree w whose coefficient is exact
/// (or, at level 1, known to order >= 1).
struct QuotientDecomposition {
    DiffForm eta;
    std::optional<DiffForm> xi;  ///< absent in degree 0
    FFElem rep;
};
QuotientDecomposition decompose_top_form(const DiffForm& w);

}  // namespace hlcf
