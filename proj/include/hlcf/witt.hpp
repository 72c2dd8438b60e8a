#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "hlcf/errors.hpp"
#include "hlcf/finite_field.hpp"
#include "hlcf/tower.hpp"

namespace hlcf {

/// Universal Witt polynomials for (p, n), generated over Z by recursion on
/// the Witt polynomials w_k = sum_j p^j X_j^{p^{k-j}} and reduced mod p.
/// Variables 0..n-1 are the first argument, n..2n-1 the second.
struct ModPTerm {
    int coeff;                        ///< in [1, p)
    std::vector<std::uint16_t> exps;  ///< size 2n
};

struct WittPolynomials {
    int p = 0;
    int n = 0;
    std::vector<std::vector<ModPTerm>> sum;   ///< S_0..S_{n-1}
    std::vector<std::vector<ModPTerm>> prod;  ///< P_0..P_{n-1}
    std::vector<std::vector<ModPTerm>> neg;   ///< N_0..N_{n-1} (first argument only)

    /// Built once per (p, n) and cached; safe for concurrent readers.
    static const WittPolynomials& get(int p, int n);
};

namespace witt_detail {

inline FFElem zero_like(const FFElem& x) { return x.field->zero(); }
inline FFElem one_like(const FFElem& x) { return x.field->one(); }
inline FFElem int_like(const FFElem& x, long long k) { return x.field->from_int(k); }
inline int char_of(const FFElem& x) { return x.field->p(); }
inline bool same_parent(const FFElem& a, const FFElem& b) { return a.field == b.field; }

inline Elem zero_like(const Elem& x) { return Elem::zero(x.tower(), x.level()); }
inline Elem one_like(const Elem& x) { return Elem::one(x.tower(), x.level()); }
inline Elem int_like(const Elem& x, long long k) { return Elem::from_int(x.tower(), x.level(), k); }
inline int char_of(const Elem& x) { return x.tower().p(); }
inline bool same_parent(const Elem& a, const Elem& b) {
    return &a.tower() == &b.tower() && a.level() == b.level();
}

template <class T>
T eval(const std::vector<ModPTerm>& poly, const std::vector<std::vector<T>>& powers, const T& like) {
    T acc = zero_like(like);
    for (const auto& term : poly) {
        T m = int_like(like, term.coeff);
        for (std::size_t v = 0; v < term.exps.size(); ++v)
            if (term.exps[v] != 0) m = m * powers[v][term.exps[v]];
        acc = acc + m;
    }
    return acc;
}

}  // namespace witt_detail

/// Witt vector of length n (1 <= n <= 3) over a ring of characteristic p:
/// FFElem for finite fields, Elem for Laurent towers.
template <class T>
class WittVector {
public:
    static constexpr int kMaxLength = 3;

    explicit WittVector(std::vector<T> comps) : comps_(std::move(comps)) {
        if (comps_.empty() || static_cast<int>(comps_.size()) > kMaxLength)
            throw DomainError("Witt vector length must lie in 1..3");
        for (const auto& c : comps_)
            if (!witt_detail::same_parent(c, comps_.front()))
                throw DomainError("Witt components live in different rings");
    }

    static WittVector zero(const T& like, int n) {
        return WittVector(std::vector<T>(n, witt_detail::zero_like(like)));
    }
    static WittVector one(const T& like, int n) {
        auto z = zero(like, n);
        z.comps_[0] = witt_detail::one_like(like);
        return z;
    }
    /// Multiplicative representative (c, 0, ..., 0).
    static WittVector teichmuller(const T& c, int n) {
        auto z = zero(c, n);
        z.comps_[0] = c;
        return z;
    }

    int length() const { return static_cast<int>(comps_.size()); }
    int p() const { return witt_detail::char_of(comps_.front()); }
    const std::vector<T>& comps() const { return comps_; }
    const T& operator[](int i) const { return comps_.at(i); }

    WittVector operator+(const WittVector& o) const {
        check(o);
        const auto& polys = WittPolynomials::get(p(), length());
        return apply(polys.sum, &o);
    }
    WittVector operator*(const WittVector& o) const {
        check(o);
        const auto& polys = WittPolynomials::get(p(), length());
        return apply(polys.prod, &o);
    }
    WittVector operator-() const {
        const auto& polys = WittPolynomials::get(p(), length());
        return apply(polys.neg, nullptr);
    }
    WittVector operator-(const WittVector& o) const { return *this + (-o); }

    /// Componentwise p-th power; this is the Witt Frobenius in characteristic p.
    WittVector frobenius() const {
        std::vector<T> out;
        for (const auto& c : comps_) out.push_back(c.pow(p()));
        return WittVector(std::move(out));
    }
    /// (x_0, ..., x_{n-1}) -> (0, x_0, ..., x_{n-2}).
    WittVector verschiebung() const {
        std::vector<T> out{witt_detail::zero_like(comps_.front())};
        for (int i = 0; i + 1 < length(); ++i) out.push_back(comps_[i]);
        return WittVector(std::move(out));
    }
    /// (F - 1)(x) = F(x) - x.
    WittVector artin_schreier() const { return frobenius() - *this; }

    WittVector times_int(long long k) const {
        WittVector acc = zero(comps_.front(), length());
        WittVector base = *this;
        bool neg = k < 0;
        unsigned long long m = neg ? -static_cast<unsigned long long>(k) : k;
        while (m > 0) {
            if (m & 1) acc = acc + base;
            m >>= 1;
            if (m) base = base + base;
        }
        return neg ? -acc : acc;
    }

    friend bool operator==(const WittVector& a, const WittVector& b) { return a.comps_ == b.comps_; }
    friend bool operator!=(const WittVector& a, const WittVector& b) { return !(a == b); }

private:
    void check(const WittVector& o) const {
        if (o.length() != length()) throw DomainError("Witt vectors of different lengths");
        if (!witt_detail::same_parent(o.comps_.front(), comps_.front()))
            throw DomainError("Witt vectors over different rings");
    }

    WittVector apply(const std::vector<std::vector<ModPTerm>>& polys, const WittVector* other) const {
        const int n = length();
        std::size_t max_exp = 1;
        for (const auto& poly : polys)
            for (const auto& term : poly)
                for (auto e : term.exps) max_exp = std::max<std::size_t>(max_exp, e);
        std::vector<std::vector<T>> powers(2 * n);
        for (int v = 0; v < 2 * n; ++v) {
            const T& base = v < n ? comps_[v] : (other ? other->comps_[v - n] : comps_[0]);
            powers[v].reserve(max_exp + 1);
            powers[v].push_back(witt_detail::one_like(base));
            if (v >= n && !other) continue;
            for (std::size_t e = 1; e <= max_exp; ++e) powers[v].push_back(powers[v].back() * base);
        }
        std::vector<T> out;
        for (int k = 0; k < n; ++k) out.push_back(witt_detail::eval(polys[k], powers, comps_.front()));
        return WittVector(std::move(out));
    }

    std::vector<T> comps_;
};

template <class T>
WittVector<T> witt_add(const WittVector<T>& a, const WittVector<T>& b) { return a + b; }
template <class T>
WittVector<T> witt_mul(const WittVector<T>& a, const WittVector<T>& b) { return a * b; }
template <class T>
WittVector<T> frobenius(const WittVector<T>& a) { return a.frobenius(); }
template <class T>
WittVector<T> verschiebung(const WittVector<T>& a) { return a.verschiebung(); }

/// Every x in W_n(F_{q^e}) with (F - 1)x = w, where F_{q^e} is emb.big().
std::vector<WittVector<FFElem>> asw_solutions(const WittVector<FFElem>& w, const FieldEmbedding& emb);

struct AswSolution {
    WittVector<FFElem> x;
    int e;
    FieldEmbedding embedding;
};

/// Solves (F - 1)x = w over the smallest F_{q^e}, e <= max_deg, by exhaustive
/// search one component at a time. Throws DomainError if no e <= max_deg works.
AswSolution asw_solve(const WittVector<FFElem>& w, int max_deg);

}  // namespace hlcf
