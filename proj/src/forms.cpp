#include "hlcf/forms.hpp"

#include <bit>
#include <cstdlib>
#include <sstream>

#include "hlcf/errors.hpp"

namespace hlcf {

namespace {

DiffForm::Mask full_mask(int level) { return level == 0 ? 0u : ((1u << level) - 1u); }

// t_k * d/dt_k
Elem euler(const Elem& x, int k) { return x.derivative(k).shift(k, 1); }

std::optional<FFElem> solve_constant(const FiniteField& F, FFElem c) {
    for (FFElem y : F.elements())
        if (y.pow(F.p()) - y == c) return y;
    return std::nullopt;
}

int floor_div(int a, int b) {
    int q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

}  // namespace

// ---------------------------------------------------------------- PBase

PBase::PBase(const Tower& tw, int level) : tower_(&tw), level_(level) {
    if (level < 0 || level > tw.d()) throw DomainError("p-base level out of range");
}

std::vector<Elem> PBase::elems() const {
    std::vector<Elem> out;
    for (int k = 1; k <= level_; ++k) out.push_back(Elem::var(*tower_, level_, k));
    return out;
}

// ---------------------------------------------------------------- DiffForm

int wedge_sign(DiffForm::Mask a, DiffForm::Mask b) {
    if (a & b) return 0;
    int inversions = 0;
    for (DiffForm::Mask x = a; x; x &= x - 1) {
        const DiffForm::Mask low = (x & (~x + 1)) - 1;
        inversions += std::popcount(b & low);
    }
    return inversions % 2 ? -1 : 1;
}

DiffForm::DiffForm(const Tower& tw, int level, int degree) : tower_(&tw), level_(level), degree_(degree) {
    if (level < 0 || level > tw.d()) throw DomainError("form level out of range");
    if (degree < 0) throw DomainError("negative form degree");
}

DiffForm DiffForm::function(const Elem& x) {
    DiffForm w(x.tower(), x.level(), 0);
    w.add_term(0, x);
    return w;
}

DiffForm DiffForm::monomial(const Elem& x, const std::vector<int>& indices) {
    DiffForm w(x.tower(), x.level(), static_cast<int>(indices.size()));
    Mask mask = 0;
    int sign = 1;
    for (auto it = indices.rbegin(); it != indices.rend(); ++it) {
        const int k = *it;
        if (k < 1 || k > x.level()) throw DomainError("dlog index outside the p-base");
        const Mask bit = 1u << (k - 1);
        const int s = wedge_sign(bit, mask);
        if (s == 0) return w;
        sign *= s;
        mask |= bit;
    }
    w.add_term(mask, sign > 0 ? x : -x);
    return w;
}

Elem DiffForm::coeff(Mask mask) const {
    auto it = terms_.find(mask);
    return it == terms_.end() ? Elem::zero(*tower_, level_) : it->second;
}

void DiffForm::add_term(Mask mask, const Elem& x) {
    if (std::popcount(mask) != degree_) throw DomainError("monomial degree mismatch");
    if (x.is_exact_zero()) return;
    auto it = terms_.find(mask);
    if (it == terms_.end()) {
        terms_.emplace(mask, x);
        return;
    }
    it->second += x;
    if (it->second.is_exact_zero()) terms_.erase(it);
}

void DiffForm::check_same(const DiffForm& o) const {
    if (tower_ != o.tower_ || level_ != o.level_ || degree_ != o.degree_)
        throw DomainError("forms live in different groups");
}

DiffForm DiffForm::operator+(const DiffForm& o) const {
    check_same(o);
    DiffForm r = *this;
    for (const auto& [m, x] : o.terms_) r.add_term(m, x);
    return r;
}

DiffForm DiffForm::operator-() const {
    DiffForm r = *this;
    for (auto& [m, x] : r.terms_) x = -x;
    return r;
}

DiffForm DiffForm::operator-(const DiffForm& o) const { return *this + (-o); }

DiffForm DiffForm::operator*(const Elem& x) const {
    if (&x.tower() != tower_ || x.level() != level_) throw DomainError("function lives in a different field");
    DiffForm r(*tower_, level_, degree_);
    for (const auto& [m, c] : terms_) r.add_term(m, c * x);
    return r;
}

DiffForm DiffForm::wedge(const DiffForm& o) const {
    if (tower_ != o.tower_ || level_ != o.level_) throw DomainError("forms live in different fields");
    DiffForm r(*tower_, level_, degree_ + o.degree_);
    for (const auto& [ma, xa] : terms_)
        for (const auto& [mb, xb] : o.terms_) {
            const int s = wedge_sign(ma, mb);
            if (s == 0) continue;
            const Elem prod = xa * xb;
            r.add_term(ma | mb, s > 0 ? prod : -prod);
        }
    return r;
}

bool DiffForm::agrees_with(const DiffForm& o) const {
    check_same(o);
    for (const auto& [m, x] : terms_)
        if (!x.agrees_with(o.coeff(m))) return false;
    for (const auto& [m, x] : o.terms_)
        if (!terms_.count(m) && !x.agrees_with(Elem::zero(*tower_, level_))) return false;
    return true;
}

std::string DiffForm::to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [m, x] : terms_) {
        if (!first) os << " + ";
        first = false;
        os << '(' << x.to_string() << ')';
        for (int k = 1; k <= level_; ++k)
            if (m & (1u << (k - 1))) os << " dlog " << tower_->var(k);
    }
    return os.str();
}

// ---------------------------------------------------------------- operators

DiffForm dlog(const Elem& y) {
    if (y.is_exact_zero()) throw DomainError("dlog of zero");
    DiffForm w(y.tower(), y.level(), 1);
    if (y.level() == 0) return w;
    const Elem yinv = y.inverse();
    for (int k = 1; k <= y.level(); ++k) w = w + DiffForm::monomial(euler(y, k) * yinv, {k});
    return w;
}

DiffForm d(const Elem& x) {
    DiffForm w(x.tower(), x.level(), 1);
    for (int k = 1; k <= x.level(); ++k) w = w + DiffForm::monomial(euler(x, k), {k});
    return w;
}

DiffForm d(const DiffForm& w) {
    DiffForm r(w.tower(), w.level(), w.degree() + 1);
    for (const auto& [m, x] : w.terms()) {
        std::vector<int> idx;
        for (int k = 1; k <= w.level(); ++k)
            if (m & (1u << (k - 1))) idx.push_back(k);
        r = r + d(x).wedge(DiffForm::monomial(Elem::one(w.tower(), w.level()), idx));
    }
    return r;
}

DiffForm inverse_cartier(const DiffForm& w) {
    DiffForm r(w.tower(), w.level(), w.degree());
    for (const auto& [m, x] : w.terms()) {
        std::vector<int> idx;
        for (int k = 1; k <= w.level(); ++k)
            if (m & (1u << (k - 1))) idx.push_back(k);
        r = r + DiffForm::monomial(x.frobenius(), idx);
    }
    return r;
}

FFElem residue(const DiffForm& w) {
    if (w.degree() != w.level()) throw DomainError("residue needs a top-degree form");
    return w.coeff(full_mask(w.level())).constant_term();
}

int quotient_reduce(const DiffForm& w) {
    if (w.degree() != w.level()) throw DomainError("quotient_reduce needs a form of top degree");
    return w.tower().field().trace(residue(w));
}

std::optional<Elem> solve_artin_schreier(const Elem& x) {
    const Tower& tw = x.tower();
    const int p = tw.p();
    if (x.level() == 0) {
        auto y = solve_constant(tw.field(), x.constant_value());
        if (!y) return std::nullopt;
        return Elem::constant(tw, 0, *y);
    }
    const int L = x.level();
    const Elem zero = Elem::zero(tw, L - 1);
    const int lo = std::min(x.first_exponent().value_or(0), 0);
    std::map<int, Elem> y;
    auto y_at = [&](int e) {
        auto it = y.find(e);
        return it == y.end() ? zero : it->second;
    };

    // Negative exponents: y_j^p sits at p*j, so y_j = (x_{pj} + y_{pj})^{1/p}.
    for (int j = floor_div(lo, p); j < 0; ++j) {
        const int pj = p * j;
        Elem v = (pj >= lo ? x.coeff(pj) : zero) + y_at(pj);
        if (v.is_exact_zero()) continue;
        auto r = pth_root(v);
        if (!r) return std::nullopt;
        y[j] = *r;
    }
    for (int e = lo; e < 0; ++e) {
        Elem lhs = (e % p == 0 ? y_at(e / p).frobenius() : zero) - y_at(e);
        if (!lhs.agrees_with(x.coeff(e))) return std::nullopt;
    }

    auto y0 = solve_artin_schreier(x.coeff(0));
    if (!y0) return std::nullopt;
    y[0] = *y0;

    const int hi = x.first_exponent() ? x.lo() + static_cast<int>(x.coeffs().size()) : 0;
    const bool exact = x.known_to() >= Elem::kExact && hi <= 1 && y0->is_exact();
    const int known = x.known_to() < Elem::kExact ? x.known_to() : std::max(hi, 1) + tw.prec(L);
    if (!exact)
        for (int e = 1; e < known; ++e) y[e] = (e % p == 0 ? y_at(e / p).frobenius() : zero) - x.coeff(e);

    const int first = y.begin()->first;
    const int last = y.rbegin()->first;
    std::vector<Elem> coeffs;
    for (int e = first; e <= last; ++e) coeffs.push_back(y_at(e));
    return Elem::series(tw, L, first, std::move(coeffs), exact ? Elem::kExact : known);
}

DiffForm reduce_mod_closed(const DiffForm& w) {
    const Tower& tw = w.tower();
    const FiniteField& F = tw.field();
    const int r = w.level();
    const int p = tw.p();
    DiffForm out(tw, r, w.degree());
    for (const auto& [mask, x] : w.terms()) {
        std::vector<int> idx;
        for (int j = 1; j <= r; ++j)
            if (mask & (1u << (j - 1))) idx.push_back(j);
        Elem known = Elem::zero(tw, r);
        for (const auto& t : monomial_terms(x)) {
            Elem mono = Elem::monomial(tw, t.coeff, t.exps);
            known = known + mono;
            int pivot = 0;
            for (int k = r; k >= 1; --k)
                if (((t.exps[k - 1] % p) + p) % p != 0) {
                    pivot = k;
                    break;
                }
            if (pivot == 0) continue;
            const DiffForm::Mask pbit = 1u << (pivot - 1);
            if (!(mask & pbit)) {
                out = out + DiffForm::monomial(mono, idx);
                continue;
            }
            // t^E dlog t_T = s dlog t_k* ^ dlog t_T' = -(s/E_k*) sum_k E_k t^E dlog t_k ^ dlog t_T' mod exact
            const DiffForm::Mask rest = mask & ~pbit;
            const int s = wedge_sign(pbit, rest);
            const FFElem inv = F.from_int(t.exps[pivot - 1]).inverse();
            for (int k = 1; k <= r; ++k) {
                const DiffForm::Mask kb = 1u << (k - 1);
                if ((rest & kb) || k == pivot || t.exps[k - 1] % p == 0) continue;
                const FFElem c = F.from_int(-s * wedge_sign(kb, rest)) * F.from_int(t.exps[k - 1]) * inv * t.coeff;
                std::vector<int> kidx;
                for (int j = 1; j <= r; ++j)
                    if ((rest | kb) & (1u << (j - 1))) kidx.push_back(j);
                out = out + DiffForm::monomial(Elem::monomial(tw, c, t.exps), kidx);
            }
        }
        Elem tail = x - known;
        if (!tail.is_exact_zero()) out = out + DiffForm::monomial(tail, idx);
    }
    return out;
}

bool in_frobenius_image(const DiffForm& w) {
    for (const auto& [m, x] : w.terms())
        if (!solve_artin_schreier(x)) return false;
    return true;
}

FFElem trace_one_element(const FiniteField& F) {
    for (FFElem c : F.elements())
        if (F.trace(c) == 1) return c;
    throw DomainError("no element of trace one");
}

QuotientDecomposition decompose_top_form(const DiffForm& w) {
    const Tower& tw = w.tower();
    const FiniteField& F = tw.field();
    const int r = w.level();
    if (w.degree() != r) throw DomainError("decomposition needs a top-degree form");
    const DiffForm::Mask top = full_mask(r);
    const Elem x = w.coeff(top);
    if (!x.is_exact() && !(r == 1 && x.known_to() >= 1))
        throw PrecisionError("decomposition needs an exact coefficient");

    std::vector<int> all_idx;
    for (int k = 1; k <= r; ++k) all_idx.push_back(k);

    std::map<std::vector<int>, FFElem> work;
    for (const auto& t : monomial_terms(x)) {
        auto [it, fresh] = work.emplace(t.exps, t.coeff);
        if (!fresh) it->second = it->second + t.coeff;
    }

    DiffForm eta(tw, r, r);
    std::optional<DiffForm> xi;
    if (r > 0) xi = DiffForm(tw, r, r - 1);
    FFElem constant = F.zero();

    auto norm = [](const std::vector<int>& e) {
        int n = 0;
        for (int v : e) n = std::max(n, std::abs(v));
        return n;
    };

    while (!work.empty()) {
        auto pick = work.begin();
        for (auto it = work.begin(); it != work.end(); ++it)
            if (norm(it->first) > norm(pick->first)) pick = it;
        const std::vector<int> E = pick->first;
        const FFElem a = pick->second;
        work.erase(pick);
        if (a.is_zero()) continue;
        if (norm(E) == 0) {
            constant = constant + a;
            continue;
        }
        int k = 0;
        for (int i = r; i >= 1; --i)
            if (E[i - 1] % tw.p() != 0) {
                k = i;
                break;
            }
        if (k) {
            // d(c t^E dlog T') = E_k c t^E dlog t_k ^ dlog T'.
            const DiffForm::Mask bit = 1u << (k - 1);
            const int s = wedge_sign(bit, top & ~bit);
            FFElem c = a * F.from_int(E[k - 1]).inverse();
            if (s < 0) c = -c;
            std::vector<int> rest;
            for (int i = 1; i <= r; ++i)
                if (i != k) rest.push_back(i);
            *xi = *xi + DiffForm::monomial(Elem::monomial(tw, c, E), rest);
            continue;
        }
        std::vector<int> Ep(E);
        for (int& v : Ep) v /= tw.p();
        const FFElem b = F.frobenius_inverse(a);
        eta = eta + DiffForm::monomial(Elem::monomial(tw, b, Ep), all_idx);
        auto [it, fresh] = work.emplace(Ep, b);
        if (!fresh) it->second = it->second + b;
    }

    const FFElem rep = F.from_int(F.trace(constant)) * trace_one_element(F);
    auto e = solve_constant(F, constant - rep);
    if (!e) throw std::logic_error("trace-zero constant outside the Artin-Schreier image");
    eta = eta + DiffForm::monomial(Elem::constant(tw, r, *e), all_idx);
    return {eta, xi, rep};
}

}  // namespace hlcf
