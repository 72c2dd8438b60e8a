#include "hlcf/extensions.hpp"

#include <map>
#include <numeric>
#include <sstream>

#include "hlcf/errors.hpp"
#include "hlcf/forms.hpp"

namespace hlcf {

namespace detail {

struct ExtData {
    ExtKind kind;
    const Tower* tw;
    int level;
    int ell;
    Elem a;
    Elem original;
    FFElem zeta{};
    Ramification ram = Ramification::Unramified;
    int brk = 0;
    int pole = 0;  // Artin-Schreier: outer pole order of a
};

}  // namespace detail

namespace {

using detail::ExtData;

long pmod(long long a, long long m) {
    a %= m;
    return static_cast<long>(a < 0 ? a + m : a);
}

long binom_mod(int n, int k, int p) {
    long r = 1;
    for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
    return pmod(r, p);
}

/// The polar part of a (every term with lexicographically negative exponent)
/// together with the constant term must be known exactly.
void check_polar_known(const Elem& a) {
    if (a.level() == 0) return;
    if (a.known_to() <= 0) throw PrecisionError("defining element is not known up to its constant term");
    for (std::size_t i = 0; i < a.coeffs().size(); ++i) {
        const int e = a.lo() + static_cast<int>(i);
        if (e < 0 && !a.coeffs()[i].is_exact())
            throw PrecisionError("polar coefficients of the defining element must be exact");
        if (e == 0) check_polar_known(a.coeffs()[i]);
    }
}

bool lex_negative(const std::vector<int>& exps) {
    for (int k = static_cast<int>(exps.size()); k >= 1; --k) {
        if (exps[k - 1] < 0) return true;
        if (exps[k - 1] > 0) return false;
    }
    return false;
}

Elem reduce_as(const Elem& a) {
    const Tower& tw = a.tower();
    const FiniteField& F = tw.field();
    const int L = a.level();
    const int p = tw.p();
    check_polar_known(a);
    // keys outermost first so that map order is the lexicographic order
    std::map<std::vector<int>, FFElem> terms;
    FFElem constant = F.zero();
    for (const auto& t : monomial_terms(a)) {
        if (lex_negative(t.exps))
            terms[std::vector<int>(t.exps.rbegin(), t.exps.rend())] = t.coeff;
        else if (std::all_of(t.exps.begin(), t.exps.end(), [](int e) { return e == 0; }))
            constant = t.coeff;
    }
    for (;;) {
        auto it = terms.begin();
        for (; it != terms.end(); ++it)
            if (std::all_of(it->first.begin(), it->first.end(), [&](int e) { return e % p == 0; })) break;
        if (it == terms.end()) break;
        std::vector<int> key = it->first;
        const FFElem c = F.frobenius_inverse(it->second);
        terms.erase(it);
        for (auto& e : key) e /= p;
        auto& slot = terms.try_emplace(key, F.zero()).first->second;
        slot += c;
        if (slot.is_zero()) terms.erase(key);
    }
    Elem out = Elem::zero(tw, L);
    for (const auto& [key, c] : terms) out += Elem::monomial(tw, c, std::vector<int>(key.rbegin(), key.rend()));
    const int tr = F.trace(constant);
    if (tr != 0) out += Elem::constant(tw, L, trace_one_element(F) * F.from_int(tr));
    return out;
}

Elem reduce_kummer(const Elem& a, int ell) {
    const Tower& tw = a.tower();
    const FiniteField& F = tw.field();
    const int L = a.level();
    const FFElem c = L == 0 ? a.constant_value() : a.leading_constant();
    const long k = pmod(F.dlog(c), ell);
    std::vector<int> exps(L, 0);
    if (L > 0) {
        const auto v = a.valuation();
        for (int i = 0; i < L; ++i) exps[L - 1 - i] = static_cast<int>(pmod(v[i], ell));
    }
    return Elem::monomial(tw, F.primitive().pow(k), exps);
}

LElement make(const std::shared_ptr<const ExtData>& d, std::vector<Elem> c) { return LElement(d, std::move(c)); }

LElement lift_into(const std::shared_ptr<const ExtData>& d, const Elem& x) {
    std::vector<Elem> c(d->ell, Elem::zero(*d->tw, d->level));
    c[0] = x.level() < d->level ? x.lift(d->level) : x;
    return make(d, std::move(c));
}

LElement gen(const std::shared_ptr<const ExtData>& d) {
    std::vector<Elem> c(d->ell, Elem::zero(*d->tw, d->level));
    if (d->ell == 1) throw DomainError("degree one extension");
    c[1] = Elem::one(*d->tw, d->level);
    return make(d, std::move(c));
}

/// Smallest alpha in [-(n-1), -1] or 0.. with alpha * v = 1 mod n, and beta = (1 - alpha v)/n.
std::pair<int, int> bezout(int v, int n) {
    for (int alpha = -(n - 1); alpha < n; ++alpha) {
        const long r = 1 - static_cast<long>(alpha) * v;
        if (r % n == 0) return {alpha, static_cast<int>(r / n)};
    }
    throw DomainError("valuation prime to the degree expected");
}

/// Outer valuation of x at least `bound`, treating indeterminate coefficients as zero.
bool outer_valuation_at_least(const Elem& x, int bound) {
    if (x.is_exact_zero()) return true;
    for (std::size_t i = 0; i < x.coeffs().size(); ++i) {
        const int e = x.lo() + static_cast<int>(i);
        if (e >= bound) return true;
        const Elem& c = x.coeffs()[i];
        if (c.is_exact_zero() || c.is_indeterminate()) continue;
        if (monomial_terms(c).empty()) continue;
        return false;
    }
    if (x.known_to() < bound) throw PrecisionError("norm known only to outer order " + std::to_string(x.known_to()));
    return true;
}

}  // namespace

std::string to_string(ExtKind k) { return k == ExtKind::Kummer ? "kummer" : "artin-schreier"; }

std::string to_string(Ramification r) {
    switch (r) {
        case Ramification::Unramified: return "unramified";
        case Ramification::Tame: return "tame";
        case Ramification::Wild: return "wild";
        case Ramification::Ferocious: return "ferocious";
    }
    return "?";
}

// ------------------------------------------------------------ LElement

LElement::LElement(std::shared_ptr<const detail::ExtData> ext, std::vector<Elem> coeffs)
    : ext_(std::move(ext)), c_(std::move(coeffs)) {
    if (static_cast<int>(c_.size()) != ext_->ell) throw DomainError("L-element of the wrong length");
    for (auto& c : c_)
        if (c.level() < ext_->level) c = c.lift(ext_->level);
}

void LElement::check(const LElement& o) const {
    if (o.ext_ != ext_) throw DomainError("L-elements of different extensions");
}

LElement LElement::operator+(const LElement& o) const {
    check(o);
    std::vector<Elem> r = c_;
    for (std::size_t i = 0; i < r.size(); ++i) r[i] += o.c_[i];
    return LElement(ext_, std::move(r));
}

LElement LElement::operator-() const {
    std::vector<Elem> r = c_;
    for (auto& x : r) x = -x;
    return LElement(ext_, std::move(r));
}

LElement LElement::operator-(const LElement& o) const { return *this + (-o); }

LElement LElement::operator*(const Elem& x) const {
    std::vector<Elem> r = c_;
    const Elem xl = x.level() < ext_->level ? x.lift(ext_->level) : x;
    for (auto& c : r) c *= xl;
    return LElement(ext_, std::move(r));
}

LElement LElement::operator*(const LElement& o) const {
    check(o);
    const int n = ext_->ell;
    const Tower& tw = *ext_->tw;
    std::vector<Elem> prod(2 * n - 1, Elem::zero(tw, ext_->level));
    for (int i = 0; i < n; ++i) {
        if (c_[i].is_exact_zero()) continue;
        for (int j = 0; j < n; ++j)
            if (!o.c_[j].is_exact_zero()) prod[i + j] += c_[i] * o.c_[j];
    }
    // y^n = a (Kummer) or y^p = y + a (Artin-Schreier)
    for (int k = 2 * n - 2; k >= n; --k) {
        if (prod[k].is_exact_zero()) continue;
        const Elem top = prod[k];
        prod[k] = Elem::zero(tw, ext_->level);
        prod[k - n] += top * ext_->a;
        if (ext_->kind == ExtKind::ArtinSchreier) prod[k - n + 1] += top;
    }
    prod.resize(n);
    return LElement(ext_, std::move(prod));
}

LElement LElement::sigma(int k) const {
    const int n = ext_->ell;
    k = static_cast<int>(pmod(k, n));
    if (k == 0) return *this;
    const Tower& tw = *ext_->tw;
    std::vector<Elem> r(n, Elem::zero(tw, ext_->level));
    if (ext_->kind == ExtKind::Kummer) {
        const FFElem z = ext_->zeta.pow(k);
        for (int i = 0; i < n; ++i) r[i] = c_[i].scale(z.pow(i));
    } else {
        // c_i (y + k)^i
        const FiniteField& F = tw.field();
        for (int i = 0; i < n; ++i) {
            if (c_[i].is_exact_zero()) continue;
            for (int j = 0; j <= i; ++j) {
                long kp = 1;
                for (int r2 = 0; r2 < i - j; ++r2) kp = kp * k % n;
                const long coef = pmod(binom_mod(i, j, n) * kp, n);
                if (coef) r[j] += c_[i].scale(F.from_int(coef));
            }
        }
    }
    return LElement(ext_, std::move(r));
}

std::optional<Elem> LElement::in_base() const {
    for (int i = 1; i < ext_->ell; ++i)
        if (!c_[i].agrees_with(Elem::zero(*ext_->tw, ext_->level))) return std::nullopt;
    return c_[0];
}

bool LElement::is_exact_zero() const {
    for (const auto& c : c_)
        if (!c.is_exact_zero()) return false;
    return true;
}

bool LElement::agrees_with(const LElement& o) const {
    check(o);
    for (std::size_t i = 0; i < c_.size(); ++i)
        if (!c_[i].agrees_with(o.c_[i])) return false;
    return true;
}

LElement LElement::inverse() const {
    if (is_exact_zero()) throw DomainError("inverse of zero in L");
    LElement conj = sigma(1);
    for (int k = 2; k < ext_->ell; ++k) conj = conj * sigma(k);
    const Elem n = field_norm(*this);
    return conj * n.inverse();
}

LElement LElement::pow(long long e) const {
    if (e < 0) return inverse().pow(-e);
    LElement acc = lift_into(ext_, Elem::one(*ext_->tw, ext_->level));
    LElement base = *this;
    while (e > 0) {
        if (e & 1) acc = acc * base;
        e >>= 1;
        if (e) base = base * base;
    }
    return acc;
}

std::string LElement::to_string() const {
    std::string s;
    for (int i = 0; i < ext_->ell; ++i) {
        if (c_[i].is_exact_zero()) continue;
        if (!s.empty()) s += " + ";
        s += "(" + c_[i].to_string() + ")";
        if (i == 1) s += "*y";
        if (i > 1) s += "*y^" + std::to_string(i);
    }
    return s.empty() ? "0" : s;
}

Elem field_norm(const LElement& z) {
    if (z.is_exact_zero()) throw DomainError("norm of zero");
    LElement prod = z;
    for (int k = 1; k < z.degree(); ++k) prod = prod * z.sigma(k);
    auto base = prod.in_base();
    if (!base) throw DomainError("norm has nonvanishing y-coefficients: " + prod.to_string());
    return *base;
}

// ------------------------------------------------------------ CyclicExt

Elem CyclicExt::reduce(ExtKind kind, const Elem& a, int ell) {
    if (a.is_exact_zero()) throw DomainError("defining element must be nonzero");
    if (kind == ExtKind::ArtinSchreier) return reduce_as(a);
    return reduce_kummer(a, ell);
}

CyclicExt CyclicExt::classify(ExtKind kind, const Elem& a, int ell) {
    const Tower& tw = a.tower();
    const int p = tw.p();
    const FiniteField& F = tw.field();
    if (a.is_exact_zero()) throw DomainError("defining element must be nonzero");
    if (ell < 2 || !is_prime(ell)) throw DomainError("the degree must be prime");
    auto d = std::make_shared<ExtData>();
    d->kind = kind;
    d->tw = &tw;
    d->level = tw.d();
    d->ell = ell;
    const Elem top = a.level() < d->level ? a.lift(d->level) : a;
    d->original = top;
    const int L = d->level;
    if (kind == ExtKind::ArtinSchreier) {
        if (ell != p) throw DomainError("Artin-Schreier extensions have degree p");
        d->a = reduce_as(top);
        if (d->a.is_exact_zero()) throw DomainError("trivial extension: a lies in (F-1)K");
        const auto v = d->a.valuation();
        if (L >= 1 && v[0] < 0) {
            d->pole = -v[0];
            d->brk = d->pole;
            d->ram = d->pole % p ? Ramification::Wild : Ramification::Ferocious;
        } else {
            d->ram = Ramification::Unramified;
        }
    } else {
        if (ell == p) throw DomainError("Kummer extensions need a degree prime to p");
        if ((F.order() - 1) % ell != 0)
            throw DomainError("unsupported degree: " + std::to_string(ell) + " does not divide q - 1");
        d->zeta = F.primitive().pow((F.order() - 1) / ell);
        d->a = reduce_kummer(top, ell);
        if (d->a == Elem::one(tw, L)) throw DomainError("trivial extension: a is an ell-th power");
        const auto v = L ? d->a.valuation() : std::vector<int>{};
        d->ram = (L && v[0] % ell) ? Ramification::Tame : Ramification::Unramified;
    }
    return CyclicExt(d);
}

ExtKind CyclicExt::kind() const { return d_->kind; }
const Tower& CyclicExt::tower() const { return *d_->tw; }
int CyclicExt::level() const { return d_->level; }
int CyclicExt::ell() const { return d_->ell; }
const Elem& CyclicExt::a() const { return d_->a; }
const Elem& CyclicExt::original() const { return d_->original; }
Ramification CyclicExt::ramification() const { return d_->ram; }

int CyclicExt::e() const {
    return d_->ram == Ramification::Tame || d_->ram == Ramification::Wild ? d_->ell : 1;
}
int CyclicExt::f() const { return e() == 1 ? d_->ell : 1; }
int CyclicExt::break_index() const { return d_->brk; }

int CyclicExt::conductor() const {
    switch (d_->ram) {
        case Ramification::Unramified: return 0;
        case Ramification::Tame: return 1;
        default: return d_->brk + 1;
    }
}

std::optional<FFElem> CyclicExt::zeta() const {
    if (d_->kind == ExtKind::Kummer) return d_->zeta;
    return std::nullopt;
}

LElement CyclicExt::y() const { return gen(d_); }
LElement CyclicExt::lift(const Elem& x) const { return lift_into(d_, x); }

LElement CyclicExt::pi_L() const {
    const Tower& tw = *d_->tw;
    const int L = d_->level;
    const Elem u = Elem::var(tw, L, L);
    switch (d_->ram) {
        case Ramification::Unramified:
        case Ramification::Ferocious: return lift(u);
        case Ramification::Tame: {
            auto [alpha, beta] = bezout(d_->a.valuation()[0], d_->ell);
            return y().pow(alpha) * u.pow(beta);
        }
        case Ramification::Wild: {
            auto [alpha, beta] = bezout(-d_->pole, d_->ell);
            return y().pow(alpha) * u.pow(beta);
        }
    }
    return lift(u);
}

LElement CyclicExt::a_sigma() const {
    if (d_->ram == Ramification::Unramified) return lift(Elem::zero(*d_->tw, d_->level));
    LElement one = lift(Elem::one(*d_->tw, d_->level));
    if (d_->ram == Ramification::Ferocious) {
        const LElement h = *residue_data().h;
        return h.sigma(1) * h.inverse() - one;
    }
    const LElement pi = pi_L();
    return pi.sigma(1) * pi.inverse() - one;
}

std::optional<Elem> CyclicExt::b() const {
    if (d_->ram == Ramification::Unramified) return std::nullopt;
    return field_norm(a_sigma());
}

ResidueData CyclicExt::residue_data() const {
    const Tower& tw = *d_->tw;
    const int L = d_->level;
    const std::string Fs = L >= 1 ? tw.describe(L - 1) : "F_" + std::to_string(tw.field().order());
    ResidueData r{Fs, pi_L(), std::nullopt, std::nullopt};
    switch (d_->ram) {
        case Ramification::Unramified: {
            Elem a0 = L ? d_->a.coeff(0) : d_->a;
            std::string poly = d_->kind == ExtKind::Kummer ? "Y^" + std::to_string(d_->ell) + " - (" + a0.to_string() + ")"
                                                          : "Y^" + std::to_string(d_->ell) + " - Y - (" + a0.to_string() + ")";
            if (L == 1)
                r.field = "F_" + std::to_string(tw.field().order()) + "^" + std::to_string(d_->ell) + " = " + Fs +
                          "[Y]/(" + poly + ")";
            else
                r.field = Fs + "[Y]/(" + poly + ")";
            break;
        }
        case Ramification::Tame:
        case Ramification::Wild: break;
        case Ramification::Ferocious: {
            const int j = d_->pole;
            const Elem u = Elem::var(tw, L, L);
            r.h = y() * u.pow(j / d_->ell);
            r.residue_norm = d_->a.coeff(-j);
            r.field = Fs + "(h), h^" + std::to_string(d_->ell) + " = " + r.residue_norm->to_string();
            break;
        }
    }
    return r;
}

std::string CyclicExt::describe() const {
    std::ostringstream os;
    os << (d_->kind == ExtKind::Kummer ? "X^" + std::to_string(d_->ell) + " = " : "X^p - X = ") << d_->a.to_string()
       << " over " << d_->tw->describe(d_->level) << ": " << hlcf::to_string(d_->ram);
    if (d_->ram == Ramification::Wild || d_->ram == Ramification::Ferocious) os << ", break " << d_->brk;
    return os.str();
}

// ------------------------------------------------------------ norms

bool norm_congruence_holds(const CyclicExt& ext, const Elem& x) {
    if (ext.ramification() != Ramification::Wild && ext.ramification() != Ramification::Ferocious)
        throw DomainError("the norm congruence concerns wild and ferocious extensions");
    const Tower& tw = ext.tower();
    const int L = ext.level();
    const Elem xl = x.level() < L ? x.lift(L) : x;
    if (!xl.is_exact_zero() && !xl.is_indeterminate() && xl.valuation()[0] < 0)
        throw DomainError("x must be integral");
    const Elem one = Elem::one(tw, L);
    const Elem lhs = field_norm(ext.lift(one) + ext.a_sigma() * xl);
    const Elem rhs = one + (xl.pow(tw.p()) - xl) * *ext.b();
    return outer_valuation_at_least(lhs - rhs, ext.break_index() + 1);
}

NormCongruenceReport norm_congruence_check(const CyclicExt& ext, const std::vector<Elem>& xs) {
    NormCongruenceReport r;
    for (const auto& x : xs) {
        ++r.samples;
        if (norm_congruence_holds(ext, x))
            ++r.passed;
        else
            r.failures.push_back(x.to_string());
    }
    return r;
}

KClass k_norm(const std::vector<LSymbolTerm>& eta, const CyclicExt& ext) {
    const Tower& tw = ext.tower();
    const int L = ext.level();
    const int ell = ext.ell();
    if (eta.empty()) throw DomainError("empty class over L");
    const int n = static_cast<int>(eta.front().entries.size());
    KClass out(tw, L, n, ell);
    const LElement pi = ext.pi_L();
    for (const auto& term : eta) {
        if (static_cast<int>(term.entries.size()) != n) throw DomainError("symbols of different degrees");
        std::vector<Elem> base(n);
        std::vector<int> l_positions;
        std::vector<LElement> l_entries;
        for (int i = 0; i < n; ++i) {
            const auto& e = term.entries[i];
            if (std::holds_alternative<Elem>(e)) {
                base[i] = std::get<Elem>(e);
                continue;
            }
            const LElement& z = std::get<LElement>(e);
            if (auto k = z.in_base(); k && z.coeffs()[0].is_exact()) {
                base[i] = *k;
                continue;
            }
            l_positions.push_back(i);
            l_entries.push_back(z);
        }
        long long coeff = term.coeff;
        if (l_positions.empty()) {
            out.add_symbol(coeff * ell, base);
            continue;
        }
        if (l_positions.size() == 2) {
            // {1 + pi^m x, pi, rest}: m {g, pi} = -{g, -x}
            int pi_slot = -1;
            for (int s = 0; s < 2; ++s)
                if (l_entries[s].agrees_with(pi)) pi_slot = s;
            if (pi_slot < 0) throw DomainError("two entries from L that are not of the form {1 + pi_L^m x, pi_L}");
            const LElement g = l_entries[1 - pi_slot];
            const LElement w = g - ext.lift(Elem::one(tw, L));
            const Elem nw = field_norm(w);
            const int m = nw.valuation()[0] / ext.f();
            const auto x = (w * pi.pow(-m)).in_base();
            if (!x) throw DomainError("irreducible two-L-entry generator: the unit is not 1 + pi_L^m x with x in K");
            if (m % ell == 0)
                throw DomainError("irreducible two-L-entry generator at level " + std::to_string(m) +
                                  " divisible by " + std::to_string(ell));
            long inv = 1;
            for (; inv < ell; ++inv)
                if (pmod(inv * m, ell) == 1) break;
            // replace pi by -x and scale by -1/m
            const int pos_pi = l_positions[pi_slot];
            base[pos_pi] = -*x;
            coeff = coeff * (-inv);
            l_positions.erase(l_positions.begin() + pi_slot);
            l_entries.erase(l_entries.begin() + pi_slot);
        }
        if (l_positions.size() != 1) throw DomainError("symbols with several entries from L are not supported");
        base[l_positions[0]] = field_norm(l_entries[0]);
        out.add_symbol(coeff, base);
    }
    return out;
}

}  // namespace hlcf
