#include "hlcf/cohomology.hpp"

#include "hlcf/errors.hpp"
#include "hlcf/extensions.hpp"
#include "hlcf/forms.hpp"

namespace hlcf {

namespace {

long long pmod(long long a, long long m) { return ((a % m) + m) % m; }

Elem at_level(const Elem& x, int level) { return x.level() == level ? x : x.lift(level); }

KClass as_symbols(const CohClass& xi) {
    KClass k(xi.tower(), xi.level(), xi.degree(), xi.ell());
    for (const auto& t : xi.terms()) {
        std::vector<Elem> entries{t.w};
        entries.insert(entries.end(), t.bs.begin(), t.bs.end());
        k.add_symbol(t.coeff, entries);
    }
    return k;
}

void check_tame_ell(const Tower& tw, int ell) {
    if ((static_cast<long long>(tw.field().order()) - 1) % ell != 0)
        throw DomainError("tame classes need ell | q - 1 (ell = " + std::to_string(ell) + ")");
}

}  // namespace

InvValue InvValue::make(long long num, int ell) {
    if (ell < 1) throw DomainError("InvValue needs ell >= 1");
    return {static_cast<int>(pmod(num, ell)), ell};
}

InvValue InvValue::operator+(const InvValue& o) const {
    if (ell != o.ell) throw DomainError("InvValue moduli differ");
    return make(static_cast<long long>(num) + o.num, ell);
}

InvValue InvValue::operator-() const { return make(-static_cast<long long>(num), ell); }

std::string InvValue::to_string() const { return std::to_string(num) + "/" + std::to_string(ell); }

CohClass::CohClass(const Tower& tw, int level, int degree, int ell)
    : tower_(&tw), level_(level), degree_(degree), ell_(ell) {
    if (level < 0 || level > tw.d()) throw DomainError("level out of range");
    if (degree < 1) throw DomainError("cohomological degree must be >= 1");
    if (ell < 2 || !is_prime(ell)) throw DomainError("ell must be prime");
    if (ell != tw.p()) check_tame_ell(tw, ell);
}

void CohClass::add_term(long long coeff, const Elem& w, std::vector<Elem> bs) {
    if (static_cast<int>(bs.size()) + 1 != degree_) throw DomainError("wrong number of unit entries");
    if (&w.tower() != tower_) throw DomainError("entries from a different tower");
    if (w.level() > level_) throw DomainError("entry above the class level");
    CohTerm t;
    t.coeff = pmod(coeff, ell_);
    t.w = at_level(w, level_);
    if (!is_p_part() && t.w.is_exact_zero()) throw DomainError("zero entry in a Kummer symbol");
    for (auto& b : bs) {
        if (&b.tower() != tower_) throw DomainError("entries from a different tower");
        if (b.level() > level_) throw DomainError("entry above the class level");
        if (b.is_exact_zero()) throw DomainError("zero unit entry");
        t.bs.push_back(at_level(b, level_));
    }
    if (t.coeff == 0 || t.w.is_exact_zero()) return;
    terms_.push_back(std::move(t));
}

CohClass CohClass::operator+(const CohClass& o) const {
    if (o.tower_ != tower_ || o.level_ != level_ || o.degree_ != degree_ || o.ell_ != ell_)
        throw DomainError("cohomology classes live in different groups");
    CohClass r = *this;
    r.terms_.insert(r.terms_.end(), o.terms_.begin(), o.terms_.end());
    return r;
}

CohClass CohClass::operator-(const CohClass& o) const { return *this + o.times(-1); }

CohClass CohClass::times(long long k) const {
    CohClass r(*tower_, level_, degree_, ell_);
    for (const auto& t : terms_) r.add_term(t.coeff * k, t.w, t.bs);
    return r;
}

std::string CohClass::to_string() const {
    if (terms_.empty()) return "0";
    std::string s;
    for (const auto& t : terms_) {
        if (!s.empty()) s += " + ";
        if (t.coeff != 1) s += std::to_string(t.coeff) + "*";
        s += "(" + t.w.to_string() + ")";
        for (const auto& b : t.bs) s += " (x) (" + b.to_string() + ")";
    }
    return s;
}

CohClass make_class(const Elem& w, std::vector<Elem> bs, int ell) {
    int level = w.level();
    for (const auto& b : bs) level = std::max(level, b.level());
    CohClass c(w.tower(), level, static_cast<int>(bs.size()) + 1, ell);
    c.add_term(1, w, std::move(bs));
    return c;
}

CohClass lift_class(const CohClass& xi) {
    const int L = xi.level() + 1;
    if (L > xi.tower().d()) throw DomainError("no level above " + std::to_string(xi.level()));
    CohClass r(xi.tower(), L, xi.degree(), xi.ell());
    for (const auto& t : xi.terms()) r.add_term(t.coeff, t.w, t.bs);
    return r;
}

CohClass kato_i(const CohClass& a, const CohClass& b, const Elem& pi) {
    if (&a.tower() != &b.tower() || a.level() != b.level() || a.ell() != b.ell())
        throw DomainError("kato_i needs classes over the same field");
    if (a.degree() != b.degree() + 1) throw DomainError("kato_i needs degrees q and q - 1");
    const int L = a.level() + 1;
    if (pi.level() != L || pi.is_exact_zero() || pi.valuation()[0] != 1)
        throw DomainError("kato_i needs a prime element of the level above");
    CohClass r = lift_class(a);
    for (const auto& t : b.terms()) {
        std::vector<Elem> bs;
        for (const auto& x : t.bs) bs.push_back(x.lift(L));
        bs.push_back(pi);
        r.add_term(t.coeff, t.w.lift(L), std::move(bs));
    }
    return r;
}

InvValue inv(const CohClass& xi) {
    const int d = xi.level();
    if (xi.degree() != d + 1) throw DomainError("inv needs a class of degree level + 1");
    const int ell = xi.ell();
    if (!xi.is_p_part()) {
        KNormalForm nf = as_symbols(xi).normal_form();
        const DiffForm::Mask full = d == 0 ? 0 : ((DiffForm::Mask{1} << d) - 1);
        auto it = nf.constant.find(full);
        return InvValue::make(it == nf.constant.end() ? 0 : it->second, ell);
    }
    const FiniteField& F = xi.tower().field();
    long long total = 0;
    for (const auto& t : xi.terms()) {
        DiffForm w = DiffForm::function(t.w);
        for (const auto& b : t.bs) w = w.wedge(dlog(b));
        total += t.coeff * F.trace(residue(w));
    }
    return InvValue::make(total, ell);
}

int conductor(const CohClass& chi) {
    if (chi.degree() != 1) throw DomainError("conductor needs a degree-1 class");
    if (chi.level() == 0) return 0;
    const Tower& tw = chi.tower();
    const int L = chi.level();
    if (chi.is_p_part()) {
        Elem a = Elem::zero(tw, L);
        for (const auto& t : chi.terms()) a += t.w * Elem::from_int(tw, L, t.coeff);
        if (a.is_exact_zero()) return 0;
        Elem r = CyclicExt::reduce(ExtKind::ArtinSchreier, a, tw.p());
        if (r.is_exact_zero()) return 0;
        const int v = r.valuation()[0];
        return v < 0 ? 1 - v : 0;
    }
    long long v = 0;
    for (const auto& t : chi.terms()) v += t.coeff * t.w.valuation()[0];
    return pmod(v, chi.ell()) == 0 ? 0 : 1;
}

InvValue cup_pair(const CohClass& chi, const KClass& xi, int M) {
    if (chi.degree() != 1) throw DomainError("cup_pair needs a character (degree 1)");
    if (&chi.tower() != &xi.tower() || chi.level() != xi.level())
        throw DomainError("character and K-class live over different fields");
    if (chi.ell() != xi.ell()) throw DomainError("character and K-class have different moduli");
    if (xi.degree() != xi.level()) throw DomainError("cup_pair needs a class in K_d with d the level");
    const int c = conductor(chi);
    if (M < c)
        throw FiltrationError("filtration bound M = " + std::to_string(M) + " is below the conductor " +
                              std::to_string(c));
    CohClass prod(chi.tower(), chi.level(), xi.degree() + 1, chi.ell());
    for (const auto& t : chi.terms())
        for (const auto& [key, sym] : xi.terms()) prod.add_term(t.coeff * sym.first, t.w, sym.second);
    return inv(prod);
}

}  // namespace hlcf
