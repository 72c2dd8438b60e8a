#include "hlcf/reciprocity.hpp"

#include <algorithm>
#include <numeric>
#include <optional>

#include "hlcf/errors.hpp"
#include "hlcf/random.hpp"

namespace hlcf {

namespace {

// Rethrow with the stage name prefixed, keeping the error category.
template <class Fn>
auto staged(const std::string& stage, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const PrecisionError& e) {
        throw PrecisionError(stage + ": " + e.what());
    } catch (const FiltrationError& e) {
        throw FiltrationError(stage + ": " + e.what());
    } catch (const DomainError& e) {
        throw DomainError(stage + ": " + e.what());
    }
}

std::vector<Elem> uniformizers(const Tower& tw, int L, DiffForm::Mask S) {
    std::vector<Elem> v;
    for (int k = 1; k <= L; ++k)
        if (S & (DiffForm::Mask{1} << (k - 1))) v.push_back(Elem::var(tw, L, k));
    return v;
}

// Inner exponent vectors in [-r, r]^n ordered by max norm, then lexicographically.
std::vector<std::vector<int>> inner_exponents(int n, int r) {
    std::vector<std::vector<int>> out;
    std::vector<int> e(n, -r);
    if (n == 0) return {{}};
    for (;;) {
        out.push_back(e);
        int k = 0;
        while (k < n && ++e[k] > r) e[k++] = -r;
        if (k == n) break;
    }
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        int ma = 0, mb = 0;
        for (int x : a) ma = std::max(ma, std::abs(x));
        for (int x : b) mb = std::max(mb, std::abs(x));
        return ma < mb;
    });
    return out;
}

}  // namespace

GaloisElem GaloisElem::operator+(const GaloisElem& o) const {
    if (ell != o.ell) throw DomainError("Galois elements of different groups");
    return {(k + o.k) % ell, ell};
}

std::string GaloisElem::to_string() const { return k == 0 ? "id" : "sigma^" + std::to_string(k); }

CohClass character(const CyclicExt& ext) { return make_class(ext.a(), {}, ext.ell()); }

IndexCertificate norm_index_upper(const CyclicExt& ext) {
    const Tower& tw = ext.tower();
    const int L = ext.level();
    const int ell = ext.ell();
    IndexCertificate c;
    c.bound = ell;
    switch (ext.ramification()) {
        case Ramification::Unramified:
            if (ext.f() != ell) throw DomainError("unramified extension without residue degree ell");
            c.kind = "Gal(F_L/F)";
            c.detail = "K_" + std::to_string(L - 1) + "(F)/N K_" + std::to_string(L - 1) +
                       "(F_L) = Gal(F_L/F), residue degree " + std::to_string(ext.f());
            break;
        case Ramification::Tame: {
            std::vector<Elem> gen{Elem::constant(tw, L - 1, tw.field().primitive())};
            for (const auto& t : uniformizers(tw, L - 1, (DiffForm::Mask{1} << (L - 1)) - 1)) gen.push_back(t);
            KNormalForm nf = KClass::symbol(gen, ell).normal_form();
            if (nf.is_zero()) throw DomainError("generator of K_d(F)/ell vanishes");
            c.kind = "K_d(F)/ell";
            c.detail = "K_" + std::to_string(L) + "(F)/" + std::to_string(ell) + " generated by " + symbol_text(gen) +
                       ", of order " + std::to_string(ell);
            break;
        }
        case Ramification::Wild:
        case Ramification::Ferocious: {
            const FiniteField& F = tw.field();
            const FFElem gamma = trace_one_element(F);
            std::vector<int> idx;
            for (int k = 1; k < L; ++k) idx.push_back(k);
            DiffForm w = DiffForm::monomial(Elem::constant(tw, L - 1, gamma), idx);
            if (quotient_reduce(w) != 1) throw DomainError("quotient generator does not reduce to 1");
            c.kind = "order p quotient";
            c.detail = "Omega^" + std::to_string(L - 1) + "_F/((F-1) + d) = Z/" + std::to_string(tw.p()) +
                       " via Tr res, generated by " + w.to_string();
            break;
        }
    }
    return c;
}

KClass certificate_symbol(const CyclicExt& ext, const DiffForm& w) {
    const Ramification r = ext.ramification();
    if (r != Ramification::Wild && r != Ramification::Ferocious)
        throw DomainError("the certificate map concerns wild and ferocious extensions");
    const Tower& tw = ext.tower();
    const int L = ext.level();
    if (w.level() != L - 1 || w.degree() != L - 1) throw DomainError("need a top-degree form of the residue field");
    const DiffForm::Mask full = (DiffForm::Mask{1} << (L - 1)) - 1;
    const Elem b = *ext.b();
    KClass out(tw, L, L, ext.ell());
    const Elem x = w.coeff(full);
    if (x.is_exact_zero()) return out;
    std::vector<Elem> entries{Elem::one(tw, L) + x.lift(L) * b};
    auto ts = uniformizers(tw, L, full);
    if (r == Ramification::Ferocious) {
        ts.pop_back();
        ts.push_back(Elem::var(tw, L, L));
    }
    entries.insert(entries.end(), ts.begin(), ts.end());
    out.add_symbol(1, entries);
    return out;
}

KClass nonnorm_witness(const CyclicExt& ext, int M) {
    const Tower& tw = ext.tower();
    const int L = ext.level();
    const int ell = ext.ell();
    if (M < ext.conductor())
        throw FiltrationError("M = " + std::to_string(M) + " is below break + 1 = " + std::to_string(ext.conductor()));
    const CohClass chi = character(ext);
    const DiffForm::Mask full = (DiffForm::Mask{1} << L) - 1;
    auto try_symbol = [&](const std::vector<Elem>& entries) -> std::optional<KClass> {
        KClass xi = KClass::symbol(entries, ell);
        if (!cup_pair(chi, xi, M).is_zero()) return xi;
        return std::nullopt;
    };
    if (auto x = try_symbol(uniformizers(tw, L, full))) return *x;
    const Elem g = Elem::constant(tw, L, tw.field().primitive());
    for (int k = L; k >= 1; --k) {
        std::vector<Elem> e{g};
        for (const auto& t : uniformizers(tw, L, full & ~(DiffForm::Mask{1} << (k - 1)))) e.push_back(t);
        if (auto x = try_symbol(e)) return *x;
    }
    const int top = ext.conductor() - 1;
    const auto inner = inner_exponents(L - 1, 3);
    for (int j = top; j >= 1; --j)
        for (const auto& e : inner)
            for (const auto& c : tw.field().elements()) {
                if (c.is_zero()) continue;
                std::vector<int> exps = e;
                exps.push_back(j);
                const Elem unit = Elem::one(tw, L) + Elem::monomial(tw, c, exps);
                for (int k = L; k >= 1; --k) {
                    std::vector<Elem> entries{unit};
                    for (const auto& t : uniformizers(tw, L, full & ~(DiffForm::Mask{1} << (k - 1))))
                        entries.push_back(t);
                    if (auto x = try_symbol(entries)) return *x;
                }
            }
    throw DomainError("no non-norm witness found for " + ext.describe());
}

GaloisElem psi(const CyclicExt& ext, const KClass& xi, int M) {
    return {cup_pair(character(ext), xi, M).num, ext.ell()};
}

IsoReport verify_iso(const CyclicExt& ext, int samples, int M, std::uint64_t seed) {
    const Tower& tw = ext.tower();
    const int L = ext.level();
    const int ell = ext.ell();
    IsoReport r;
    r.ext = ext.describe();
    r.ramification = to_string(ext.ramification());
    r.ell = ell;
    r.break_index = ext.break_index();
    r.M = M;
    if (M < ext.conductor())
        throw FiltrationError("M = " + std::to_string(M) + " is below break + 1 = " + std::to_string(ext.conductor()) +
                              " for " + r.ext);
    r.index_upper = staged("index bound", [&] { return norm_index_upper(ext); });
    const KClass w = staged("witness search", [&] { return nonnorm_witness(ext, M); });
    r.witness = w.to_string();
    r.witness_pairing = staged("witness pairing", [&] { return cup_pair(character(ext), w, M); });
    r.psi_image_order = r.witness_pairing.is_zero() ? 1 : ell / std::gcd(r.witness_pairing.num, ell);

    Rng rng(seed);
    staged("norm kernel", [&] {
        for (int s = 0; s < samples; ++s) {
            std::vector<Elem> cs;
            for (int i = 0; i < ell; ++i) cs.push_back(rng.poly(tw, L, -1, 3));
            LElement z(ext.data(), cs);
            if (z.is_exact_zero()) z = ext.y();
            std::vector<LEntry> entries{z};
            for (int i = 1; i < L; ++i) entries.emplace_back(rng.nonzero_poly(tw, L, -1, 3));
            const KClass n = k_norm({LSymbolTerm{1, entries}}, ext);
            ++r.kernel_samples;
            if (psi(ext, n, M).is_identity())
                ++r.kernel_passed;
            else
                r.kernel_failures.push_back(n.to_string());
        }
        return 0;
    });
    r.verified = r.index_upper.bound == ell && r.psi_image_order == ell && r.kernel_passed == r.kernel_samples;
    if (r.verified)
        r.verdict = "isomorphism verified";
    else if (r.psi_image_order != ell)
        r.verdict = "failed: psi is not surjective";
    else
        r.verdict = "failed: a norm pairs nontrivially";
    return r;
}

IdentityReport symbol_identity_check(const Elem& alpha, const Elem& beta, int ell,
                                     const std::vector<CyclicExt>& probes, int M) {
    const Tower& tw = alpha.tower();
    const int L = std::max(alpha.level(), beta.level());
    const Elem a = alpha.level() < L ? alpha.lift(L) : alpha;
    const Elem b = beta.level() < L ? beta.lift(L) : beta;
    const Elem one = Elem::one(tw, L);
    if (a.is_exact_zero() || (a - one).is_exact_zero()) throw DomainError("alpha must differ from 0 and 1");
    if ((b - one).is_exact_zero()) throw DomainError("beta must differ from 1");
    if ((a * b - one).is_exact_zero()) throw DomainError("beta must differ from 1/alpha");
    // both sides at level n (entries lifted from level L)
    auto sides = [&](int n) {
        const Elem x = n > L ? a.lift(n) : a, y = n > L ? b.lift(n) : b, e = Elem::one(tw, n);
        const Elem xy = x * y;
        KClass lhs = KClass::symbol({e - x, e - y}, ell);
        KClass rhs = KClass::symbol({e - xy, -x}, ell) + KClass::symbol({e - xy, e - y}, ell) -
                     KClass::symbol({e - xy, e - x}, ell);
        return std::pair{lhs, rhs};
    };
    IdentityReport r;
    r.pairings_vanish = true;
    for (const auto& pr : probes) {
        // characters pair K_2 into H^3, so probes live on the two-dimensional level
        if (pr.ell() != ell || pr.level() != 2 || pr.level() < L)
            throw DomainError("probe characters must be degree-ell characters of a two-dimensional level");
        const auto [lhs, rhs] = sides(pr.level());
        const InvValue v = cup_pair(character(pr), lhs - rhs, M);
        r.probe_values.push_back(v);
        if (!v.is_zero()) r.pairings_vanish = false;
    }
    const auto [lhs, rhs] = sides(L);
    r.normal_forms = lhs.compare(rhs, M);
    return r;
}

}  // namespace hlcf
