#include "doctest.h"

#include <set>

#include "hlcf/errors.hpp"
#include "hlcf/parse.hpp"
#include "hlcf/random.hpp"
#include "hlcf/reciprocity.hpp"

using namespace hlcf;

namespace {

const Tower& tower(int p, int f, std::vector<std::string> vars, int prec = 12) {
    FieldConfig cfg;
    cfg.p = p;
    cfg.f = f;
    cfg.vars = vars;
    cfg.prec.assign(vars.size(), prec);
    return Tower::get(cfg);
}

Elem E(const Tower& K, const char* s) { return parse_elem(K, s); }

CyclicExt AS(const Tower& K, const char* a) { return CyclicExt::classify(ExtKind::ArtinSchreier, E(K, a), K.p()); }
CyclicExt KU(const Tower& K, const char* a, int ell) { return CyclicExt::classify(ExtKind::Kummer, E(K, a), ell); }

FFElem trace_one(const FiniteField& F) {
    for (const auto& c : F.elements())
        if (F.trace(c) == 1) return c;
    return F.zero();
}

}  // namespace

TEST_CASE("index bounds carry the case certificate") {
    const Tower& K2 = tower(2, 1, {"t"});
    CHECK(norm_index_upper(AS(K2, "1")).kind == "Gal(F_L/F)");
    CHECK(norm_index_upper(AS(K2, "t^-1")).kind == "order p quotient");
    CHECK(norm_index_upper(AS(K2, "t^-1")).bound == 2);
    const Tower& K4 = tower(2, 2, {"t"});
    IndexCertificate c = norm_index_upper(KU(K4, "t", 3));
    CHECK(c.kind == "K_d(F)/ell");
    CHECK(c.bound == 3);
    const Tower& K = tower(2, 1, {"t", "u"});
    CHECK(norm_index_upper(AS(K, "t*u^-2")).kind == "order p quotient");
}

TEST_CASE("classical case: unramified and wild over F_p((t))") {
    for (int p : {2, 3}) {
        const Tower& K = tower(p, 1, {"t"});
        const FiniteField& F = K.field();
        CyclicExt un = AS(K, "1");
        IsoReport r = verify_iso(un, 30, 1);
        CHECK(r.verified);
        CHECK(r.verdict == "isomorphism verified");
        CHECK(r.index_upper.bound == p);
        // Psi({t}) = Frobenius = sigma^{Tr c}, units map to the identity
        CHECK(psi(un, KClass::symbol({E(K, "t")}, p), 1) == GaloisElem{1, p});
        Rng rng(p);
        for (int i = 0; i < 30; ++i)
            CHECK(psi(un, KClass::symbol({rng.unit_poly(K, 1, 4)}, p), 1).is_identity());
        for (int i = 0; i < 30; ++i)
            CHECK(psi(un, KClass::symbol({Elem::constant(K, 1, rng.nonzero_field_elem(F))}, p), 1).is_identity());

        CyclicExt wild = AS(K, "t^-1");
        IsoReport w = verify_iso(wild, 30, 2);
        CHECK(w.verified);
        CHECK(w.index_upper.kind == "order p quotient");
        for (const auto& c : F.elements()) {
            Elem x = Elem::one(K, 1) + Elem::monomial(K, c, {1});
            CHECK(psi(wild, KClass::symbol({x}, p), 2).k == F.trace(c));
        }
        CHECK_THROWS_AS(verify_iso(wild, 5, 1), FiltrationError);
    }
}

TEST_CASE("tame case over F_4((t))") {
    const Tower& K = tower(2, 2, {"t"});
    const FiniteField& F = K.field();
    CyclicExt ext = KU(K, "t", 3);
    IsoReport r = verify_iso(ext, 30, 1);
    CHECK(r.verified);
    CHECK(r.index_upper.bound == 3);
    // surjective: g^k reaches every element
    std::set<int> image;
    for (int k = 0; k < 3; ++k)
        image.insert(psi(ext, KClass::symbol({Elem::constant(K, 1, F.primitive().pow(k))}, 3), 1).k);
    CHECK(image.size() == 3);
    // {t, x} against the tame symbol (-1)^{v(x)} t_0^{v(x)} / x_0 = 1 / x_0 in characteristic 2
    Rng rng(12);
    for (int i = 0; i < 50; ++i) {
        Elem x = rng.nonzero_poly(K, 1, -2, 4);
        const FFElem sym = x.leading_constant().inverse();
        CHECK(psi(ext, KClass::symbol({x}, 3), 1).k == static_cast<int>(F.dlog(sym) % 3));
    }
}

TEST_CASE("dimension two: four extensions") {
    const Tower& K = tower(2, 1, {"t", "u"});
    const Tower& K4 = tower(2, 2, {"t", "u"});
    struct Case {
        CyclicExt ext;
        int M;
        const char* kind;
    };
    std::vector<Case> cases{{AS(K, "1"), 1, "Gal(F_L/F)"},
                            {KU(K4, "u", 3), 1, "K_d(F)/ell"},
                            {AS(K, "u^-1"), 2, "order p quotient"},
                            {AS(K, "t*u^-2"), 3, "order p quotient"}};
    CHECK(cases[0].ext.ramification() == Ramification::Unramified);
    CHECK(cases[1].ext.ramification() == Ramification::Tame);
    CHECK(cases[2].ext.ramification() == Ramification::Wild);
    CHECK(cases[3].ext.ramification() == Ramification::Ferocious);
    for (auto& c : cases) {
        IsoReport r = verify_iso(c.ext, 20, c.M, 7);
        CHECK_MESSAGE(r.verified, r.ext);
        CHECK(r.index_upper.kind == c.kind);
        CHECK(r.psi_image_order == c.ext.ell());
        CHECK(r.kernel_passed == 20);
        // witness stability above the threshold
        for (int M = c.M; M <= c.M + 2; ++M) CHECK_FALSE(psi(c.ext, nonnorm_witness(c.ext, M), M).is_identity());
        if (c.ext.conductor() > 0) CHECK_THROWS_AS(verify_iso(c.ext, 1, c.ext.conductor() - 1), FiltrationError);
    }
    // Psi({t, u}) = Frobenius for the unramified extension
    CHECK(psi(cases[0].ext, KClass::symbol({E(K, "t"), E(K, "u")}, 2), 1) == GaloisElem{1, 2});
}

TEST_CASE("psi is additive and kills norms and high units") {
    const Tower& K = tower(2, 1, {"t", "u"});
    Rng rng(31);
    for (const char* a : {"u^-1", "t*u^-2", "t^-1*u^-3"}) {
        CyclicExt ext = AS(K, a);
        const int M = ext.conductor();
        for (int s = 0; s < 30; ++s) {
            KClass x = KClass::symbol({rng.nonzero_poly(K, 2, -1, 3), rng.nonzero_poly(K, 2, -1, 3)}, 2);
            KClass y = KClass::symbol({rng.nonzero_poly(K, 2, -1, 3), rng.nonzero_poly(K, 2, -1, 3)}, 2);
            CHECK(psi(ext, x + y, M) == psi(ext, x, M) + psi(ext, y, M));
            // U_{i+1}
            Elem hi = Elem::one(K, 2) + Elem::var(K, 2, 2).pow(M) * rng.unit_poly(K, 1, 3).lift(2);
            CHECK(psi(ext, KClass::symbol({hi, rng.nonzero_poly(K, 2, -1, 3)}, 2), M).is_identity());
        }
        IsoReport r = verify_iso(ext, 30, M, 3);
        CHECK(r.kernel_passed == r.kernel_samples);
    }
    // norms of L-symbols from the two-entry generator shape
    CyclicExt ext = AS(K, "u^-1");
    const LElement pi = ext.pi_L();
    for (int s = 0; s < 10; ++s) {
        Elem x = rng.unit_poly(K, 2, 3);
        LElement g = ext.lift(Elem::one(K, 2)) + pi * x;
        CHECK(psi(ext, k_norm({LSymbolTerm{1, {g, pi}}}, ext), 2).is_identity());
    }
}

TEST_CASE("the certificate map is a homomorphism onto Z/p") {
    const Tower& K = tower(2, 2, {"t", "u"});
    const FiniteField& F = K.field();
    Rng rng(41);
    for (const char* a : {"u^-1", "t*u^-2"}) {
        CyclicExt ext = AS(K, a);
        const int M = ext.conductor();
        auto form = [&](const Elem& x) { return DiffForm::monomial(x, {1}); };
        int hits = 0;
        for (int s = 0; s < 30; ++s) {
            Elem x1 = rng.poly(K, 1, -2, 5), x2 = rng.poly(K, 1, -2, 5);
            const DiffForm w1 = form(x1), w2 = form(x2);
            GaloisElem g1 = psi(ext, certificate_symbol(ext, w1), M);
            GaloisElem g2 = psi(ext, certificate_symbol(ext, w2), M);
            CHECK(psi(ext, certificate_symbol(ext, w1 + w2), M) == g1 + g2);
            // the map factors through rho
            CHECK(g1.is_identity() == (quotient_reduce(w1) == 0));
            hits += !g1.is_identity();
        }
        CHECK(hits > 0);
        CHECK_FALSE(psi(ext, certificate_symbol(ext, form(Elem::constant(K, 1, trace_one(F)))), M).is_identity());
    }
}

TEST_CASE("the K_2 symbol identity") {
    const Tower& K = tower(2, 1, {"t", "u"});
    std::vector<CyclicExt> probes{AS(K, "u^-1"), AS(K, "t*u^-2"), AS(K, "t^-1*u^-3 + u^-1"), AS(K, "1")};
    Rng rng(2024);
    auto admissible = [](const Elem& a, const Elem& b) {
        const Elem one = Elem::one(a.tower(), a.level());
        return !(a - one).is_exact_zero() && !(b - one).is_exact_zero() && !(a * b - one).is_exact_zero();
    };
    // one-dimensional alpha, beta (level 1) lifted for the pairing
    for (int checked = 0; checked < 60;) {
        Elem a = rng.nonzero_poly(K, 1, -2, 5), b = rng.nonzero_poly(K, 1, -2, 5);
        if (!admissible(a, b)) continue;
        IdentityReport r = symbol_identity_check(a, b, 2, probes, 6);
        CHECK(r.pairings_vanish);
        CHECK(r.normal_forms != Comparison::Different);
        ++checked;
    }
    int nonzero_lhs = 0;
    for (int checked = 0; checked < 40;) {
        Elem a = rng.nonzero_poly(K, 2, -1, 3), b = rng.nonzero_poly(K, 2, -1, 3);
        if (!admissible(a, b)) continue;
        IdentityReport r = symbol_identity_check(a, b, 2, probes, 6);
        CHECK(r.probe_values.size() == probes.size());
        CHECK(r.pairings_vanish);
        const Elem one = Elem::one(K, 2);
        for (const auto& pr : probes)
            nonzero_lhs += !cup_pair(character(pr), KClass::symbol({one - a, one - b}, 2), 6).is_zero();
        ++checked;
    }
    // the battery detects the individual sides
    CHECK(nonzero_lhs > 10);
    CHECK_THROWS_AS(symbol_identity_check(E(K, "t"), E(K, "t^-1"), 2, probes, 6), DomainError);
    CHECK_THROWS_AS(symbol_identity_check(E(K, "1"), E(K, "t"), 2, probes, 6), DomainError);
    CHECK_THROWS_AS(symbol_identity_check(E(K, "t"), E(K, "1"), 2, probes, 6), DomainError);
    CHECK_THROWS_AS(symbol_identity_check(E(K, "t"), E(K, "u"), 2, probes, 1), FiltrationError);
}
