#include "doctest.h"

#include "hlcf/errors.hpp"
#include "hlcf/kgroup.hpp"
#include "hlcf/parse.hpp"
#include "hlcf/random.hpp"

using namespace hlcf;

namespace {

const Tower& tower(int p, int f, std::vector<std::string> vars, int prec = 8) {
    FieldConfig cfg;
    cfg.p = p;
    cfg.f = f;
    cfg.vars = vars;
    cfg.prec.assign(vars.size(), prec);
    return Tower::get(cfg);
}

Elem E(const Tower& K, const char* s) { return parse_elem(K, s); }

// Tr Res(a dlog e_1 ^ ... ^ dlog e_d) summed over the class, in Z/p.
int pairing(const Elem& a, const KClass& xi) {
    const Tower& K = xi.tower();
    long total = 0;
    for (const auto& [key, term] : xi.terms()) {
        DiffForm w = DiffForm::function(a);
        for (const auto& e : term.second) w = w.wedge(dlog(e));
        total += static_cast<long>(term.first) * K.field().trace(residue(w));
    }
    return static_cast<int>(((total % K.p()) + K.p()) % K.p());
}

Elem random_nonzero(Rng& rng, const Tower& K, int level) {
    return rng.nonzero_poly(K, level, rng.range(-2, 1), rng.range(1, 3));
}

}  // namespace

TEST_CASE("symbols reject zero entries") {
    const Tower& K = tower(2, 1, {"t"});
    CHECK_THROWS_AS(KClass::symbol({E(K, "t"), E(K, "0")}, 2), DomainError);
    CHECK_THROWS_AS(KClass(K, 1, 2, 4), DomainError);
}

TEST_CASE("Steinberg relation") {
    SUBCASE("level one, 200 samples") {
        for (int p : {2, 3}) {
            const Tower& K = tower(p, 1, {"t"});
            Rng rng(100 + p);
            int checked = 0;
            while (checked < 200) {
                Elem a = random_nonzero(rng, K, 1);
                Elem b = Elem::one(K, 1) - a;
                if (b.is_exact_zero()) continue;
                ++checked;
                CHECK(KClass::symbol({a, b}, p).normal_form().is_zero());
            }
        }
    }
    SUBCASE("level two") {
        for (auto [p, f] : {std::pair{2, 1}, {3, 1}, {2, 2}}) {
            const Tower& K = tower(p, f, {"t", "u"});
            Rng rng(200 + p + f);
            int checked = 0;
            while (checked < 25) {
                Elem a = rng.nonzero_poly(K, 2, rng.range(-1, 1), 2);
                Elem b = Elem::one(K, 2) - a;
                if (b.is_exact_zero()) continue;
                ++checked;
                KNormalForm nf = KClass::symbol({a, b}, p).normal_form(4);
                CHECK_MESSAGE(nf.is_zero(), symbol_text({a, b}), " -> ", nf.to_string(K));
            }
        }
    }
    SUBCASE("prime-to-p modulus") {
        const Tower& K = tower(2, 2, {"t", "u"});
        Rng rng(7);
        for (int i = 0; i < 200; ++i) {
            Elem a = rng.nonzero_poly(K, 2, rng.range(-2, 1), rng.range(1, 3));
            Elem b = Elem::one(K, 2) - a;
            if (b.is_exact_zero()) continue;
            CHECK(KClass::symbol({a, b}, 3).normal_form().is_zero());
        }
    }
}

TEST_CASE("{a, a} = {a, -1}") {
    // prime to p: {t, t} = {t, -1} is nonzero over F_3((t))((u)) mod 2
    const Tower& K = tower(3, 1, {"t", "u"});
    KClass tt = KClass::symbol({E(K, "t"), E(K, "t")}, 2);
    KClass tm = KClass::symbol({E(K, "t"), E(K, "-1")}, 2);
    CHECK_FALSE(tt.normal_form().is_zero());
    CHECK(tt.compare(tm) == Comparison::Equal);
    // p = 2: both vanish
    const Tower& K2 = tower(2, 1, {"t", "u"});
    Rng rng(5);
    for (int i = 0; i < 20; ++i) {
        Elem a = rng.nonzero_poly(K2, 2, rng.range(-1, 1), 2);
        CHECK(KClass::symbol({a, a}, 2).normal_form(4).is_zero());
        CHECK(KClass::symbol({a, E(K2, "-1")}, 2).normal_form(4).is_zero());
    }
}

TEST_CASE("bilinearity") {
    const Tower& K = tower(3, 1, {"t", "u"});
    Rng rng(11);
    for (int i = 0; i < 15; ++i) {
        Elem a = rng.nonzero_poly(K, 2, rng.range(-1, 1), 2);
        Elem b = rng.nonzero_poly(K, 2, rng.range(-1, 1), 2);
        Elem c = rng.nonzero_poly(K, 2, rng.range(-1, 1), 2);
        KClass x = KClass::symbol({a * b, c}, 3) - KClass::symbol({a, c}, 3) - KClass::symbol({b, c}, 3);
        CHECK(x.normal_form(4).is_zero());
        KClass y = KClass::symbol({c, a * b}, 3) - KClass::symbol({c, a}, 3) - KClass::symbol({c, b}, 3);
        CHECK(y.normal_form(4).is_zero());
        // antisymmetry
        KClass z = KClass::symbol({a, b}, 3) + KClass::symbol({b, a}, 3);
        CHECK(z.normal_form(4).is_zero());
    }
    // {t x, y} = {t, y} + {x, y}
    const Tower& K2 = tower(2, 1, {"t", "u"});
    KClass lhs = KClass::symbol({E(K2, "t*(1+u)"), E(K2, "u + t")}, 2);
    KClass rhs = KClass::symbol({E(K2, "t"), E(K2, "u + t")}, 2) + KClass::symbol({E(K2, "1+u"), E(K2, "u + t")}, 2);
    CHECK(lhs.compare(rhs, 5) != Comparison::Different);
    CHECK((lhs - rhs).normal_form(5).is_zero());
}

TEST_CASE("normal forms detect nonzero classes and keep pairings") {
    const Tower& K = tower(2, 1, {"t", "u"});
    // {t, u} pairs to 1 with the constant character 1
    KClass tu = KClass::symbol({E(K, "t"), E(K, "u")}, 2);
    CHECK_FALSE(tu.normal_form().is_zero());
    CHECK(pairing(E(K, "1"), tu) == 1);
    // {1 + t u, t} pairs nontrivially with u^-1 t^-1 ... and with u^-1
    KClass g = KClass::symbol({E(K, "1 + t*u"), E(K, "u")}, 2);
    CHECK_FALSE(g.normal_form().is_zero());
    Rng rng(3);
    const std::vector<Elem> chars{E(K, "1"), E(K, "u^-1"), E(K, "t^-1*u^-1"), E(K, "t*u^-2"), E(K, "u^-2 + t^-1"),
                                  E(K, "t^-1*u^-3")};
    for (int i = 0; i < 15; ++i) {
        Elem a = rng.nonzero_poly(K, 2, rng.range(-1, 1), 2);
        Elem b = rng.nonzero_poly(K, 2, rng.range(-1, 1), 2);
        KClass xi = KClass::symbol({a, b}, 2);
        KNormalForm nf = xi.normal_form(5);
        KClass back = from_normal_form(K, nf);
        for (const auto& c : chars) CHECK_MESSAGE(pairing(c, xi) == pairing(c, back), symbol_text({a, b}));
    }
    // a class with vanishing normal form pairs to zero
    for (const auto& c : chars)
        CHECK(pairing(c, KClass::symbol({E(K, "t + u"), E(K, "1 - t - u")}, 2)) == 0);
}

TEST_CASE("tame boundary") {
    SUBCASE("prime to p") {
        const Tower& K = tower(2, 2, {"t", "u"});
        // d{u, t} = (0, t)
        Gr0Parts b = tame_boundary(KClass::symbol({E(K, "u"), E(K, "t")}, 3));
        CHECK(b.main.normal_form().is_zero());
        CHECK(b.aux.compare(KClass::symbol({parse_elem(K, "t", 1)}, 3)) == Comparison::Equal);
        // d{c, t} with both units: lands in K_2(F)
        Gr0Parts c = tame_boundary(KClass::symbol({E(K, "z"), E(K, "t")}, 3));
        CHECK(c.aux.normal_form().is_zero());
        CHECK(c.main.compare(KClass::symbol({parse_elem(K, "z", 1), parse_elem(K, "t", 1)}, 3)) ==
              Comparison::Equal);
        CHECK_FALSE(c.main.normal_form().is_zero());
        // principal units vanish
        Gr0Parts e = tame_boundary(KClass::symbol({E(K, "1 + u*t"), E(K, "t + u")}, 3));
        CHECK(e.main.normal_form().is_zero());
        CHECK(e.aux.normal_form().is_zero());
    }
    SUBCASE("p-part") {
        const Tower& K = tower(2, 1, {"t", "u"});
        Gr0Parts b = tame_boundary(KClass::symbol({E(K, "u"), E(K, "1 + t")}, 2));
        CHECK(b.main.normal_form().is_zero());
        CHECK(b.aux.compare(KClass::symbol({parse_elem(K, "1 + t", 1)}, 2)) != Comparison::Different);
        CHECK_FALSE(b.aux.normal_form().is_zero());
        Gr0Parts e = tame_boundary(KClass::symbol({E(K, "1 + u*t"), E(K, "t")}, 2));
        CHECK(e.main.normal_form().is_zero());
        CHECK(e.aux.normal_form().is_zero());
    }
    SUBCASE("additive and inverted by symbol_from_gr0 on generators") {
        const Tower& K = tower(3, 2, {"t", "u"});
        const int ell = 2;
        std::vector<Elem> gens{E(K, "t"), E(K, "u"), E(K, "z"), E(K, "z*t"), E(K, "u*t^2")};
        for (const auto& a : gens)
            for (const auto& b : gens) {
                KClass xi = KClass::symbol({a, b}, ell);
                Gr0Parts parts = tame_boundary(xi);
                CHECK(symbol_from_gr0(parts, 2).compare(xi) == Comparison::Equal);
                for (const auto& c : gens) {
                    KClass eta = KClass::symbol({b, c}, ell);
                    Gr0Parts s = tame_boundary(xi + eta), p1 = tame_boundary(eta);
                    CHECK(s.main.compare(parts.main + p1.main) == Comparison::Equal);
                    CHECK(s.aux.compare(parts.aux + p1.aux) == Comparison::Equal);
                }
            }
    }
}

TEST_CASE("graded expansion") {
    SUBCASE("{1 + t^m x, t} gives x as the aux part") {
        const Tower& K = tower(3, 2, {"t"});
        for (int m : {1, 2, 4}) {
            Elem x = parse_elem(K, "z + 1", 0);
            Elem g = Elem::one(K, 1) + x.lift(1) * E(K, "t").pow(m);
            GradedRep r = graded_expand(KClass::symbol({g, E(K, "t")}, 3), m);
            REQUIRE(r.aux);
            CHECK(r.main.is_zero());
            CHECK(r.aux->coeff(0).agrees_with(x));
        }
    }
    SUBCASE("{1 + u^m x, t} gives x dlog t") {
        const Tower& K = tower(2, 1, {"t", "u"});
        for (int m : {1, 2, 3}) {
            Elem x = parse_elem(K, "t + t^-1 + t^3", 1);
            Elem g = Elem::one(K, 2) + x.lift(2) * E(K, "u").pow(m);
            GradedRep r = graded_expand(KClass::symbol({g, E(K, "t")}, 2), m);
            CHECK(r.main.agrees_with(DiffForm::monomial(x, {1})));
            CHECK(r.aux->is_zero());
        }
    }
    SUBCASE("not in U_m") {
        const Tower& K = tower(2, 1, {"t", "u"});
        CHECK_THROWS_AS(graded_expand(KClass::symbol({E(K, "t"), E(K, "u")}, 2), 1), FiltrationError);
        CHECK_THROWS_AS(graded_expand(KClass::symbol({E(K, "1 + t*u"), E(K, "u")}, 2), 2), FiltrationError);
    }
    SUBCASE("round trip and additivity") {
        const Tower& K = tower(3, 1, {"t", "u"});
        Rng rng(21);
        for (int i = 0; i < 10; ++i) {
            const int m = rng.range(1, 3);
            auto unit = [&] {
                Elem x = rng.poly(K, 1, -1, 3);
                Elem y = rng.poly(K, 1, -1, 3);
                return Elem::one(K, 2) + x.lift(2) * E(K, "u").pow(m) + y.lift(2) * E(K, "u").pow(m + 1);
            };
            Elem other = rng.nonzero_poly(K, 2, 0, 2);
            KClass xi = KClass::symbol({unit(), other}, 3);
            KClass eta = KClass::symbol({unit(), E(K, "t")}, 3);
            GradedRep r = graded_expand(xi, m, 4);
            KClass back = symbol_from_form(r, 3);
            KNormalForm diff = (back - xi).normal_form(4);
            CHECK_MESSAGE(diff.vanishes_through(m), "m=", m, " xi=", xi.to_string(), " rep=", r.main.to_string(), " | ",
                          r.aux->to_string(), " diff=", diff.to_string(K), " T=", diff.box.T, " w=", diff.box.weight[0]);
            GradedRep s = canonical_graded(graded_expand(xi + eta, m, 4));
            GradedRep a = canonical_graded(graded_expand(xi, m, 4));
            GradedRep b = canonical_graded(graded_expand(eta, m, 4));
            CHECK(s.main.agrees_with(a.main + b.main));
            CHECK(s.aux->agrees_with(*a.aux + *b.aux));
        }
    }
}

TEST_CASE("K_2 of a local field is p-divisible") {
    const Tower& K = tower(2, 1, {"t"});
    CHECK(KClass::symbol({E(K, "t"), E(K, "1 + t")}, 2).normal_form().is_zero());
    const Tower& K3 = tower(3, 2, {"t"});
    CHECK(KClass::symbol({E(K3, "z"), E(K3, "t")}, 3).normal_form().is_zero());
    for (auto [p, f] : {std::pair{2, 1}, {3, 1}, {2, 2}, {5, 1}}) {
        const Tower& F = tower(p, f, {"t"}, 10);
        DivisibilityReport r = p_divisibility_check(F, 1, 100, 17, 8);
        CHECK(r.samples == 100);
        CHECK(r.nonzero == 0);
        CHECK(r.zero + r.inconclusive == 100);
        CHECK(r.zero >= 90);
    }
}
