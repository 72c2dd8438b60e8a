#include "doctest.h"

#include "hlcf/errors.hpp"
#include "hlcf/forms.hpp"
#include "hlcf/parse.hpp"
#include "hlcf/random.hpp"

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

DiffForm top(const Elem& x) {
    std::vector<int> idx;
    for (int k = 1; k <= x.level(); ++k) idx.push_back(k);
    return DiffForm::monomial(x, idx);
}

}  // namespace

TEST_CASE("p-base and collapse above the top degree") {
    const Tower& K = tower(3, 1, {"t", "u"});
    PBase B1(K, 1);
    CHECK(B1.size() == 1);
    CHECK(B1.elems().front() == parse_elem(K, "t", 1));
    PBase B0(K, 0);
    CHECK(B0.elems().empty());

    Elem a = parse_elem(K, "1 + t", 1), b = parse_elem(K, "t^2 - t^5", 1);
    CHECK(dlog(a).wedge(dlog(b)).is_zero());
    CHECK(dlog(a).wedge(dlog(b)).degree() == 2);
    CHECK(DiffForm::monomial(Elem::one(K, 1), {1, 1}).is_zero());
    CHECK(dlog(Elem::constant(K, 0, K.field().from_int(2))).is_zero());
    // Swapping two dlogs flips the sign.
    Elem one2 = Elem::one(K, 2);
    CHECK((DiffForm::monomial(one2, {2, 1}) + DiffForm::monomial(one2, {1, 2})).is_zero());
}

TEST_CASE("d and dlog examples") {
    const Tower& K = tower(5, 1, {"t"});
    Elem t = parse_elem(K, "t");
    CHECK(d(t).agrees_with(DiffForm::monomial(t, {1})));
    CHECK(d(t.pow(5)).is_zero());
    CHECK(d(parse_elem(K, "3*t^10 + 2*t^-5 + 1")).is_zero());

    // Logarithmic derivative oracle: t*y'/y for y = t^2 (1 + t) is 2 + sum_{k>=1} (-1)^{k+1} t^k.
    DiffForm w = dlog(parse_elem(K, "t^2*(1+t)"));
    Elem x = w.coeff(1);
    CHECK(x.constant_term() == K.field().from_int(2));
    for (int k = 1; k < 10; ++k) CHECK(x.coeff(k).constant_value() == K.field().from_int(k % 2 ? 1 : -1));
    DiffForm split = DiffForm::monomial(Elem::from_int(K, 1, 2), {1}) + dlog(parse_elem(K, "1+t"));
    CHECK(w.agrees_with(split));
    CHECK_THROWS_AS(dlog(Elem::zero(K, 1)), DomainError);
}

TEST_CASE("dlog is a homomorphism and d is a differential") {
    Rng rng(17);
    for (auto* tw : {&tower(2, 2, {"t", "u"}), &tower(3, 1, {"t", "u"}), &tower(5, 1, {"t"})}) {
        const int L = tw->d();
        for (int i = 0; i < 100; ++i) {
            Elem a = rng.nonzero_poly(*tw, L, -2, 4), b = rng.nonzero_poly(*tw, L, -1, 3);
            CHECK(dlog(a * b).agrees_with(dlog(a) + dlog(b)));
            CHECK(d(d(a)).is_zero());
            CHECK(d(a * b).agrees_with(d(a) * b + d(b) * a));
        }
    }
}

TEST_CASE("inverse Cartier") {
    const Tower& K = tower(3, 2, {"t"});
    Elem t = parse_elem(K, "t");
    CHECK(inverse_cartier(dlog(t)).agrees_with(dlog(t)));
    CHECK(inverse_cartier(DiffForm::monomial(t, {1})).agrees_with(DiffForm::monomial(t.pow(3), {1})));
    Rng rng(5);
    for (auto* tw : {&K, &tower(2, 1, {"t", "u"})}) {
        const int L = tw->d();
        for (int i = 0; i < 100; ++i) {
            DiffForm w1 = d(rng.poly(*tw, L, -3, 5)), w2 = dlog(rng.nonzero_poly(*tw, L, -2, 3));
            CHECK(inverse_cartier(w1 + w2).agrees_with(inverse_cartier(w1) + inverse_cartier(w2)));
        }
    }
}

TEST_CASE("residue") {
    const Tower& K = tower(2, 2, {"t"});
    const FiniteField& F = K.field();
    for (FFElem c : F.elements()) CHECK(residue(DiffForm::monomial(Elem::constant(K, 1, c), {1})) == c);
    for (int k : {-3, -1, 1, 2, 5}) CHECK(residue(top(parse_elem(K, "t").pow(k))).is_zero());
    Rng rng(21);
    for (int i = 0; i < 50; ++i) CHECK(residue(d(rng.poly(K, 1, -6, 12))).is_zero());
    CHECK_THROWS_AS(residue(top(parse_elem(K, "t^-1").truncate(0))), PrecisionError);
}

TEST_CASE("quotient_reduce is well defined and onto Z/p") {
    for (auto* tw : {&tower(2, 2, {"t"}), &tower(3, 1, {"t"}), &tower(5, 1, {"t", "u"}), &tower(2, 1, {"t", "u"})}) {
        const FiniteField& F = tw->field();
        const int L = tw->d();
        for (FFElem c : F.elements())
            CHECK(quotient_reduce(top(Elem::constant(*tw, L, c))) == F.trace(c));
        CHECK(quotient_reduce(top(Elem::constant(*tw, L, trace_one_element(F)))) == 1);

        Rng rng(31 + L);
        for (int i = 0; i < 100; ++i) {
            DiffForm w = top(rng.poly(*tw, L, -3, 6));
            DiffForm eta = top(rng.poly(*tw, L, -2, 4));
            Elem g = rng.poly(*tw, L, -3, 6);
            DiffForm xi = L == 1 ? DiffForm::function(g) : DiffForm::monomial(g, {1 + static_cast<int>(i % 2)});
            DiffForm pert = w + inverse_cartier(eta) - eta + d(xi);
            CHECK(quotient_reduce(pert) == quotient_reduce(w));
            DiffForm w2 = top(rng.poly(*tw, L, -2, 5));
            CHECK(quotient_reduce(w + w2) == (quotient_reduce(w) + quotient_reduce(w2)) % tw->p());
        }
    }
    const Tower& K = tower(3, 2, {"t"});
    for (FFElem c : K.field().elements()) {
        Elem x = Elem::constant(K, 0, c);
        CHECK(quotient_reduce(DiffForm::function(x)) == K.field().trace(c));
    }
    CHECK_THROWS_AS(quotient_reduce(DiffForm::function(parse_elem(K, "t"))), DomainError);
}

TEST_CASE("top forms decompose as (F-1)eta + d xi + representative") {
    for (auto* tw : {&tower(2, 2, {"t"}), &tower(3, 1, {"t", "u"}), &tower(7, 1, {"t"}), &tower(2, 1, {"t", "u"})}) {
        const int L = tw->d();
        const FFElem gamma = trace_one_element(tw->field());
        Rng rng(71 + tw->p());
        for (int i = 0; i < 40; ++i) {
            DiffForm w = top(rng.poly(*tw, L, -8, 14));
            auto dec = decompose_top_form(w);
            DiffForm rebuilt = inverse_cartier(dec.eta) - dec.eta + d(*dec.xi) +
                               top(Elem::constant(*tw, L, dec.rep));
            CHECK(rebuilt.agrees_with(w));
            CHECK(dec.rep == tw->field().from_int(quotient_reduce(w)) * gamma);
        }
    }
    const Tower& K = tower(3, 2, {"t"});
    for (FFElem c : K.field().elements()) {
        auto dec = decompose_top_form(DiffForm::function(Elem::constant(K, 0, c)));
        CHECK(!dec.xi);
        CHECK((inverse_cartier(dec.eta) - dec.eta).coeff(0).constant_value() + dec.rep == c);
    }
}

TEST_CASE("membership in the Artin-Schreier image") {
    Rng rng(13);
    for (auto* tw : {&tower(2, 1, {"t"}), &tower(3, 2, {"t"}), &tower(2, 1, {"t", "u"}), &tower(3, 1, {"t", "u"})}) {
        const int L = tw->d();
        for (int i = 0; i < 40; ++i) {
            Elem y = rng.poly(*tw, L, -3, 6);
            Elem x = y.frobenius() - y;
            auto z = solve_artin_schreier(x);
            REQUIRE(z);
            CHECK((z->frobenius() - *z).agrees_with(x));
            CHECK(in_frobenius_image(top(x)));
        }
        CHECK(!solve_artin_schreier(parse_elem(*tw, tw->var(L) + "^-1")));
        FFElem gamma = trace_one_element(tw->field());
        CHECK(!solve_artin_schreier(Elem::constant(*tw, L, gamma)));
    }
    // Positive parts are always in the image: y = -(t + t^p + t^{p^2} + ...).
    const Tower& K = tower(2, 1, {"t"});
    auto z = solve_artin_schreier(parse_elem(K, "t"));
    REQUIRE(z);
    CHECK((z->frobenius() - *z).agrees_with(parse_elem(K, "t")));
    CHECK(z->coeff(1).constant_value().is_one());
    CHECK(z->coeff(2).constant_value().is_one());
    CHECK(z->coeff(3).constant_value().is_zero());
}

TEST_CASE("reduction modulo closed forms") {
    const Tower& K = tower(3, 1, {"t", "u"});
    Rng rng(31);
    for (int i = 0; i < 40; ++i) {
        Elem x = rng.poly(K, 2, -3, 5), y = rng.poly(K, 2, -3, 5), z = rng.poly(K, 2, -2, 4);
        DiffForm w = DiffForm::monomial(x, {1}) + DiffForm::monomial(y, {2});
        DiffForm rw = reduce_mod_closed(w);
        CHECK(reduce_mod_closed(d(z)).is_zero());
        CHECK(reduce_mod_closed(w + d(z)).agrees_with(rw));
        CHECK(reduce_mod_closed(rw).agrees_with(rw));
        // p-th power coefficients times dlogs are closed
        CHECK(reduce_mod_closed(DiffForm::monomial(x.frobenius(), {2})).is_zero());
        // the difference is closed
        CHECK(d(w - rw).is_zero());
        // top degree forms: only the closed part is removed
        DiffForm t2 = top(x);
        CHECK(d(t2 - reduce_mod_closed(t2)).is_zero());
    }
    // t dlog u has no exact part to remove, t dlog t = dt does
    CHECK(reduce_mod_closed(DiffForm::monomial(parse_elem(K, "t"), {1})).is_zero());
    DiffForm tu = DiffForm::monomial(parse_elem(K, "t"), {2});
    CHECK(reduce_mod_closed(tu).agrees_with(tu));
}
