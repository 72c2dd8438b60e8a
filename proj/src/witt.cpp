#include "hlcf/witt.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <map>
#include <memory>
#include <mutex>

namespace hlcf {

namespace {

using boost::multiprecision::cpp_int;
using Monomial = std::vector<std::uint16_t>;

struct IntPoly {
    std::map<Monomial, cpp_int> terms;

    static IntPoly var(int nvars, int v, int power = 1) {
        IntPoly r;
        Monomial m(nvars, 0);
        m[v] = static_cast<std::uint16_t>(power);
        r.terms[m] = 1;
        return r;
    }

    IntPoly& add(const IntPoly& o, const cpp_int& scale = 1) {
        for (const auto& [m, c] : o.terms) {
            cpp_int& slot = terms[m];
            slot += c * scale;
            if (slot == 0) terms.erase(m);
        }
        return *this;
    }

    IntPoly mul(const IntPoly& o) const {
        IntPoly r;
        for (const auto& [ma, ca] : terms)
            for (const auto& [mb, cb] : o.terms) {
                Monomial m(ma.size());
                for (std::size_t i = 0; i < m.size(); ++i) m[i] = ma[i] + mb[i];
                cpp_int& slot = r.terms[m];
                slot += ca * cb;
                if (slot == 0) r.terms.erase(m);
            }
        return r;
    }

    IntPoly pow(int e, int nvars) const {
        IntPoly result;
        result.terms[Monomial(nvars, 0)] = 1;
        IntPoly base = *this;
        while (e > 0) {
            if (e & 1) result = result.mul(base);
            e >>= 1;
            if (e) base = base.mul(base);
        }
        return result;
    }

    void divide_exact(const cpp_int& d) {
        for (auto& [m, c] : terms) {
            if (c % d != 0) throw std::logic_error("Witt polynomial recursion is not integral");
            c /= d;
        }
    }

    std::vector<ModPTerm> reduce(int p) const {
        std::vector<ModPTerm> out;
        for (const auto& [m, c] : terms) {
            cpp_int r = c % p;
            if (r < 0) r += p;
            if (r != 0) out.push_back({static_cast<int>(r), m});
        }
        return out;
    }
};

cpp_int ipow(int b, int e) {
    cpp_int r = 1;
    for (int i = 0; i < e; ++i) r *= b;
    return r;
}

int ipow_small(int b, int e) {
    int r = 1;
    for (int i = 0; i < e; ++i) r *= b;
    return r;
}

// w_k over the variable block starting at `offset`.
IntPoly ghost(int p, int k, int nvars, int offset) {
    IntPoly r;
    for (int j = 0; j <= k; ++j) r.add(IntPoly::var(nvars, offset + j, ipow_small(p, k - j)), ipow(p, j));
    return r;
}

// Solves w_k(Z) = target_k for Z_k given Z_0..Z_{k-1}.
std::vector<IntPoly> solve_ghost(int p, int n, int nvars, const std::vector<IntPoly>& target) {
    std::vector<IntPoly> z;
    for (int k = 0; k < n; ++k) {
        IntPoly rest = target[k];
        for (int j = 0; j < k; ++j) rest.add(z[j].pow(ipow_small(p, k - j), nvars), -ipow(p, j));
        rest.divide_exact(ipow(p, k));
        z.push_back(std::move(rest));
    }
    return z;
}

std::unique_ptr<WittPolynomials> build(int p, int n) {
    const int nvars = 2 * n;
    std::vector<IntPoly> sum_t, prod_t, neg_t;
    for (int k = 0; k < n; ++k) {
        IntPoly gx = ghost(p, k, nvars, 0);
        IntPoly gy = ghost(p, k, nvars, n);
        sum_t.push_back(IntPoly(gx).add(gy));
        prod_t.push_back(gx.mul(gy));
        neg_t.push_back(IntPoly().add(gx, -1));
    }
    auto out = std::make_unique<WittPolynomials>();
    out->p = p;
    out->n = n;
    for (auto& poly : solve_ghost(p, n, nvars, sum_t)) out->sum.push_back(poly.reduce(p));
    for (auto& poly : solve_ghost(p, n, nvars, prod_t)) out->prod.push_back(poly.reduce(p));
    for (auto& poly : solve_ghost(p, n, nvars, neg_t)) out->neg.push_back(poly.reduce(p));
    return out;
}

// Component k of (F - 1)x depends on x_0..x_k and equals x_k^p - x_k + g(x_0..x_{k-1}).
bool asw_dfs(const WittVector<FFElem>& w, const FiniteField& big, std::vector<FFElem>& prefix,
             std::vector<WittVector<FFElem>>& out, std::size_t limit) {
    const int n = w.length();
    const int k = static_cast<int>(prefix.size());
    if (k == n) {
        out.emplace_back(prefix);
        return out.size() >= limit;
    }
    std::vector<FFElem> trial = prefix;
    trial.resize(n, big.zero());
    FFElem g = WittVector<FFElem>(trial).artin_schreier()[k];
    FFElem rhs = w[k] - g;
    for (FFElem x : big.elements()) {
        if (x.pow(big.p()) - x != rhs) continue;
        prefix.push_back(x);
        bool done = asw_dfs(w, big, prefix, out, limit);
        prefix.pop_back();
        if (done) return true;
    }
    return false;
}

std::vector<WittVector<FFElem>> solve_in(const WittVector<FFElem>& w, const FieldEmbedding& emb,
                                         std::size_t limit) {
    if (w[0].field != &emb.small()) throw DomainError("embedding does not start at the field of w");
    std::vector<FFElem> mapped;
    for (const auto& c : w.comps()) mapped.push_back(emb.map(c));
    WittVector<FFElem> wb(mapped);
    std::vector<FFElem> prefix;
    std::vector<WittVector<FFElem>> out;
    asw_dfs(wb, emb.big(), prefix, out, limit);
    return out;
}

}  // namespace

const WittPolynomials& WittPolynomials::get(int p, int n) {
    if (n < 1 || n > WittVector<FFElem>::kMaxLength) throw DomainError("Witt vector length must lie in 1..3");
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::unique_ptr<WittPolynomials>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[{p, n}];
    if (!slot) slot = build(p, n);
    return *slot;
}

std::vector<WittVector<FFElem>> asw_solutions(const WittVector<FFElem>& w, const FieldEmbedding& emb) {
    return solve_in(w, emb, static_cast<std::size_t>(-1));
}

AswSolution asw_solve(const WittVector<FFElem>& w, int max_deg) {
    const FiniteField& base = *w[0].field;
    for (int e = 1; e <= max_deg; ++e) {
        FieldEmbedding emb = FieldEmbedding::extension(base, e);
        auto sols = solve_in(w, emb, 1);
        if (!sols.empty()) return {sols.front(), e, emb};
    }
    throw DomainError("no solution of (F - 1)x = w over extensions of degree <= " + std::to_string(max_deg));
}

}  // namespace hlcf
