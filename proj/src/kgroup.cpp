#include "hlcf/kgroup.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <sstream>

#include "hlcf/errors.hpp"
#include "hlcf/random.hpp"

namespace hlcf {

namespace {

using Mask = DiffForm::Mask;
using Key = std::vector<int>;  // exponents, outermost first

long pmod(long long a, long long m) {
    a %= m;
    return static_cast<long>(a < 0 ? a + m : a);
}

Mask bit(int k) { return 1u << (k - 1); }

/// Sorts ks ascending; returns the permutation sign, or 0 on a repeat.
int sort_sign(std::vector<int>& ks) {
    int sign = 1;
    for (std::size_t i = 1; i < ks.size(); ++i)
        for (std::size_t j = i; j > 0 && ks[j - 1] >= ks[j]; --j) {
            if (ks[j - 1] == ks[j]) return 0;
            std::swap(ks[j - 1], ks[j]);
            sign = -sign;
        }
    return sign;
}

Mask mask_of(const std::vector<int>& ks) {
    Mask m = 0;
    for (int k : ks) m |= bit(k);
    return m;
}

Key add_keys(const Key& a, const Key& b) {
    Key r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

Key scale_key(const Key& a, int j) {
    Key r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] * j;
    return r;
}

Key key_of(const std::vector<int>& exps) { return Key(exps.rbegin(), exps.rend()); }
std::vector<int> exps_of(const Key& key) { return std::vector<int>(key.rbegin(), key.rend()); }

/// Exponent of t_k (k = 1 innermost) inside a key.
int key_exp(const Key& key, int k) { return key[key.size() - k]; }

struct Atom {
    bool unit = false;
    int k = 0;
    Key E;
    FFElem c{};
};

bool same_atom(const Atom& a, const Atom& b) {
    if (a.unit != b.unit) return false;
    if (!a.unit) return a.k == b.k;
    return a.E == b.E && a.c == b.c;
}

using EntryAtoms = std::vector<std::pair<long, Atom>>;

// ------------------------------------------------------------ box handling

/// a = c t^v w with w a principal unit.
struct Split {
    FFElem c;
    Key v;
    Elem w;
};

Split split_entry(const Elem& a) {
    const int L = a.level();
    Split s;
    s.v = a.valuation();
    s.c = a.leading_constant();
    Elem w = a.scale(s.c.inverse());
    for (int i = 0; i < L; ++i) w = w.shift(L - i, -s.v[i]);
    s.w = w;
    return s;
}

FiltrationBox make_box(const Tower& tw, int L, int M, const std::vector<Elem>& units) {
    FiltrationBox box;
    box.level = L;
    box.M = M;
    std::vector<long> lam(L + 1, 1);  // lam[k], k = 1 innermost
    for (int k = 2; k <= L; ++k) {
        long need = 1;
        for (const auto& w : units)
            for (const auto& t : monomial_terms(w)) {
                int top = 0;
                for (int j = L; j >= 1; --j)
                    if (t.exps[j - 1] != 0) {
                        top = j;
                        break;
                    }
                if (top != k || t.exps[L - 1] > M) continue;
                long rest = 0;
                for (int j = 1; j < k; ++j) rest += lam[j] * t.exps[j - 1];
                const long e = t.exps[k - 1];
                need = std::max(need, (1 - rest + e - 1) / e);
            }
        lam[k] = need;
    }
    box.weight.assign(L, 1);
    for (int k = 1; k <= L; ++k) box.weight[L - k] = lam[k];
    if (L <= 1) {
        box.T = static_cast<long>(M) + 1;
    } else {
        box.T = lam[L] * M;
        for (int k = 1; k < L; ++k) box.T += lam[k] * tw.prec(k);
    }
    return box;
}

/// Shrinks the box so that every unknown coefficient of w lies outside it.
void fit_precision(FiltrationBox& box, const Elem& w, long prefix, bool outermost) {
    const int r = w.level();
    if (r == 0) return;
    const long lam = box.weight[box.level - r];
    if (w.known_to() < Elem::kExact) {
        if (outermost) {
            box.M = std::min(box.M, w.known_to() - 1);
        } else if (r == 1) {
            box.T = std::min(box.T, prefix + lam * w.known_to());
        } else {
            throw PrecisionError("inexact middle-level coefficients are not supported by the normal form");
        }
    }
    for (std::size_t i = 0; i < w.coeffs().size(); ++i) {
        const int e = w.lo() + static_cast<int>(i);
        if (outermost && e > box.M) break;
        fit_precision(box, w.coeffs()[i], prefix + lam * e, false);
    }
}

using BoxPoly = std::map<Key, FFElem>;

/// Factors a principal unit (restricted to the box) as a product of
/// 1 + c t^E, E increasing.
std::vector<std::pair<Key, FFElem>> peel(BoxPoly w, const FiltrationBox& box, bool& tail) {
    std::vector<std::pair<Key, FFElem>> out;
    const Key zero(box.level, 0);
    for (;;) {
        auto it = w.begin();
        while (it != w.end() && (it->first == zero || it->second.is_zero())) ++it;
        if (it == w.end()) break;
        const Key E0 = it->first;
        const FFElem c0 = it->second;
        out.emplace_back(E0, c0);
        // w <- w / (1 + c0 t^E0)
        BoxPoly next = w;
        FFElem coef = c0.field->one();
        for (int j = 1;; ++j) {
            coef = -coef * c0;
            const Key Ej = scale_key(E0, j);
            if (box.weigh(Ej) >= box.T || Ej[0] > box.M) {
                tail = true;
                break;
            }
            for (const auto& [K, v] : w) {
                if (v.is_zero()) continue;
                Key nk = add_keys(K, Ej);
                if (!box.contains(nk)) {
                    tail = true;
                    continue;
                }
                auto& slot = next.try_emplace(nk, c0.field->zero()).first->second;
                slot += v * coef;
            }
        }
        for (auto i = next.begin(); i != next.end();)
            i = i->second.is_zero() && i->first != zero ? next.erase(i) : std::next(i);
        w = std::move(next);
    }
    return out;
}

// ------------------------------------------------------------ p-part engine

struct Item {
    long coef;
    FFElem c;
    Mask S;
};

class PEngine {
public:
    PEngine(const Tower& tw, int L, const FiltrationBox& box, int raw_m, int stop)
        : tw_(tw), L_(L), p_(tw.p()), box_(box), raw_m_(raw_m), stop_(stop) {}

    void expand(long coef, const std::vector<EntryAtoms>& entries) {
        std::vector<Atom> cur;
        expand_rec(coef, entries, 0, cur);
    }

    void run() {
        while (!queue_.empty()) {
            auto it = queue_.begin();
            Key E = it->first;
            std::vector<Item> items = std::move(it->second);
            queue_.erase(it);
            if (E[0] > stop_) break;
            process(E, std::move(items));
        }
    }

    KNormalForm nf;
    std::map<KNormalForm::UnitKey, FFElem> raw;
    bool tail = false;

private:
    void expand_rec(long coef, const std::vector<EntryAtoms>& entries, std::size_t i, std::vector<Atom>& cur) {
        if (coef % p_ == 0) return;
        if (i == entries.size()) {
            settle(coef, cur);
            return;
        }
        for (const auto& [mult, atom] : entries[i]) {
            bool dup = false;
            for (const auto& a : cur) dup = dup || same_atom(a, atom);
            if (dup) continue;  // {x, x} = {x, -1} and -1 is a p-th power
            cur.push_back(atom);
            expand_rec(pmod(coef * mult, p_), entries, i + 1, cur);
            cur.pop_back();
        }
    }

    void settle(long coef, std::vector<Atom> atoms) {
        std::vector<std::pair<long, std::vector<Atom>>> stack{{coef, std::move(atoms)}};
        while (!stack.empty()) {
            auto [c, a] = std::move(stack.back());
            stack.pop_back();
            c = pmod(c, p_);
            if (c == 0) continue;
            std::vector<int> units;
            for (std::size_t i = 0; i < a.size(); ++i)
                if (a[i].unit) units.push_back(static_cast<int>(i));
            bool dup = false;
            for (std::size_t i = 0; i < a.size() && !dup; ++i)
                for (std::size_t j = i + 1; j < a.size() && !dup; ++j) dup = same_atom(a[i], a[j]);
            if (dup) continue;
            if (units.empty()) {
                std::vector<int> ks;
                for (const auto& x : a) ks.push_back(x.k);
                const int s = sort_sign(ks);
                if (s == 0) continue;
                int& slot = nf.pure[mask_of(ks)];
                slot = static_cast<int>(pmod(slot + s * c, p_));
                if (slot == 0) nf.pure.erase(mask_of(ks));
                continue;
            }
            if (units.size() == 1) {
                const int i = units[0];
                const Atom u = a[i];
                std::vector<int> ks;
                for (std::size_t j = 0; j < a.size(); ++j)
                    if (static_cast<int>(j) != i) ks.push_back(a[j].k);
                const int s = sort_sign(ks);
                if (s == 0) continue;
                const long sign = (i % 2 ? -1 : 1) * s;
                push(u.E, Item{pmod(sign * c, p_), u.c, mask_of(ks)});
                continue;
            }
            // {1 - x, 1 - y, R} = {1 - xy, -x, R} + {1 - xy, 1 - y, R} - {1 - xy, 1 - x, R}
            const int i = units[0], j = units[1];
            const long sign = ((i % 2) ? -1 : 1) * (((j - 1) % 2) ? -1 : 1);
            const Atom g1 = a[i], g2 = a[j];
            std::vector<Atom> rest;
            for (std::size_t k = 0; k < a.size(); ++k)
                if (static_cast<int>(k) != i && static_cast<int>(k) != j) rest.push_back(a[k]);
            Atom G;
            G.unit = true;
            G.E = add_keys(g1.E, g2.E);
            G.c = -(g1.c * g2.c);
            if (!box_.contains(G.E)) {
                tail = true;
                continue;
            }
            auto with = [&](const Atom& second) {
                std::vector<Atom> v{G, second};
                v.insert(v.end(), rest.begin(), rest.end());
                return v;
            };
            const long cs = c * sign;
            for (int k = 1; k <= L_; ++k) {
                const int e = key_exp(g1.E, k);
                if (e % p_ == 0) continue;
                Atom t;
                t.k = k;
                stack.emplace_back(cs * e, with(t));
            }
            stack.emplace_back(cs, with(g2));
            stack.emplace_back(-cs, with(g1));
        }
    }

    void push(const Key& E, Item item) {
        if (!box_.contains(E)) {
            tail = true;
            return;
        }
        if (item.coef % p_ == 0 || item.c.is_zero()) return;
        queue_[E].push_back(item);
    }

    void process(const Key& E, std::vector<Item> items) {
        const bool raw = raw_m_ >= 0 && E[0] == raw_m_;
        if (!raw) {
            int pivot = 0;
            for (int k = L_; k >= 1; --k)
                if (pmod(key_exp(E, k), p_) != 0) {
                    pivot = k;
                    break;
                }
            if (pivot == 0) return;  // 1 + c t^E is a p-th power
            const long s = inverse_mod(pmod(key_exp(E, pivot), p_));
            std::vector<Item> reduced;
            for (const auto& it : items) {
                if (!(it.S & bit(pivot))) {
                    reduced.push_back(it);
                    continue;
                }
                // {m, t_S} = s1 {m, t_k*, t_S'} = -s1 s sum_k E_k {m, t_k, t_S'}
                const Mask rest = it.S & ~bit(pivot);
                const long s1 = wedge_sign(bit(pivot), rest);
                for (int k = 1; k <= L_; ++k) {
                    if (k == pivot || (it.S & bit(k))) continue;
                    const long e = pmod(key_exp(E, k), p_);
                    if (e == 0) continue;
                    const long coef = pmod(-s1 * s * e * wedge_sign(bit(k), rest) * it.coef, p_);
                    reduced.push_back(Item{coef, it.c, rest | bit(k)});
                }
            }
            items = std::move(reduced);
        }
        std::map<Mask, std::vector<Item>> groups;
        for (const auto& it : items) groups[it.S].push_back(it);
        for (const auto& [S, group] : groups) combine(E, S, group, raw);
    }

    long inverse_mod(long a) const {
        for (long x = 1; x < p_; ++x)
            if ((a * x) % p_ == 1) return x;
        return 1;
    }

    /// prod (1 + c_i X)^{k_i} = (1 + c X) * Q with X = t^E; records c and
    /// pushes the factors of Q.
    void combine(const Key& E, Mask S, const std::vector<Item>& group, bool is_raw) {
        const FiniteField& F = tw_.field();
        int J = 0;
        while (box_.contains(scale_key(E, J + 1))) ++J;
        std::vector<FFElem> P(1, F.one());
        for (const auto& it : group)
            for (long r = 0; r < pmod(it.coef, p_); ++r) {
                std::vector<FFElem> next(P.size() + 1, F.zero());
                for (std::size_t i = 0; i < P.size(); ++i) {
                    next[i] += P[i];
                    next[i + 1] += P[i] * it.c;
                }
                P = std::move(next);
            }
        const FFElem c = P.size() > 1 ? P[1] : F.zero();
        if (!c.is_zero()) {
            auto& slot = (is_raw ? raw : nf.units)[{E, S}];
            slot = slot.field ? slot + c : c;
        }
        // Q = P / (1 + c X), far enough to see whether it is a polynomial.
        const std::size_t len = static_cast<std::size_t>(J) + P.size() + 1;
        std::vector<FFElem> Q(len, F.zero());
        for (std::size_t i = 0; i < len; ++i) {
            FFElem v = i < P.size() ? P[i] : F.zero();
            if (i > 0) v -= c * Q[i - 1];
            Q[i] = v;
        }
        for (std::size_t i = J + 1; i < len; ++i)
            if (!Q[i].is_zero()) tail = true;
        Q.resize(J + 1);
        // peel Q = prod (1 + q_j X^j)
        for (int j = 2; j <= J; ++j) {
            if (Q[j].is_zero()) continue;
            const FFElem q = Q[j];
            push(scale_key(E, j), Item{1, q, S});
            // Q <- Q / (1 + q X^j)
            for (int i = j; i <= J; ++i) Q[i] -= q * Q[i - j];
        }
    }

    const Tower& tw_;
    int L_, p_;
    FiltrationBox box_;
    int raw_m_, stop_;
    std::map<Key, std::vector<Item>> queue_;
};

// ------------------------------------------------------------ shared setup

struct Prepared {
    FiltrationBox box;
    std::vector<std::pair<int, std::vector<Split>>> terms;
};

Prepared prepare(const KClass& xi, int M) {
    const Tower& tw = xi.tower();
    const int L = xi.level();
    Prepared out;
    std::vector<Elem> units;
    for (const auto& [key, term] : xi.terms()) {
        std::vector<Split> sp;
        for (const auto& e : term.second) {
            if (L == 0) {
                sp.push_back(Split{e.constant_value(), {}, e});
                continue;
            }
            sp.push_back(split_entry(e));
            units.push_back(sp.back().w);
        }
        out.terms.emplace_back(term.first, std::move(sp));
    }
    out.box = make_box(tw, L, M, units);
    if (L > 0)
        for (const auto& w : units) fit_precision(out.box, w, 0, true);
    return out;
}

std::vector<EntryAtoms> atoms_of(const std::vector<Split>& entries, const FiltrationBox& box, int p, bool& tail) {
    std::vector<EntryAtoms> out;
    for (const auto& s : entries) {
        EntryAtoms ea;
        const int L = static_cast<int>(s.v.size());
        for (int k = 1; k <= L; ++k) {
            const long m = pmod(s.v[L - k], p);
            if (m == 0) continue;
            Atom a;
            a.k = k;
            ea.emplace_back(m, a);
        }
        if (L > 0) {
            BoxPoly w;
            for (const auto& t : monomial_terms(s.w)) {
                Key key = key_of(t.exps);
                if (box.contains(key) || key == Key(L, 0))
                    w[key] = t.coeff;
                else
                    tail = true;
            }
            if (!s.w.is_exact()) tail = true;
            for (auto& [E, c] : peel(std::move(w), box, tail)) {
                Atom a;
                a.unit = true;
                a.E = E;
                a.c = c;
                ea.emplace_back(1, a);
            }
        }
        out.push_back(std::move(ea));
    }
    return out;
}

PEngine run_p(const KClass& xi, int M, int raw_m = -1, int stop = std::numeric_limits<int>::max()) {
    Prepared pr = prepare(xi, M);
    PEngine eng(xi.tower(), xi.level(), pr.box, raw_m, stop);
    eng.nf.ell = xi.ell();
    eng.nf.level = xi.level();
    eng.nf.degree = xi.degree();
    eng.nf.box = pr.box;
    for (const auto& [coef, entries] : pr.terms) {
        auto atoms = atoms_of(entries, pr.box, xi.tower().p(), eng.tail);
        eng.expand(coef, atoms);
    }
    eng.run();
    eng.nf.tail = eng.tail;
    return eng;
}

// ------------------------------------------------------------ tame engine

KNormalForm tame_normal_form(const KClass& xi) {
    const Tower& tw = xi.tower();
    const FiniteField& F = tw.field();
    const long ell = xi.ell();
    const long q1 = static_cast<long>(F.order()) - 1;
    const bool consts = q1 % ell == 0;
    const long dlog_minus_one = (F.p() == 2) ? 0 : pmod(q1 / 2, ell);
    const int L = xi.level();

    KNormalForm nf;
    nf.ell = xi.ell();
    nf.level = L;
    nf.degree = xi.degree();
    nf.box.level = L;

    // atom: k = 0 for the constant g, else t_k
    struct TAtom {
        long mult;
        int k;
    };
    for (const auto& [key, term] : xi.terms()) {
        std::vector<std::vector<TAtom>> entries;
        for (const auto& e : term.second) {
            std::vector<TAtom> ea;
            FFElem c = L == 0 ? e.constant_value() : e.leading_constant();
            if (consts) {
                const long m = pmod(F.dlog(c), ell);
                if (m) ea.push_back({m, 0});
            }
            if (L > 0) {
                const auto v = e.valuation();
                for (int k = 1; k <= L; ++k) {
                    const long m = pmod(v[L - k], ell);
                    if (m) ea.push_back({m, k});
                }
            }
            entries.push_back(std::move(ea));
        }
        std::vector<int> cur;
        std::function<void(std::size_t, long)> rec = [&](std::size_t i, long coef) {
            if (coef % ell == 0) return;
            if (i == entries.size()) {
                std::vector<int> ks = cur;
                long c = coef;
                // repeated t_k: replace the later one by -1
                int nconst = 0;
                for (int k : ks) nconst += k == 0;
                for (std::size_t a = 0; a < ks.size(); ++a)
                    for (std::size_t b = a + 1; b < ks.size(); ++b)
                        if (ks[a] != 0 && ks[a] == ks[b]) {
                            ks[b] = 0;
                            c = c * dlog_minus_one;
                            ++nconst;
                        }
                if (nconst > 1 || pmod(c, ell) == 0) return;
                int pos = -1;
                for (std::size_t a = 0; a < ks.size(); ++a)
                    if (ks[a] == 0) pos = static_cast<int>(a);
                long sign = 1;
                if (pos >= 0) {
                    if (pos % 2) sign = -1;
                    ks.erase(ks.begin() + pos);
                }
                const int s = sort_sign(ks);
                if (s == 0) return;
                auto& table = pos >= 0 ? nf.constant : nf.pure;
                int& slot = table[mask_of(ks)];
                slot = static_cast<int>(pmod(slot + sign * s * c, ell));
                if (slot == 0) table.erase(mask_of(ks));
                return;
            }
            for (const auto& a : entries[i]) {
                cur.push_back(a.k);
                rec(i + 1, pmod(coef * a.mult, ell));
                cur.pop_back();
            }
        };
        rec(0, term.first);
    }
    return nf;
}

int default_bound(const KClass& xi, int M) {
    if (M >= 0) return M;
    return xi.level() == 0 ? 0 : xi.tower().prec(xi.level());
}

}  // namespace

// ------------------------------------------------------------ public API

std::string to_string(Comparison c) {
    switch (c) {
        case Comparison::Equal: return "equal";
        case Comparison::Different: return "different";
        case Comparison::Unresolved: return "unresolved";
    }
    return "?";
}

long FiltrationBox::weigh(const std::vector<int>& key) const {
    long s = 0;
    for (std::size_t i = 0; i < key.size(); ++i) s += weight[i] * key[i];
    return s;
}

bool FiltrationBox::contains(const std::vector<int>& key) const {
    if (key.empty()) return true;
    return key[0] <= M && weigh(key) < T;
}

bool KNormalForm::vanishes_through(int m) const {
    if (!pure.empty() || !constant.empty()) return false;
    for (const auto& [k, c] : units)
        if (k.first.empty() || k.first[0] <= m) return false;
    return true;
}

std::string KNormalForm::to_string(const Tower& tw) const {
    std::ostringstream os;
    bool first = true;
    auto sep = [&] {
        if (!first) os << " + ";
        first = false;
    };
    auto ts = [&](Mask S) {
        std::string s;
        for (int k = 1; k <= level; ++k)
            if (S & bit(k)) s += ", " + tw.var(k);
        return s;
    };
    for (const auto& [S, c] : constant) {
        sep();
        os << c << "{" << tw.field().to_string(tw.field().primitive()) << ts(S) << "}";
    }
    for (const auto& [S, c] : pure) {
        sep();
        std::string s = ts(S);
        os << c << "{" << (s.empty() ? s : s.substr(2)) << "}";
    }
    for (const auto& [key, c] : units) {
        sep();
        os << "{1 + (" << tw.field().to_string(c) << ")";
        for (std::size_t i = 0; i < key.first.size(); ++i)
            os << "*" << tw.var(level - static_cast<int>(i)) << "^" << key.first[i];
        os << ts(key.second) << "}";
    }
    if (first) os << "0";
    if (tail) os << " + (terms beyond the bound)";
    return os.str();
}

std::string symbol_text(const std::vector<Elem>& entries) {
    std::string s = "{";
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (i) s += ", ";
        s += entries[i].to_string();
    }
    return s + "}";
}

KClass::KClass(const Tower& tw, int level, int degree, int ell)
    : tower_(&tw), level_(level), degree_(degree), ell_(ell) {
    if (ell < 2 || !is_prime(ell)) throw DomainError("the modulus of a K-class must be prime");
    if (level < 0 || level > tw.d()) throw DomainError("level outside the tower");
    if (degree < 0) throw DomainError("negative K-degree");
}

KClass KClass::symbol(std::vector<Elem> entries, int ell) {
    if (entries.empty()) throw DomainError("a symbol needs at least one entry");
    const Tower& tw = entries.front().tower();
    int L = 0;
    for (const auto& e : entries) L = std::max(L, e.level());
    KClass out(tw, L, static_cast<int>(entries.size()), ell);
    out.add_symbol(1, std::move(entries));
    return out;
}

void KClass::add_symbol(long long coeff, std::vector<Elem> entries) {
    if (static_cast<int>(entries.size()) != degree_) throw DomainError("symbol of the wrong degree");
    for (auto& e : entries) {
        if (&e.tower() != tower_) throw DomainError("symbol entries from different towers");
        if (e.level() > level_) throw DomainError("symbol entry above the class level");
        if (e.level() < level_) e = e.lift(level_);
        if (e.is_exact_zero() || e.is_indeterminate()) throw DomainError("symbol entries must be nonzero");
    }
    const long c = pmod(coeff, ell_);
    if (c == 0) return;
    const std::string key = symbol_text(entries);
    auto it = terms_.find(key);
    if (it == terms_.end()) {
        terms_.emplace(key, std::make_pair(static_cast<int>(c), std::move(entries)));
        return;
    }
    it->second.first = static_cast<int>(pmod(it->second.first + c, ell_));
    if (it->second.first == 0) terms_.erase(it);
}

KClass KClass::operator+(const KClass& o) const {
    if (o.tower_ != tower_ || o.level_ != level_ || o.degree_ != degree_ || o.ell_ != ell_)
        throw DomainError("K-classes of different shapes");
    KClass r = *this;
    for (const auto& [k, t] : o.terms_) r.add_symbol(t.first, t.second);
    return r;
}

KClass KClass::operator-(const KClass& o) const { return *this + o.times(-1); }

KClass KClass::times(long long k) const {
    KClass r(*tower_, level_, degree_, ell_);
    for (const auto& [key, t] : terms_) r.add_symbol(k * t.first, t.second);
    return r;
}

KNormalForm KClass::normal_form(int M) const {
    if (ell_ != tower_->p()) return tame_normal_form(*this);
    return run_p(*this, default_bound(*this, M)).nf;
}

Comparison KClass::compare(const KClass& o, int M) const {
    KClass diff = *this - o;
    if (diff.is_formally_zero()) return Comparison::Equal;
    KNormalForm nf = diff.normal_form(M);
    if (!nf.is_zero()) return Comparison::Different;
    return nf.tail ? Comparison::Unresolved : Comparison::Equal;
}

std::string KClass::to_string() const {
    if (terms_.empty()) return "0";
    std::string s;
    for (const auto& [key, t] : terms_) {
        if (!s.empty()) s += " + ";
        if (t.first != 1) s += std::to_string(t.first) + "*";
        s += key;
    }
    return s;
}

KClass from_normal_form(const Tower& tw, const KNormalForm& nf) {
    const int L = nf.level;
    KClass out(tw, L, nf.degree, nf.ell);
    auto uniformizers = [&](Mask S) {
        std::vector<Elem> v;
        for (int k = 1; k <= L; ++k)
            if (S & bit(k)) v.push_back(Elem::var(tw, L, k));
        return v;
    };
    for (const auto& [S, c] : nf.pure) out.add_symbol(c, uniformizers(S));
    for (const auto& [S, c] : nf.constant) {
        auto v = uniformizers(S);
        v.insert(v.begin(), Elem::constant(tw, L, tw.field().primitive()));
        out.add_symbol(c, v);
    }
    for (const auto& [key, c] : nf.units) {
        auto v = uniformizers(key.second);
        v.insert(v.begin(), Elem::one(tw, L) + Elem::monomial(tw, c, exps_of(key.first)));
        out.add_symbol(1, v);
    }
    return out;
}

Gr0Parts tame_boundary(const KClass& xi, int M) {
    const Tower& tw = xi.tower();
    const int L = xi.level();
    const int n = xi.degree();
    if (L == 0) throw DomainError("the boundary needs a series field");
    Gr0Parts out{KClass(tw, L - 1, n, xi.ell()), KClass(tw, L - 1, std::max(n - 1, 0), xi.ell())};
    const KNormalForm nf = xi.normal_form(M);
    const long sgn = (n - 1) % 2 ? -1 : 1;
    const Mask pi = bit(L);
    auto uniformizers = [&](Mask S) {
        std::vector<Elem> v;
        for (int k = 1; k < L; ++k)
            if (S & bit(k)) v.push_back(Elem::var(tw, L - 1, k));
        return v;
    };
    const Elem g = Elem::constant(tw, L - 1, tw.field().primitive());
    for (const auto& [S, c] : nf.pure) {
        auto v = uniformizers(S);
        if (S & pi) {
            if (n >= 1) out.aux.add_symbol(sgn * c, v);
        } else {
            out.main.add_symbol(c, v);
        }
    }
    for (const auto& [S, c] : nf.constant) {
        auto v = uniformizers(S);
        v.insert(v.begin(), g);
        if (S & pi)
            out.aux.add_symbol(sgn * c, v);
        else
            out.main.add_symbol(c, v);
    }
    for (const auto& [key, c] : nf.units) {
        if (key.first[0] != 0) continue;
        const Key inner(key.first.begin() + 1, key.first.end());
        Elem unit = Elem::one(tw, L - 1) + Elem::monomial(tw, c, exps_of(inner));
        auto v = uniformizers(key.second);
        v.insert(v.begin(), unit);
        if (key.second & pi)
            out.aux.add_symbol(sgn, v);
        else
            out.main.add_symbol(1, v);
    }
    return out;
}

KClass symbol_from_gr0(const Gr0Parts& parts, int level) {
    const Tower& tw = parts.main.tower();
    KClass out(tw, level, parts.main.degree(), parts.main.ell());
    for (const auto& [k, t] : parts.main.terms()) out.add_symbol(t.first, t.second);
    const Elem pi = Elem::var(tw, level, level);
    for (const auto& [k, t] : parts.aux.terms()) {
        std::vector<Elem> v{pi};
        v.insert(v.end(), t.second.begin(), t.second.end());
        out.add_symbol(t.first, v);
    }
    return out;
}

GradedRep graded_expand(const KClass& xi, int m, int M) {
    const Tower& tw = xi.tower();
    const int L = xi.level();
    const int n = xi.degree();
    if (xi.ell() != tw.p()) throw DomainError("graded pieces are only defined for ell = p");
    if (L < 1 || L > 2) throw DomainError("graded expansion supports tower levels 1 and 2");
    if (m < 1) throw DomainError("graded level must be at least 1");
    if (n < 1) throw DomainError("graded expansion needs a positive K-degree");

    M = std::max(default_bound(xi, M), m);
    KNormalForm below = run_p(xi, M, -1, m - 1).nf;
    if (below.box.M < m)
        throw PrecisionError("entries do not determine the filtration through level " + std::to_string(m));
    if (!below.vanishes_through(m - 1)) throw FiltrationError("class is not in U_" + std::to_string(m));

    PEngine eng = run_p(xi, M, m, m);
    if (eng.nf.box.M < m)
        throw PrecisionError("entries do not determine graded level " + std::to_string(m));
    const FiltrationBox& box = eng.nf.box;

    GradedRep rep{m, DiffForm(tw, L - 1, n - 1), std::nullopt};
    if (n >= 2) rep.aux = DiffForm(tw, L - 1, n - 2);
    const Mask pi = bit(L);
    for (const auto& [key, c] : eng.raw) {
        if (c.is_zero()) continue;
        const Key inner(key.first.begin() + 1, key.first.end());
        Elem x = L == 1 ? Elem::constant(tw, 0, c) : Elem::monomial(tw, c, exps_of(inner));
        std::vector<int> idx;
        for (int k = 1; k < L; ++k)
            if (key.second & bit(k)) idx.push_back(k);
        if (key.second & pi)
            *rep.aux = *rep.aux + DiffForm::monomial(x, idx);
        else
            rep.main = rep.main + DiffForm::monomial(x, idx);
    }
    if (L == 2) {
        const long cut = box.T - box.weight[0] * m;
        auto truncate = [&](const DiffForm& w) {
            DiffForm out(tw, 1, w.degree());
            for (const auto& [mask, x] : w.terms()) {
                std::vector<int> idx;
                for (int k = 1; k <= 1; ++k)
                    if (mask & bit(k)) idx.push_back(k);
                out = out + DiffForm::monomial(x.truncate(static_cast<int>(cut)), idx);
            }
            return out;
        };
        rep.main = truncate(rep.main);
        if (rep.aux) rep.aux = truncate(*rep.aux);
    }
    return rep;
}

GradedRep canonical_graded(const GradedRep& rep) {
    const Tower& tw = rep.main.tower();
    const int p = tw.p();
    const int n = rep.main.degree() + 1;
    GradedRep out = rep;
    if (rep.m % p != 0) {
        if (rep.aux) {
            const FFElem f = tw.field().from_int(((n - 1) % 2 ? -1 : 1)) * tw.field().from_int(rep.m).inverse();
            out.main = rep.main + d(*rep.aux) * Elem::constant(tw, rep.main.level(), f);
            out.aux = DiffForm(tw, rep.aux->level(), rep.aux->degree());
        }
        return out;
    }
    out.main = reduce_mod_closed(rep.main);
    if (rep.aux) out.aux = reduce_mod_closed(*rep.aux);
    return out;
}

KClass symbol_from_form(const GradedRep& rep, int ell) {
    const Tower& tw = rep.main.tower();
    const int F = rep.main.level();
    const int L = F + 1;
    const int n = rep.main.degree() + 1;
    KClass out(tw, L, n, ell);
    const Elem pim = Elem::var(tw, L, L).pow(rep.m);
    auto add = [&](const DiffForm& w, bool with_pi) {
        for (const auto& [mask, x] : w.terms())
            for (const auto& t : monomial_terms(x)) {
                Elem xl = Elem::monomial(tw, t.coeff, t.exps).lift(L);
                std::vector<Elem> v{Elem::one(tw, L) + xl * pim};
                for (int k = 1; k <= F; ++k)
                    if (mask & bit(k)) v.push_back(Elem::var(tw, L, k));
                if (with_pi) v.push_back(Elem::var(tw, L, L));
                out.add_symbol(1, v);
            }
    };
    add(rep.main, false);
    if (rep.aux) add(*rep.aux, true);
    return out;
}

DivisibilityReport p_divisibility_check(const Tower& tw, int level, int samples, std::uint64_t seed, int M) {
    DivisibilityReport rep;
    Rng rng(seed);
    for (int i = 0; i < samples; ++i) {
        Elem a = rng.nonzero_poly(tw, level, rng.range(-3, 1), rng.range(1, 4));
        Elem b = rng.nonzero_poly(tw, level, rng.range(-3, 1), rng.range(1, 4));
        ++rep.samples;
        try {
            KNormalForm nf = KClass::symbol({a, b}, tw.p()).normal_form(M);
            if (nf.is_zero()) {
                ++rep.zero;
            } else {
                ++rep.nonzero;
                rep.failures.push_back(symbol_text({a, b}) + " -> " + nf.to_string(tw));
            }
        } catch (const PrecisionError&) {
            ++rep.inconclusive;
        }
    }
    return rep;
}

}  // namespace hlcf
