#include "hlcf/tower.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <sstream>

#include "hlcf/errors.hpp"

namespace hlcf {

namespace {

int sat_add(int a, int b) {
    if (a >= Elem::kExact || b >= Elem::kExact) return Elem::kExact;
    long long s = static_cast<long long>(a) + b;
    if (s >= Elem::kExact) return Elem::kExact;
    return static_cast<int>(s);
}

int floor_div(int a, int b) {
    int q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

int mod_pos(int a, int m) { return ((a % m) + m) % m; }

std::string config_key(const FieldConfig& c) {
    std::ostringstream os;
    os << c.p << '|' << c.f << '|';
    for (int m : c.modulus) os << m << ',';
    os << '|';
    for (const auto& v : c.vars) os << v << ',';
    os << '|';
    for (int m : c.prec) os << m << ',';
    os << '|' << c.gen_name << '|' << c.max_d;
    return os.str();
}

}  // namespace

// ---------------------------------------------------------------- Tower

const Tower& Tower::get(const FieldConfig& cfg) {
    static std::mutex mu;
    static std::map<std::string, std::unique_ptr<Tower>> interned;
    const std::string key = config_key(cfg);
    {
        std::lock_guard<std::mutex> lock(mu);
        if (auto it = interned.find(key); it != interned.end()) return *it->second;
    }
    auto tw = std::unique_ptr<Tower>(new Tower(cfg));
    std::lock_guard<std::mutex> lock(mu);
    auto [it, inserted] = interned.emplace(key, std::move(tw));
    return *it->second;
}

Tower::Tower(FieldConfig cfg) : cfg_(std::move(cfg)) {
    if (!is_prime(cfg_.p) || cfg_.p > 7) throw DomainError("p must be a prime <= 7");
    if (cfg_.f < 1 || cfg_.f > 3) throw DomainError("f must lie in 1..3");
    if (cfg_.max_d < 1 || cfg_.max_d > 3) throw DomainError("max_d must lie in 1..3");
    if (static_cast<int>(cfg_.vars.size()) > cfg_.max_d)
        throw DomainError("tower dimension exceeds max_d");
    if (cfg_.prec.size() != cfg_.vars.size())
        throw DomainError("need one precision per variable");
    for (int m : cfg_.prec)
        if (m < 8) throw DomainError("precision orders must be >= 8");
    for (std::size_t i = 0; i < cfg_.vars.size(); ++i) {
        if (cfg_.vars[i].empty() || cfg_.vars[i] == cfg_.gen_name)
            throw DomainError("invalid variable name");
        for (std::size_t j = 0; j < i; ++j)
            if (cfg_.vars[i] == cfg_.vars[j]) throw DomainError("duplicate variable name");
    }
    if (cfg_.modulus.empty()) cfg_.modulus = FiniteField::default_modulus(cfg_.p, cfg_.f);
    if (static_cast<int>(cfg_.modulus.size()) != cfg_.f + 1)
        throw DomainError("modulus degree does not match f");
    field_ = &FiniteField::get(cfg_.p, cfg_.modulus);
}

std::string Tower::describe(int level) const {
    std::ostringstream os;
    os << "F_" << field_->order();
    for (int k = 1; k <= level; ++k) os << "((" << var(k) << "))";
    return os.str();
}

// ---------------------------------------------------------------- Elem construction

Elem Elem::zero(const Tower& tw, int level) {
    Elem e;
    e.tower_ = &tw;
    e.level_ = level;
    e.c_ = tw.field().zero();
    return e;
}

Elem Elem::constant(const Tower& tw, int level, FFElem c) {
    Elem e = zero(tw, 0);
    e.c_ = c;
    return e.lift(level);
}

Elem Elem::one(const Tower& tw, int level) { return constant(tw, level, tw.field().one()); }

Elem Elem::from_int(const Tower& tw, int level, long long n) {
    return constant(tw, level, tw.field().from_int(n));
}

Elem Elem::var(const Tower& tw, int level, int k) {
    if (k < 1 || k > level) throw DomainError("variable index out of range");
    std::vector<int> exps(level, 0);
    exps[k - 1] = 1;
    return monomial(tw, tw.field().one(), exps);
}

Elem Elem::monomial(const Tower& tw, FFElem c, const std::vector<int>& exps) {
    Elem e = constant(tw, 0, c);
    for (std::size_t k = 0; k < exps.size(); ++k) {
        Elem up;
        up.tower_ = &tw;
        up.level_ = static_cast<int>(k) + 1;
        up.c_ = tw.field().zero();
        up.lo_ = exps[k];
        up.co_.push_back(std::move(e));
        up.normalize();
        e = std::move(up);
    }
    return e;
}

Elem Elem::series(const Tower& tw, int level, int lo, std::vector<Elem> coeffs, int known_to) {
    if (level < 1) throw DomainError("series needs level >= 1");
    for (const auto& c : coeffs)
        if (c.level_ != level - 1 || c.tower_ != &tw)
            throw DomainError("series coefficient has the wrong parent");
    Elem e;
    e.tower_ = &tw;
    e.level_ = level;
    e.c_ = tw.field().zero();
    e.lo_ = lo;
    e.known_ = known_to;
    e.co_ = std::move(coeffs);
    e.normalize();
    return e;
}

void Elem::normalize() {
    if (level_ == 0) return;
    if (known_ < kExact) {
        const long long keep = static_cast<long long>(known_) - lo_;
        if (keep <= 0)
            co_.clear();
        else if (static_cast<long long>(co_.size()) > keep)
            co_.resize(static_cast<std::size_t>(keep));
    }
    std::size_t first = 0;
    while (first < co_.size() && co_[first].is_exact_zero()) ++first;
    if (first > 0) {
        co_.erase(co_.begin(), co_.begin() + static_cast<std::ptrdiff_t>(first));
        lo_ += static_cast<int>(first);
    }
    while (!co_.empty() && co_.back().is_exact_zero()) co_.pop_back();
    if (co_.empty()) lo_ = 0;
}

void Elem::check_same(const Elem& o) const {
    if (tower_ != o.tower_ || level_ != o.level_)
        throw DomainError("operands live in different fields");
}

// ---------------------------------------------------------------- predicates

bool Elem::is_exact_zero() const {
    if (level_ == 0) return c_.is_zero();
    return co_.empty() && known_ >= kExact;
}

namespace {
bool has_known_nonzero(const Elem& e) {
    if (e.level() == 0) return !e.constant_value().is_zero();
    for (const auto& c : e.coeffs())
        if (has_known_nonzero(c)) return true;
    return false;
}
}  // namespace

bool Elem::is_indeterminate() const { return !is_exact_zero() && !has_known_nonzero(*this); }

bool Elem::is_exact() const {
    if (level_ == 0) return true;
    if (known_ < kExact) return false;
    return std::all_of(co_.begin(), co_.end(), [](const Elem& c) { return c.is_exact(); });
}

Elem Elem::coeff(int e) const {
    if (level_ == 0) throw DomainError("constants have no coefficients");
    if (e >= known_)
        throw PrecisionError("coefficient of " + tower_->var(level_) + "^" + std::to_string(e) +
                             " is beyond the known precision");
    if (e < lo_ || e >= lo_ + static_cast<int>(co_.size())) return zero(*tower_, level_ - 1);
    return co_[static_cast<std::size_t>(e - lo_)];
}

std::optional<int> Elem::first_exponent() const {
    if (level_ == 0 || co_.empty()) return std::nullopt;
    return lo_;  // normalized: leading exact zeros are stripped
}

// ---------------------------------------------------------------- arithmetic

Elem Elem::operator+(const Elem& o) const {
    check_same(o);
    if (level_ == 0) {
        Elem r = *this;
        r.c_ = c_ + o.c_;
        return r;
    }
    if (o.is_exact_zero()) return *this;
    if (is_exact_zero()) return o;
    const int known = std::min(known_, o.known_);
    int lo = INT_MAX, hi = INT_MIN;
    if (!co_.empty()) {
        lo = std::min(lo, lo_);
        hi = std::max(hi, lo_ + static_cast<int>(co_.size()));
    }
    if (!o.co_.empty()) {
        lo = std::min(lo, o.lo_);
        hi = std::max(hi, o.lo_ + static_cast<int>(o.co_.size()));
    }
    Elem r;
    r.tower_ = tower_;
    r.level_ = level_;
    r.c_ = c_;
    r.known_ = known;
    if (lo < hi) {
        hi = std::min(hi, known);
        r.lo_ = lo;
        for (int e = lo; e < hi; ++e) {
            const bool in_a = e >= lo_ && e < lo_ + static_cast<int>(co_.size());
            const bool in_b = e >= o.lo_ && e < o.lo_ + static_cast<int>(o.co_.size());
            if (in_a && in_b)
                r.co_.push_back(co_[e - lo_] + o.co_[e - o.lo_]);
            else if (in_a)
                r.co_.push_back(co_[e - lo_]);
            else if (in_b)
                r.co_.push_back(o.co_[e - o.lo_]);
            else
                r.co_.push_back(zero(*tower_, level_ - 1));
        }
    }
    r.normalize();
    return r;
}

Elem Elem::operator-() const {
    Elem r = *this;
    if (level_ == 0) {
        r.c_ = -c_;
        return r;
    }
    for (auto& c : r.co_) c = -c;
    return r;
}

Elem Elem::operator-(const Elem& o) const { return *this + (-o); }

Elem Elem::scale(FFElem c) const {
    if (level_ == 0) {
        Elem r = *this;
        r.c_ = c_ * c;
        return r;
    }
    Elem r = *this;
    for (auto& x : r.co_) x = x.scale(c);
    r.normalize();
    return r;
}

Elem Elem::operator*(const Elem& o) const {
    check_same(o);
    if (level_ == 0) {
        Elem r = *this;
        r.c_ = c_ * o.c_;
        return r;
    }
    if (is_exact_zero() || o.is_exact_zero()) return zero(*tower_, level_);
    const int va = co_.empty() ? known_ : lo_;
    const int vb = o.co_.empty() ? o.known_ : o.lo_;
    const int known = std::min(sat_add(known_, vb), sat_add(o.known_, va));
    Elem r;
    r.tower_ = tower_;
    r.level_ = level_;
    r.c_ = c_;
    r.known_ = known;
    if (!co_.empty() && !o.co_.empty()) {
        r.lo_ = lo_ + o.lo_;
        int len = static_cast<int>(co_.size() + o.co_.size()) - 1;
        if (known < kExact) len = std::min(len, known - r.lo_);
        if (len > 0) {
            r.co_.assign(static_cast<std::size_t>(len), zero(*tower_, level_ - 1));
            for (std::size_t i = 0; i < co_.size(); ++i) {
                if (co_[i].is_exact_zero()) continue;
                for (std::size_t j = 0; j < o.co_.size(); ++j) {
                    const std::size_t k = i + j;
                    if (static_cast<int>(k) >= len) break;
                    if (o.co_[j].is_exact_zero()) continue;
                    r.co_[k] += co_[i] * o.co_[j];
                }
            }
        }
    }
    r.normalize();
    return r;
}

Elem Elem::inverse() const {
    if (level_ == 0) {
        Elem r = *this;
        r.c_ = c_.inverse();
        return r;
    }
    if (is_exact_zero()) throw DomainError("division by zero");
    if (co_.empty()) throw PrecisionError("division by an element with unknown leading term");
    const int v = lo_;
    const Elem c0inv = co_.front().inverse();
    const int rel = known_ >= kExact ? kExact : known_ - v;
    const int n_terms = std::min(tower_->prec(level_), rel);
    if (n_terms <= 0) throw PrecisionError("precision exhausted while inverting");
    Elem r;
    r.tower_ = tower_;
    r.level_ = level_;
    r.c_ = c_;
    r.lo_ = -v;
    if (co_.size() == 1 && known_ >= kExact && c0inv.is_exact()) {
        r.known_ = kExact;
        r.co_.push_back(c0inv);
        r.normalize();
        return r;
    }
    r.known_ = -v + n_terms;
    r.co_.reserve(static_cast<std::size_t>(n_terms));
    r.co_.push_back(c0inv);
    for (int n = 1; n < n_terms; ++n) {
        Elem acc = zero(*tower_, level_ - 1);
        for (int k = 1; k <= n && k < static_cast<int>(co_.size()); ++k) {
            if (co_[k].is_exact_zero() || r.co_[n - k].is_exact_zero()) continue;
            acc += co_[k] * r.co_[n - k];
        }
        r.co_.push_back(-(acc * c0inv));
    }
    r.normalize();
    return r;
}

Elem Elem::pow(long long e) const {
    if (e < 0) return inverse().pow(-e);
    Elem r = one(*tower_, level_);
    Elem b = *this;
    while (e > 0) {
        if (e & 1) r = r * b;
        e >>= 1;
        if (e > 0) b = b * b;
    }
    return r;
}

Elem Elem::shift(int k, int n) const {
    if (k < 1 || k > level_) throw DomainError("shift variable out of range");
    Elem r = *this;
    if (k == level_) {
        if (!r.co_.empty()) r.lo_ += n;
        r.known_ = sat_add(r.known_, n);
        return r;
    }
    for (auto& c : r.co_) c = c.shift(k, n);
    r.normalize();
    return r;
}

Elem Elem::frobenius() const {
    const int p = tower_->p();
    if (level_ == 0) {
        Elem r = *this;
        r.c_ = c_.pow(p);
        return r;
    }
    Elem r;
    r.tower_ = tower_;
    r.level_ = level_;
    r.c_ = c_;
    r.known_ = known_ >= kExact ? kExact : known_ * p;
    if (!co_.empty()) {
        r.lo_ = lo_ * p;
        r.co_.assign((co_.size() - 1) * p + 1, zero(*tower_, level_ - 1));
        for (std::size_t i = 0; i < co_.size(); ++i) r.co_[i * p] = co_[i].frobenius();
    }
    r.normalize();
    return r;
}

Elem Elem::truncate(int known_to) const {
    if (level_ == 0) return *this;
    Elem r = *this;
    r.known_ = std::min(known_, known_to);
    r.normalize();
    return r;
}

Elem Elem::lift(int to_level) const {
    if (to_level < level_) throw DomainError("cannot lift to a lower level");
    Elem e = *this;
    while (e.level_ < to_level) {
        Elem up;
        up.tower_ = tower_;
        up.level_ = e.level_ + 1;
        up.c_ = tower_->field().zero();
        up.co_.push_back(std::move(e));
        up.normalize();
        e = std::move(up);
    }
    return e;
}

Elem Elem::derivative(int k) const {
    if (k < 1 || k > level_) throw DomainError("derivative variable out of range");
    Elem r = *this;
    if (k == level_) {
        const FiniteField& F = tower_->field();
        for (std::size_t i = 0; i < r.co_.size(); ++i)
            r.co_[i] = r.co_[i].scale(F.from_int(lo_ + static_cast<int>(i)));
        if (!r.co_.empty()) r.lo_ -= 1;
        r.known_ = known_ >= kExact ? kExact : known_ - 1;
        r.normalize();
        return r;
    }
    for (auto& c : r.co_) c = c.derivative(k);
    r.normalize();
    return r;
}

// ---------------------------------------------------------------- analysis

std::vector<int> Elem::valuation() const {
    if (level_ == 0) {
        if (c_.is_zero()) throw DomainError("valuation of zero");
        return {};
    }
    if (is_exact_zero()) throw DomainError("valuation of zero");
    if (co_.empty()) throw PrecisionError("leading term unknown at current precision");
    std::vector<int> out{lo_};
    auto inner = co_.front().valuation();
    out.insert(out.end(), inner.begin(), inner.end());
    return out;
}

Elem Elem::leading_coeff() const {
    if (level_ == 0) throw DomainError("constants have no leading coefficient");
    (void)valuation();
    return co_.front();
}

FFElem Elem::leading_constant() const {
    if (level_ == 0) {
        if (c_.is_zero()) throw DomainError("leading constant of zero");
        return c_;
    }
    return leading_coeff().leading_constant();
}

FFElem Elem::constant_term() const {
    if (level_ == 0) return c_;
    return coeff(0).constant_term();
}

bool Elem::agrees_with(const Elem& o) const {
    check_same(o);
    if (level_ == 0) return c_ == o.c_;
    const int bound = std::min(known_, o.known_);
    int lo = INT_MAX, hi = INT_MIN;
    for (const Elem* e : {this, &o}) {
        if (e->co_.empty()) continue;
        lo = std::min(lo, e->lo_);
        hi = std::max(hi, e->lo_ + static_cast<int>(e->co_.size()));
    }
    hi = std::min(hi, bound);
    for (int e = lo; e < hi; ++e)
        if (!coeff(e).agrees_with(o.coeff(e))) return false;
    return true;
}

bool operator==(const Elem& a, const Elem& b) {
    if (a.tower_ != b.tower_ || a.level_ != b.level_) return false;
    if (a.level_ == 0) return a.c_ == b.c_;
    return a.lo_ == b.lo_ && a.known_ == b.known_ && a.co_ == b.co_;
}

namespace {

void render(const Elem& e, std::ostringstream& os) {
    const Tower& tw = e.tower();
    if (e.level() == 0) {
        os << tw.field().to_string(e.constant_value());
        return;
    }
    bool first = true;
    const std::string& v = tw.var(e.level());
    for (std::size_t i = 0; i < e.coeffs().size(); ++i) {
        const Elem& c = e.coeffs()[i];
        if (c.is_exact_zero()) continue;
        const int exp = e.lo() + static_cast<int>(i);
        if (!first) os << " + ";
        first = false;
        const bool simple = c.level() == 0 || (c.coeffs().size() == 1 && c.known_to() >= Elem::kExact);
        if (!simple) os << '(';
        render(c, os);
        if (!simple) os << ')';
        if (exp != 0) os << '*' << v << '^' << exp;
    }
    if (e.known_to() < Elem::kExact) {
        if (!first) os << " + ";
        first = false;
        os << "O(" << v << '^' << e.known_to() << ')';
    }
    if (first) os << '0';
}

}  // namespace

std::string Elem::to_string() const {
    std::ostringstream os;
    render(*this, os);
    return os.str();
}

std::ostream& operator<<(std::ostream& os, const Elem& e) { return os << e.to_string(); }

// ---------------------------------------------------------------- decompositions

UnitDecomposition unit_decompose(const Elem& a) {
    if (a.level() == 0) throw DomainError("unit decomposition needs a series");
    const auto v = a.valuation();
    UnitDecomposition out;
    out.m = v.front();
    out.residue = a.leading_coeff();
    out.principal = a.shift(a.level(), -out.m) * out.residue.inverse().lift(a.level());
    return out;
}

std::optional<Elem> pth_root(const Elem& a) {
    const int p = a.tower().p();
    if (a.level() == 0) {
        if (a.is_exact_zero()) throw DomainError("p-th root of zero");
        return Elem::constant(a.tower(), 0, a.tower().field().frobenius_inverse(a.constant_value()));
    }
    if (a.is_exact_zero()) throw DomainError("p-th root of zero");
    std::vector<Elem> roots;
    int lo = 0;
    bool started = false;
    for (std::size_t i = 0; i < a.coeffs().size(); ++i) {
        const Elem& c = a.coeffs()[i];
        const int e = a.lo() + static_cast<int>(i);
        if (c.is_exact_zero()) continue;
        if (mod_pos(e, p) != 0) {
            if (c.is_indeterminate()) continue;
            return std::nullopt;
        }
        std::optional<Elem> r;
        if (c.is_indeterminate()) {
            r = Elem::zero(a.tower(), a.level() - 1).truncate(
                c.level() == 0 ? Elem::kExact : floor_div(c.known_to() + p - 1, p));
        } else {
            r = pth_root(c);
        }
        if (!r) return std::nullopt;
        if (!started) {
            lo = e / p;
            started = true;
        }
        roots.resize(static_cast<std::size_t>(e / p - lo), Elem::zero(a.tower(), a.level() - 1));
        roots.push_back(*r);
    }
    const int known = a.known_to() >= Elem::kExact ? Elem::kExact : floor_div(a.known_to() + p - 1, p);
    return Elem::series(a.tower(), a.level(), lo, std::move(roots), known);
}

namespace {

void collect_terms(const Elem& a, std::vector<int>& outer, std::vector<MonomialTerm>& out) {
    if (a.level() == 0) {
        if (a.constant_value().is_zero()) return;
        std::vector<int> exps(outer.rbegin(), outer.rend());
        out.push_back({std::move(exps), a.constant_value()});
        return;
    }
    for (std::size_t i = 0; i < a.coeffs().size(); ++i) {
        outer.push_back(a.lo() + static_cast<int>(i));
        collect_terms(a.coeffs()[i], outer, out);
        outer.pop_back();
    }
}

}  // namespace

std::vector<MonomialTerm> monomial_terms(const Elem& a) {
    std::vector<int> outer;
    std::vector<MonomialTerm> out;
    collect_terms(a, outer, out);
    return out;
}

}  // namespace hlcf
