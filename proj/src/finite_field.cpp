#include "hlcf/finite_field.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <sstream>

#include "hlcf/errors.hpp"

namespace hlcf {

bool is_prime(long long n) {
    if (n < 2) return false;
    for (long long d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

std::vector<long long> prime_factors(long long n) {
    std::vector<long long> out;
    for (long long d = 2; d * d <= n; ++d) {
        if (n % d == 0) {
            out.push_back(d);
            while (n % d == 0) n /= d;
        }
    }
    if (n > 1) out.push_back(n);
    return out;
}

namespace fp_poly {

void trim(FpPoly& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

static int inv_mod(int a, int p) {
    int r = 1;
    for (int e = p - 2, b = a % p; e > 0; e >>= 1, b = b * b % p)
        if (e & 1) r = r * b % p;
    return r;
}

FpPoly mul(const FpPoly& a, const FpPoly& b, int p) {
    if (a.empty() || b.empty()) return {};
    FpPoly r(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            r[i + j] = (r[i + j] + a[i] * b[j]) % p;
    trim(r);
    return r;
}

FpPoly mod(FpPoly a, const FpPoly& m, int p) {
    trim(a);
    FpPoly mm = m;
    trim(mm);
    if (mm.empty()) throw DomainError("polynomial division by zero");
    const int lead_inv = inv_mod(mm.back(), p);
    const std::size_t dm = mm.size() - 1;
    while (a.size() > dm) {
        const int c = a.back() * lead_inv % p;
        const std::size_t shift = a.size() - 1 - dm;
        for (std::size_t i = 0; i <= dm; ++i)
            a[shift + i] = ((a[shift + i] - c * mm[i]) % p + p) % p;
        trim(a);
    }
    return a;
}

FpPoly gcd(FpPoly a, FpPoly b, int p) {
    trim(a);
    trim(b);
    while (!b.empty()) {
        FpPoly r = mod(a, b, p);
        a = std::move(b);
        b = std::move(r);
    }
    if (!a.empty()) {
        const int li = inv_mod(a.back(), p);
        for (int& c : a) c = c * li % p;
    }
    return a;
}

FpPoly powmod_x(std::uint64_t e, const FpPoly& m, int p) {
    FpPoly result{1};
    FpPoly base = mod(FpPoly{0, 1}, m, p);
    while (e > 0) {
        if (e & 1) result = mod(mul(result, base, p), m, p);
        base = mod(mul(base, base, p), m, p);
        e >>= 1;
    }
    return mod(result, m, p);
}

static FpPoly powmod(FpPoly base, std::uint64_t e, const FpPoly& m, int p) {
    FpPoly result{1};
    base = mod(base, m, p);
    while (e > 0) {
        if (e & 1) result = mod(mul(result, base, p), m, p);
        base = mod(mul(base, base, p), m, p);
        e >>= 1;
    }
    return mod(result, m, p);
}

static FpPoly sub(FpPoly a, const FpPoly& b, int p) {
    if (a.size() < b.size()) a.resize(b.size(), 0);
    for (std::size_t i = 0; i < b.size(); ++i) a[i] = ((a[i] - b[i]) % p + p) % p;
    trim(a);
    return a;
}

bool is_irreducible(const FpPoly& f0, int p) {
    FpPoly f = f0;
    trim(f);
    const int n = static_cast<int>(f.size()) - 1;
    if (n < 1) return false;
    if (n == 1) return true;
    // x^{p^k} by repeated p-th powering of x mod f.
    auto frob_iter = [&](int k) {
        FpPoly x = mod(FpPoly{0, 1}, f, p);
        for (int i = 0; i < k; ++i) x = powmod(x, static_cast<std::uint64_t>(p), f, p);
        return x;
    };
    const FpPoly x = mod(FpPoly{0, 1}, f, p);
    if (sub(frob_iter(n), x, p) != FpPoly{}) return false;
    for (long long r : prime_factors(n)) {
        FpPoly g = gcd(f, sub(frob_iter(static_cast<int>(n / r)), x, p), p);
        if (g.size() != 1) return false;
    }
    return true;
}

}  // namespace fp_poly

namespace {

std::uint32_t ipow(std::uint32_t b, int e) {
    std::uint32_t r = 1;
    while (e-- > 0) r *= b;
    return r;
}

}  // namespace

FpPoly FiniteField::default_modulus(int p, int f) {
    // Conway polynomials, little-endian.
    static const std::map<std::pair<int, int>, FpPoly> table = {
        {{2, 1}, {1, 1}},    {{2, 2}, {1, 1, 1}},    {{2, 3}, {1, 1, 0, 1}},
        {{3, 1}, {1, 1}},    {{3, 2}, {2, 2, 1}},    {{3, 3}, {1, 2, 0, 1}},
        {{5, 1}, {3, 1}},    {{5, 2}, {2, 4, 1}},    {{5, 3}, {3, 3, 0, 1}},
        {{7, 1}, {4, 1}},    {{7, 2}, {3, 6, 1}},    {{7, 3}, {4, 0, 6, 1}},
    };
    if (auto it = table.find({p, f}); it != table.end()) return it->second;
    if (!is_prime(p) || f < 1) throw DomainError("invalid field parameters");
    // Smallest monic irreducible of degree f in packed-digit order.
    const std::uint64_t count = ipow(static_cast<std::uint32_t>(p), f);
    for (std::uint64_t code = 0; code < count; ++code) {
        FpPoly cand(f + 1, 0);
        std::uint64_t c = code;
        for (int i = 0; i < f; ++i) {
            cand[i] = static_cast<int>(c % p);
            c /= p;
        }
        cand[f] = 1;
        if (fp_poly::is_irreducible(cand, p)) return cand;
    }
    throw DomainError("no irreducible polynomial found");
}

const FiniteField& FiniteField::get(int p, const FpPoly& modulus) {
    static std::mutex mu;
    static std::map<std::pair<int, FpPoly>, std::unique_ptr<FiniteField>> interned;
    FpPoly m = modulus;
    fp_poly::trim(m);
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(p, m);
    if (auto it = interned.find(key); it != interned.end()) return *it->second;
    auto field = std::unique_ptr<FiniteField>(new FiniteField(p, m));
    const FiniteField& ref = *field;
    interned.emplace(std::move(key), std::move(field));
    return ref;
}

const FiniteField& FiniteField::standard(int p, int f) {
    return get(p, default_modulus(p, f));
}

FiniteField::FiniteField(int p, FpPoly modulus) : p_(p), modulus_(std::move(modulus)) {
    if (!is_prime(p)) throw DomainError("characteristic must be prime");
    if (modulus_.size() < 2 || modulus_.back() != 1)
        throw DomainError("modulus must be monic of degree >= 1");
    for (int c : modulus_)
        if (c < 0 || c >= p) throw DomainError("modulus coefficients must lie in [0, p)");
    if (!fp_poly::is_irreducible(modulus_, p)) throw DomainError("modulus is not irreducible");
    f_ = static_cast<int>(modulus_.size()) - 1;
    const double approx = std::pow(static_cast<double>(p), f_);
    if (approx > (1 << 22)) throw DomainError("field too large for table arithmetic");
    q_ = ipow(static_cast<std::uint32_t>(p), f_);
    pow_p_.resize(f_);
    for (int i = 0; i < f_; ++i) pow_p_[i] = ipow(static_cast<std::uint32_t>(p), i);

    // Primitive element: smallest packed value whose order is q - 1.
    const auto factors = prime_factors(q_ - 1);
    for (std::uint32_t cand = 1; cand < q_; ++cand) {
        FpPoly g = to_poly({this, cand});
        bool ok = !g.empty();
        for (long long r : factors) {
            FpPoly h = fp_poly::powmod(g, (q_ - 1) / r, modulus_, p_);
            if (h == FpPoly{1}) {
                ok = false;
                break;
            }
        }
        if (ok) {
            prim_ = cand;
            break;
        }
    }
    if (q_ == 2) prim_ = 1;
    exp_.resize(q_ - 1);
    log_.assign(q_, 0);
    FpPoly g = to_poly({this, prim_});
    FpPoly cur{1};
    for (std::uint32_t k = 0; k + 1 < q_; ++k) {
        const std::uint32_t v = from_poly(cur).v;
        exp_[k] = v;
        log_[v] = k;
        cur = fp_poly::mod(fp_poly::mul(cur, g, p_), modulus_, p_);
    }
}

FpPoly FiniteField::to_poly(FFElem a) const {
    FpPoly out(f_, 0);
    std::uint32_t v = a.v;
    for (int i = 0; i < f_; ++i) {
        out[i] = static_cast<int>(v % p_);
        v /= p_;
    }
    fp_poly::trim(out);
    return out;
}

FFElem FiniteField::from_poly(const FpPoly& a) const {
    FpPoly r = fp_poly::mod(a, modulus_, p_);
    std::uint32_t v = 0;
    for (std::size_t i = r.size(); i-- > 0;) v = v * p_ + static_cast<std::uint32_t>(r[i]);
    return {this, v};
}

FFElem FiniteField::from_int(long long n) const {
    long long r = n % p_;
    if (r < 0) r += p_;
    return {this, static_cast<std::uint32_t>(r)};
}

FFElem FiniteField::gen() const { return from_poly(FpPoly{0, 1}); }

FFElem FiniteField::elem(std::uint32_t packed) const {
    if (packed >= q_) throw DomainError("packed field element out of range");
    return {this, packed};
}

FFElem FiniteField::from_digits(const std::vector<int>& digits) const {
    FpPoly poly;
    for (int d : digits) poly.push_back(((d % p_) + p_) % p_);
    return from_poly(poly);
}

std::vector<int> FiniteField::digits(FFElem x) const {
    std::vector<int> out(f_, 0);
    std::uint32_t v = x.v;
    for (int i = 0; i < f_; ++i) {
        out[i] = static_cast<int>(v % p_);
        v /= p_;
    }
    return out;
}

std::vector<FFElem> FiniteField::elements() const {
    std::vector<FFElem> out;
    out.reserve(q_);
    for (std::uint32_t v = 0; v < q_; ++v) out.push_back({this, v});
    return out;
}

FFElem FiniteField::add(FFElem a, FFElem b) const {
    if (f_ == 1) return {this, (a.v + b.v) % static_cast<std::uint32_t>(p_)};
    std::uint32_t r = 0, x = a.v, y = b.v;
    for (int i = 0; i < f_; ++i) {
        r += ((x % p_ + y % p_) % p_) * pow_p_[i];
        x /= p_;
        y /= p_;
    }
    return {this, r};
}

FFElem FiniteField::neg(FFElem a) const {
    if (f_ == 1) return {this, (p_ - a.v) % static_cast<std::uint32_t>(p_)};
    std::uint32_t r = 0, x = a.v;
    for (int i = 0; i < f_; ++i) {
        r += ((p_ - x % p_) % p_) * pow_p_[i];
        x /= p_;
    }
    return {this, r};
}

FFElem FiniteField::sub(FFElem a, FFElem b) const { return add(a, neg(b)); }

FFElem FiniteField::mul(FFElem a, FFElem b) const {
    if (a.v == 0 || b.v == 0) return {this, 0};
    const std::uint64_t k = (static_cast<std::uint64_t>(log_[a.v]) + log_[b.v]) % (q_ - 1);
    return {this, exp_[k]};
}

FFElem FiniteField::inv(FFElem a) const {
    if (a.v == 0) throw DomainError("inverse of zero in finite field");
    return {this, exp_[(q_ - 1 - log_[a.v]) % (q_ - 1)]};
}

FFElem FiniteField::frobenius_inverse(FFElem a) const {
    FFElem r = a;
    for (int i = 1; i < f_; ++i) r = frobenius(r);
    return r;
}

int FiniteField::trace(FFElem a) const {
    FFElem s = zero(), x = a;
    for (int i = 0; i < f_; ++i) {
        s = add(s, x);
        x = frobenius(x);
    }
    return static_cast<int>(s.v);  // lies in F_p, so the packed value is the digit
}

FFElem FiniteField::norm(FFElem a) const {
    FFElem s = one(), x = a;
    for (int i = 0; i < f_; ++i) {
        s = mul(s, x);
        x = frobenius(x);
    }
    return s;
}

std::uint32_t FiniteField::dlog(FFElem a) const {
    if (a.v == 0) throw DomainError("discrete log of zero");
    return log_[a.v];
}

std::string FiniteField::to_string(FFElem a) const {
    if (f_ == 1) return std::to_string(a.v);
    std::ostringstream os;
    os << '[';
    auto d = digits(a);
    for (int i = 0; i < f_; ++i) os << (i ? "," : "") << d[i];
    os << ']';
    return os.str();
}

FFElem FFElem::operator+(FFElem o) const { return field->add(*this, o); }
FFElem FFElem::operator-(FFElem o) const { return field->sub(*this, o); }
FFElem FFElem::operator-() const { return field->neg(*this); }
FFElem FFElem::operator*(FFElem o) const { return field->mul(*this, o); }
FFElem FFElem::inverse() const { return field->inv(*this); }

FFElem FFElem::pow(long long e) const {
    if (v == 0) {
        if (e < 0) throw DomainError("negative power of zero");
        return e == 0 ? field->one() : *this;
    }
    const long long ord = static_cast<long long>(field->order()) - 1;
    long long k = e % ord;
    if (k < 0) k += ord;
    FFElem r = field->one(), b = *this;
    while (k > 0) {
        if (k & 1) r = r * b;
        b = b * b;
        k >>= 1;
    }
    return r;
}

std::ostream& operator<<(std::ostream& os, FFElem a) {
    return os << (a.field ? a.field->to_string(a) : std::string("?"));
}

FieldEmbedding::FieldEmbedding(const FiniteField& small, const FiniteField& big)
    : small_(&small), big_(&big) {
    if (small.p() != big.p() || big.degree() % small.degree() != 0)
        throw DomainError("no embedding between these fields");
    // Smallest root of the small modulus in the big field.
    FFElem root = big.zero();
    bool found = false;
    for (FFElem x : big.elements()) {
        FFElem acc = big.zero();
        const auto& m = small.modulus();
        for (std::size_t i = m.size(); i-- > 0;) acc = acc * x + big.from_int(m[i]);
        if (acc.is_zero()) {
            root = x;
            found = true;
            break;
        }
    }
    if (!found) throw DomainError("modulus has no root in the extension");
    table_.resize(small.order());
    for (FFElem x : small.elements()) {
        auto d = small.digits(x);
        FFElem acc = big.zero();
        for (std::size_t i = d.size(); i-- > 0;) acc = acc * root + big.from_int(d[i]);
        table_[x.v] = acc.v;
    }
}

FieldEmbedding FieldEmbedding::extension(const FiniteField& base, int e) {
    return FieldEmbedding(base, FiniteField::standard(base.p(), base.degree() * e));
}

FFElem FieldEmbedding::map(FFElem x) const { return {big_, table_.at(x.v)}; }

FFElem FieldEmbedding::preimage(FFElem x) const {
    for (std::uint32_t v = 0; v < table_.size(); ++v)
        if (table_[v] == x.v) return {small_, v};
    throw DomainError("element is not in the image of the embedding");
}

}  // namespace hlcf
