#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace hlcf {

/// Dense polynomial over F_p, coefficients little-endian in [0, p).
using FpPoly = std::vector<int>;

namespace fp_poly {

void trim(FpPoly& a);
FpPoly mul(const FpPoly& a, const FpPoly& b, int p);
FpPoly mod(FpPoly a, const FpPoly& m, int p);
FpPoly gcd(FpPoly a, FpPoly b, int p);
/// x^e mod m.
FpPoly powmod_x(std::uint64_t e, const FpPoly& m, int p);
/// Rabin irreducibility test.
bool is_irreducible(const FpPoly& f, int p);

}  // namespace fp_poly

class FiniteField;

/// Element of a finite field F_q, q = p^f. The value packs the coefficients
/// in the power basis 1, X, ..., X^{f-1} as base-p digits, little-endian.
/// The field pointer refers to an interned FiniteField that lives for the
/// whole program.
struct FFElem {
    const FiniteField* field = nullptr;
    std::uint32_t v = 0;

    bool is_zero() const { return v == 0; }
    bool is_one() const { return v == 1; }

    FFElem operator+(FFElem o) const;
    FFElem operator-(FFElem o) const;
    FFElem operator-() const;
    FFElem operator*(FFElem o) const;
    FFElem inverse() const;
    FFElem pow(long long e) const;
    FFElem& operator+=(FFElem o) { return *this = *this + o; }
    FFElem& operator-=(FFElem o) { return *this = *this - o; }
    FFElem& operator*=(FFElem o) { return *this = *this * o; }

    friend bool operator==(FFElem a, FFElem b) { return a.v == b.v; }
    friend bool operator!=(FFElem a, FFElem b) { return a.v != b.v; }
    friend bool operator<(FFElem a, FFElem b) { return a.v < b.v; }
};

class FiniteField {
public:
    /// Interned field F_p[X]/(modulus). Throws DomainError if p is not a
    /// prime or the modulus is not monic irreducible.
    static const FiniteField& get(int p, const FpPoly& modulus);
    /// F_{p^f} with the shipped modulus (Conway polynomials for p <= 7,
    /// f <= 3; smallest irreducible otherwise).
    static const FiniteField& standard(int p, int f);
    /// Shipped modulus for (p, f), or the lexicographically smallest
    /// monic irreducible polynomial of degree f.
    static FpPoly default_modulus(int p, int f);

    int p() const { return p_; }
    int degree() const { return f_; }
    std::uint32_t order() const { return q_; }
    const FpPoly& modulus() const { return modulus_; }

    FFElem zero() const { return {this, 0}; }
    FFElem one() const { return {this, 1}; }
    FFElem from_int(long long n) const;
    /// The class of X, a root of the modulus.
    FFElem gen() const;
    FFElem elem(std::uint32_t packed) const;
    FFElem from_digits(const std::vector<int>& digits) const;
    std::vector<int> digits(FFElem x) const;
    std::vector<FFElem> elements() const;

    FFElem add(FFElem a, FFElem b) const;
    FFElem sub(FFElem a, FFElem b) const;
    FFElem neg(FFElem a) const;
    FFElem mul(FFElem a, FFElem b) const;
    FFElem inv(FFElem a) const;

    FFElem frobenius(FFElem a) const { return a.pow(p_); }
    /// The unique p-th root; F_q is perfect.
    FFElem frobenius_inverse(FFElem a) const;
    /// Absolute trace to F_p, returned in [0, p).
    int trace(FFElem a) const;
    FFElem norm(FFElem a) const;

    /// Fixed generator of F_q^*: the primitive element with the smallest
    /// packed value.
    FFElem primitive() const { return {this, prim_}; }
    /// Discrete logarithm against primitive(), in [0, q-1).
    std::uint32_t dlog(FFElem a) const;

    std::string to_string(FFElem a) const;

private:
    FiniteField(int p, FpPoly modulus);
    FpPoly to_poly(FFElem a) const;
    FFElem from_poly(const FpPoly& a) const;

    int p_;
    int f_;
    std::uint32_t q_;
    FpPoly modulus_;
    std::uint32_t prim_ = 0;
    std::vector<std::uint32_t> exp_;  // exp_[k] = prim^k, size q-1
    std::vector<std::uint32_t> log_;  // log_[v], v != 0
    std::vector<std::uint32_t> pow_p_;  // digit place values
};

std::ostream& operator<<(std::ostream& os, FFElem a);

/// Embedding F_q -> F_{q^e} sending the generator of the small field to a
/// fixed root of its modulus in the large one.
class FieldEmbedding {
public:
    FieldEmbedding(const FiniteField& small, const FiniteField& big);
    /// The standard degree-e extension of `base` with its embedding.
    static FieldEmbedding extension(const FiniteField& base, int e);

    const FiniteField& small() const { return *small_; }
    const FiniteField& big() const { return *big_; }
    FFElem map(FFElem x) const;
    /// Inverse image, or a DomainError if x is not in the subfield.
    FFElem preimage(FFElem x) const;

private:
    const FiniteField* small_;
    const FiniteField* big_;
    std::vector<std::uint32_t> table_;
};

bool is_prime(long long n);
std::vector<long long> prime_factors(long long n);

}  // namespace hlcf
