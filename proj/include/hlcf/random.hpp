#pragma once

#include <cstdint>
#include <random>

#include "hlcf/tower.hpp"

namespace hlcf {

/// Seeded deterministic generator. Only raw engine output is used (standard
/// distributions are implementation-defined), so sample streams are
/// identical across platforms for a fixed seed.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : eng_(seed) {}

    std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : eng_() % n; }
    int range(int lo, int hi) { return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi - lo + 1))); }
    bool coin() { return (eng_() & 1u) != 0; }

    FFElem field_elem(const FiniteField& F) { return F.elem(static_cast<std::uint32_t>(below(F.order()))); }
    FFElem nonzero_field_elem(const FiniteField& F) {
        return F.elem(1 + static_cast<std::uint32_t>(below(F.order() - 1)));
    }

    /// Exact Laurent polynomial at `level` with exponents in [lo, lo + len)
    /// at every level and random coefficients.
    Elem poly(const Tower& tw, int level, int lo, int len);
    /// Nonzero exact polynomial with a nonzero leading term.
    Elem nonzero_poly(const Tower& tw, int level, int lo, int len);
    /// Exact integral polynomial with constant term 1 (a principal unit at
    /// the outer level when `outer_lo` >= 1 for the other terms).
    Elem unit_poly(const Tower& tw, int level, int len);

private:
    std::mt19937_64 eng_;
};

}  // namespace hlcf
