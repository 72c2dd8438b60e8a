#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hlcf/cohomology.hpp"
#include "hlcf/extensions.hpp"
#include "hlcf/forms.hpp"
#include "hlcf/kgroup.hpp"

namespace hlcf {

/// sigma^k for the stored generator sigma of Gal(L/K).
struct GaloisElem {
    int k = 0;
    int ell = 1;

    bool is_identity() const { return k == 0; }
    GaloisElem operator+(const GaloisElem& o) const;
    friend bool operator==(const GaloisElem& a, const GaloisElem& b) { return a.k == b.k && a.ell == b.ell; }
    std::string to_string() const;
};

/// The degree-1 class of the extension, normalized by chi(sigma) = 1/ell.
CohClass character(const CyclicExt& ext);

struct IndexCertificate {
    int bound = 0;
    std::string kind;    ///< "Gal(F_L/F)", "K_d(F)/ell" or "order p quotient"
    std::string detail;  ///< what was checked
};
/// |K_d(K) : N K_d(L)| <= ell, with the case analysis behind it.
IndexCertificate norm_index_upper(const CyclicExt& ext);

/// The generator map of the wild and ferocious cases on a top-degree form
/// x dlog t_1 ^ ... ^ dlog t_{d-1} of the residue field:
/// wild {1 + x b, t_1, ..., t_{d-1}}, ferocious {1 + x b, t_1, ..., t_{d-2}, pi}.
KClass certificate_symbol(const CyclicExt& ext, const DiffForm& w);

/// A class pairing nonzero with the character of ext. FiltrationError if
/// M < conductor, DomainError if the search is exhausted.
KClass nonnorm_witness(const CyclicExt& ext, int M);

/// Psi(xi) = sigma^k where chi cup xi = k/ell.
GaloisElem psi(const CyclicExt& ext, const KClass& xi, int M);

struct IsoReport {
    std::string ext;
    std::string ramification;
    int ell = 0;
    int break_index = 0;
    int M = 0;
    IndexCertificate index_upper;
    std::string witness;
    InvValue witness_pairing;
    int psi_image_order = 0;
    int kernel_samples = 0;
    int kernel_passed = 0;
    std::vector<std::string> kernel_failures;
    bool verified = false;
    std::string verdict;
};
/// Upper bound, a non-norm witness and psi(N eta) = 0 for `samples` random eta
/// over L with at most one entry from L.
IsoReport verify_iso(const CyclicExt& ext, int samples, int M, std::uint64_t seed = 0);

struct IdentityReport {
    std::vector<InvValue> probe_values;
    bool pairings_vanish = false;
    Comparison normal_forms = Comparison::Unresolved;
};
/// {1-a, 1-b} against {1-ab, -a} + {1-ab, 1-b} - {1-ab, 1-a} in K_2/ell.
/// Probes are characters of the two-dimensional level; a one-dimensional
/// alpha, beta is lifted there for the pairing. The normal forms are compared
/// at the level of alpha and beta.
IdentityReport symbol_identity_check(const Elem& alpha, const Elem& beta, int ell,
                                     const std::vector<CyclicExt>& probes, int M);

}  // namespace hlcf
