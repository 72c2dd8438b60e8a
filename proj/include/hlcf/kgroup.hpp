#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hlcf/forms.hpp"
#include "hlcf/tower.hpp"

namespace hlcf {

enum class Comparison { Equal, Different, Unresolved };
std::string to_string(Comparison c);

/// Exponent window used by the p-part normal form. An exponent vector E
/// (outermost first) is inside when E[0] <= M and sum weight[i] * E[i] < T.
/// The weights are positive on every monomial that can occur, so anything
/// produced from data outside the window stays outside.
struct FiltrationBox {
    int level = 0;
    int M = 0;
    std::vector<long> weight;  ///< outermost first, innermost weight 1
    long T = 0;

    bool contains(const std::vector<int>& key) const;
    long weigh(const std::vector<int>& key) const;
};

/// Canonical data of a class in K_n(K)/ell.
///
/// ell = p: generators {1 + c t^E, t_S} with c in F_q, E not divisible by p
/// and t_S omitting the outermost t_k with p not dividing E_k, together with
/// pure symbols {t_S}. Exponents are stored outermost first, so iteration
/// follows the filtration.
///
/// ell prime to p: {g, t_S} (g the primitive element of F_q) and {t_S}.
struct KNormalForm {
    using Mask = DiffForm::Mask;
    using UnitKey = std::pair<std::vector<int>, Mask>;

    int ell = 0;
    int level = 0;
    int degree = 0;
    FiltrationBox box;
    std::map<UnitKey, FFElem> units;
    std::map<Mask, int> pure;
    std::map<Mask, int> constant;
    /// Nonzero data was dropped outside the box.
    bool tail = false;

    bool is_zero() const { return units.empty() && pure.empty() && constant.empty(); }
    /// Zero at every outer level <= m (and no pure or constant part).
    bool vanishes_through(int m) const;
    std::string to_string(const Tower& tw) const;
};

/// Formal sum of symbols {e_1, ..., e_n} in K_n/ell over one tower level.
class KClass {
public:
    KClass(const Tower& tw, int level, int degree, int ell);
    /// {e_1, ..., e_n}; lower-level entries are lifted. DomainError on a zero entry.
    static KClass symbol(std::vector<Elem> entries, int ell);

    const Tower& tower() const { return *tower_; }
    int level() const { return level_; }
    int degree() const { return degree_; }
    int ell() const { return ell_; }
    /// Symbols with nonzero coefficients in [1, ell), keyed by their text.
    const std::map<std::string, std::pair<int, std::vector<Elem>>>& terms() const { return terms_; }
    bool is_formally_zero() const { return terms_.empty(); }

    KClass operator+(const KClass& o) const;
    KClass operator-(const KClass& o) const;
    KClass operator-() const { return times(-1); }
    KClass times(long long k) const;
    void add_symbol(long long coeff, std::vector<Elem> entries);

    /// Normal form with outer filtration bound M (M < 0: the tower precision).
    KNormalForm normal_form(int M = -1) const;
    Comparison compare(const KClass& o, int M = -1) const;

    std::string to_string() const;

private:
    const Tower* tower_;
    int level_;
    int degree_;
    int ell_;
    std::map<std::string, std::pair<int, std::vector<Elem>>> terms_;
};

/// The class of the generators listed in a normal form.
KClass from_normal_form(const Tower& tw, const KNormalForm& nf);

/// Canonical rendering "{e_1, e_2, ...}".
std::string symbol_text(const std::vector<Elem>& entries);

/// gr_0 components: the K_n(F) part and the K_{n-1}(F) part with the
/// convention d{pi, u_2, ..., u_n} = {u_2, ..., u_n}.
struct Gr0Parts {
    KClass main;
    KClass aux;
};
Gr0Parts tame_boundary(const KClass& xi, int M = -1);
/// lift(main) + {pi, lift(aux)}.
KClass symbol_from_gr0(const Gr0Parts& parts, int level);

/// Form representative of a class of U_m in gr_m: main in Omega^{n-1}_F for
/// the symbols {1 + pi^m x, y_1, ..., y_{n-1}}, aux in Omega^{n-2}_F for
/// {1 + pi^m x, y_1, ..., y_{n-2}, pi}.
struct GradedRep {
    int m = 0;
    DiffForm main;
    std::optional<DiffForm> aux;
};
/// FiltrationError if xi is not in U_m within the box, PrecisionError if the
/// entries do not determine level m. M >= m fixes the box as in normal_form.
GradedRep graded_expand(const KClass& xi, int m, int M = -1);
/// p does not divide m: fold aux into main. p | m: reduce both modulo closed forms.
GradedRep canonical_graded(const GradedRep& rep);
/// Symbols realizing a representative; unknown coefficient tails are dropped.
KClass symbol_from_form(const GradedRep& rep, int ell);

struct DivisibilityReport {
    int samples = 0;
    int zero = 0;
    int nonzero = 0;
    int inconclusive = 0;
    std::vector<std::string> failures;
};
/// Normal forms of random {a, b} in K_2(F)/p for F = tower level `level`.
DivisibilityReport p_divisibility_check(const Tower& tw, int level, int samples, std::uint64_t seed,
                                        int M = -1);

}  // namespace hlcf
