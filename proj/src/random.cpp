#include "hlcf/random.hpp"

namespace hlcf {

Elem Rng::poly(const Tower& tw, int level, int lo, int len) {
    if (level == 0) return Elem::constant(tw, 0, field_elem(tw.field()));
    std::vector<Elem> co;
    for (int i = 0; i < len; ++i) co.push_back(poly(tw, level - 1, lo, len));
    return Elem::series(tw, level, lo, std::move(co));
}

Elem Rng::nonzero_poly(const Tower& tw, int level, int lo, int len) {
    if (level == 0) return Elem::constant(tw, 0, nonzero_field_elem(tw.field()));
    std::vector<Elem> co;
    co.push_back(nonzero_poly(tw, level - 1, lo, len));
    for (int i = 1; i < len; ++i) co.push_back(poly(tw, level - 1, lo, len));
    return Elem::series(tw, level, lo, std::move(co));
}

Elem Rng::unit_poly(const Tower& tw, int level, int len) {
    // Leading coefficient is a unit of the residue field, so the result is a
    // unit at the outer level.
    std::vector<Elem> co;
    co.push_back(level == 1 ? Elem::constant(tw, 0, nonzero_field_elem(tw.field()))
                            : nonzero_poly(tw, level - 1, 0, len));
    for (int i = 1; i < len; ++i) co.push_back(poly(tw, level - 1, 0, len));
    return Elem::series(tw, level, 0, std::move(co));
}

}  // namespace hlcf
