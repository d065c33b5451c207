#pragma once

// Constants with no closed form of their own ("absolute constants" in the
// bounds); each is derived from an exhaustive exact sweep in this
// repository and frozen here.  The acceptance suite re-runs the sweeps and
// checks byte-identical reproduction, so a stale value fails loudly.

#include "hashlab/rational.hpp"

namespace hashlab::derived_constants {

// c'' in the hypergeometric interval claim: the exact maximum of
// measured/beta over hypergeom_sweep() (645 in-range cells, N <= 200).
// Reproduce with `hashlab sweep hypergeom`.
inline const Rational& hypergeom_cpp() {
    static const Rational v = scalar_traits<Rational>::parse("40/7");
    return v;
}

// c0^2 for the small-T product growth lower bound: the exact minimum of
// (Delta/eps)^2 / T over the Bernoulli sweep (eps = j/16 for j = 1..8,
// T = 1..16) restricted to Delta <= 3/10 (29 qualifying cells).
// Reproduce with `hashlab sweep prodsmall`.
inline const Rational& growth_c0_sq() {
    static const Rational v = scalar_traits<Rational>::parse("289/512");
    return v;
}

}  // namespace hashlab::derived_constants
