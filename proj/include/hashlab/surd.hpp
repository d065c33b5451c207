#pragma once

// Exact comparisons against thresholds of the form r + sqrt(s) with r, s
// rational, and arithmetic in the quadratic extension Q[sqrt(s)].  The
// 4-wise tail and collision bounds have this shape, so every comparison
// in those pipelines stays exact.

#include "hashlab/rational.hpp"

namespace hashlab {

// value = rat + sqrt(rad), rad >= 0
template <class S>
struct SurdThreshold {
    S rat;
    S rad;

    static SurdThreshold rational(S r) {
        return {std::move(r), scalar_traits<S>::from_int(0)};
    }

    double value() const { return to_double(rat) + std::sqrt(to_double(rad)); }
};

// x <= rat + sqrt(rad)
template <class S>
bool leq_surd(const S& x, const SurdThreshold<S>& t) {
    S d = x - t.rat;
    if (!(d > scalar_traits<S>::from_int(0))) return true;
    return !(d * d > t.rad);
}

template <class S>
bool gt_surd(const S& x, const SurdThreshold<S>& t) {
    return !leq_surd(x, t);
}

// value = u + v * sqrt(s) with u, v >= 0
template <class S>
struct QuadExt {
    S u;
    S v;
    S s;

    double value() const { return to_double(u) + to_double(v) * std::sqrt(to_double(s)); }
};

template <class S>
QuadExt<S> mul(const QuadExt<S>& a, const QuadExt<S>& b) {
    return {a.u * b.u + a.v * b.v * a.s, a.u * b.v + a.v * b.u, a.s};
}

template <class S>
QuadExt<S> pow_quad(QuadExt<S> base, unsigned long e) {
    QuadExt<S> acc{scalar_traits<S>::from_int(1), scalar_traits<S>::from_int(0), base.s};
    while (e) {
        if (e & 1) acc = mul(acc, base);
        base = mul(base, base);
        e >>= 1;
    }
    return acc;
}

// x <= u + v * sqrt(s), assuming v >= 0
template <class S>
bool leq_quad(const S& x, const QuadExt<S>& q) {
    S d = x - q.u;
    if (!(d > scalar_traits<S>::from_int(0))) return true;
    return !(d * d > q.v * q.v * q.s);
}

}  // namespace hashlab
