#pragma once

// Growth of statistical distance over iid products, plus the randomized
// reduction to a Bernoulli pair: the event set with maximal advantage is
// kept, everything else is ORed with a biased coin tuned so the reference
// distribution lands exactly on a fair coin.

#include <cstdint>
#include <optional>
#include <vector>

#include "hashlab/dist.hpp"
#include "hashlab/report.hpp"

namespace hashlab {

// Delta(x^t, y^t), exact.  Domain 2 goes through weight classes (binomial
// counts); larger domains enumerate the product within the guard.
template <class S>
S product_stat_dist(const Dist<S>& x, const Dist<S>& y, std::uint32_t t,
                    std::uint64_t guard_cells = (1ull << 22)) {
    if (x.domain_size() != y.domain_size())
        throw std::invalid_argument("product_stat_dist: domain mismatch");
    if (t == 0) throw std::invalid_argument("product_stat_dist: t must be >= 1");
    const S zero = scalar_traits<S>::from_int(0);
    S acc = zero;
    if (x.domain_size() == 2) {
        mpz_class binom;
        for (std::uint32_t w = 0; w <= t; ++w) {
            S px = pow_int(x[0], t - w) * pow_int(x[1], w);
            S py = pow_int(y[0], t - w) * pow_int(y[1], w);
            S diff = px - py;
            if (diff < zero) diff = -diff;
            mpz_bin_uiui(binom.get_mpz_t(), t, w);
            if constexpr (scalar_traits<S>::exact) {
                acc += Rational(binom) * diff;
            } else {
                acc += binom.get_d() * diff;
            }
        }
        return acc / scalar_traits<S>::from_int(2);
    }
    std::uint64_t cells = 1;
    for (std::uint32_t i = 0; i < t; ++i) {
        cells *= x.domain_size();
        if (cells > guard_cells) throw guard_error("product_stat_dist: product exceeds guard");
    }
    auto walk = [&](auto&& self, std::uint32_t depth, const S& px, const S& py) -> void {
        if (depth == t) {
            S diff = px - py;
            if (diff < zero) diff = -diff;
            acc += diff;
            return;
        }
        for (std::uint32_t v = 0; v < x.domain_size(); ++v)
            self(self, depth + 1, S(px * x[v]), S(py * y[v]));
    };
    walk(walk, 0, scalar_traits<S>::from_int(1), scalar_traits<S>::from_int(1));
    return acc / scalar_traits<S>::from_int(2);
}

// Randomized function f with f(y) exactly uniform on {0,1} and
// Delta(f(x), f(y)) >= Delta(x, y)/2: f(v) = [v in T] OR b, where T is a
// maximal-advantage event with Pr[y in T] <= 1/2 and Pr[b = 0] = 1/(2(1-p)).
template <class S>
struct BernoulliReduction {
    std::vector<std::uint32_t> event;  // the kept threshold set T
    S event_mass_y{};                  // p = Pr[y in T]
    S coin_p0{};                       // Pr[b = 0]
    S eps{};                           // Delta(x, y)
    S delta_f{};                       // Delta(f(x), f(y)), exact
    bool ok = false;                   // delta_f >= eps / 2
};

template <class S>
BernoulliReduction<S> bernoulli_reduction(const Dist<S>& x, const Dist<S>& y) {
    if (x.domain_size() != y.domain_size())
        throw std::invalid_argument("reduction: domain mismatch");
    const S zero = scalar_traits<S>::from_int(0);
    const S one = scalar_traits<S>::from_int(1);
    const S half = frac<S>(1, 2);

    BernoulliReduction<S> r;
    r.eps = stat_dist(x, y);
    // maximal advantage event {v : x(v) > y(v)}
    S py = zero;
    for (std::uint32_t v = 0; v < x.domain_size(); ++v)
        if (x[v] > y[v]) {
            r.event.push_back(v);
            py += y[v];
        }
    if (py > half) {  // complement keeps the advantage, flips the sign
        std::vector<std::uint32_t> comp;
        S mass = zero;
        for (std::uint32_t v = 0; v < x.domain_size(); ++v)
            if (!(x[v] > y[v])) {
                comp.push_back(v);
                mass += y[v];
            }
        r.event = std::move(comp);
        py = mass;
    }
    r.event_mass_y = py;
    r.coin_p0 = one / (scalar_traits<S>::from_int(2) * (one - py));

    // Pr[f(x) = 0] = Pr[x not in T] * Pr[b = 0]; Pr[f(y) = 0] = 1/2 exactly
    S px_out = one;
    for (std::uint32_t v : r.event) px_out -= x[v];
    S f0 = px_out * r.coin_p0;
    S d = f0 - half;
    if (d < zero) d = -d;
    r.delta_f = d;
    r.ok = !(r.eps / scalar_traits<S>::from_int(2) > r.delta_f);
    return r;
}

template <class S>
struct GrowthTable {
    std::vector<S> deltas;  // deltas[i] = Delta(x^(i+1), y^(i+1))
    BernoulliReduction<S> reduction;
    std::vector<ReportRow> rows;
};

template <class S>
GrowthTable<S> product_growth_small(const Dist<S>& x, const Dist<S>& y, std::uint32_t t_max,
                                    std::uint64_t guard_cells = (1ull << 22)) {
    GrowthTable<S> out;
    for (std::uint32_t t = 1; t <= t_max; ++t)
        out.deltas.push_back(product_stat_dist(x, y, t, guard_cells));
    out.reduction = bernoulli_reduction(x, y);
    for (std::uint32_t t = 1; t <= t_max; ++t) {
        bool monotone = t == 1 || !(out.deltas[t - 2] > out.deltas[t - 1]);
        out.rows.push_back({"product_growth_small",
                            {{"t", std::to_string(t)}},
                            fmt(out.deltas[t - 1]),
                            ">=",
                            t == 1 ? fmt(out.deltas[0]) : fmt(out.deltas[t - 2]),
                            monotone,
                            {}});
    }
    out.rows.push_back({"bernoulli_reduction",
                        {{"eps", fmt(out.reduction.eps)}},
                        fmt(out.reduction.delta_f),
                        ">=",
                        fmt(S(out.reduction.eps / scalar_traits<S>::from_int(2))),
                        out.reduction.ok,
                        {{"event_mass_y", fmt(out.reduction.event_mass_y)},
                         {"coin_p0", fmt(out.reduction.coin_p0)}}});
    return out;
}

// Delta of t-fold products of the canonical pair at distance eps
// (Bernoulli(1/2 - eps) vs a fair coin) against 1 - e^(-t eps^2 / 2).
template <class S>
struct LargeGrowthResult {
    S measured{};
    double bound = 0;
    bool satisfied = false;
    ReportRow row;
};

template <class S>
LargeGrowthResult<S> product_growth_large(const S& eps, std::uint32_t t) {
    const S half = frac<S>(1, 2);
    if (!(eps > scalar_traits<S>::from_int(0)) || eps > half)
        throw std::invalid_argument("product_growth_large: eps must be in (0, 1/2]");
    Dist<S> x(2, {half - eps, half + eps});
    Dist<S> u = Dist<S>::uniform(2);
    LargeGrowthResult<S> r;
    r.measured = product_stat_dist(x, u, t);
    double e = to_double(eps);
    r.bound = 1.0 - std::exp(-0.5 * t * e * e);
    r.satisfied = to_double(r.measured) + 1e-12 >= r.bound;
    r.row = {"product_growth_large",
             {{"eps", fmt(eps)}, {"t", std::to_string(t)}},
             fmt(r.measured),
             ">=",
             fmt_double(r.bound),
             r.satisfied,
             {}};
    return r;
}

}  // namespace hashlab
