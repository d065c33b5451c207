#pragma once

// Exact hypergeometric interval probabilities: for a random K-subset S of
// [N] and a fixed set T, Pr[ | |S cap T| - L | <= beta sqrt(L) ] <= c'' beta.
// The constant c'' is not given in closed form; it is derived once from the
// fixed sweep below and frozen in constants.hpp, and the sweep reproduces
// it exactly on every run.

#include <cstdint>
#include <optional>
#include <vector>

#include "hashlab/constants.hpp"
#include "hashlab/report.hpp"

namespace hashlab {

inline Rational binom_rat(std::uint64_t n, std::uint64_t k) {
    if (k > n) return Rational(0);
    mpz_class b;
    mpz_bin_uiui(b.get_mpz_t(), n, k);
    return Rational(b);
}

struct HypergeomResult {
    Rational measured;  // Pr[ | |S cap T| - L | <= beta sqrt(L) ]
    Rational ratio;     // measured / beta
    Rational L;
    Rational beta;
    bool in_claim_range = false;  // N > 2K > 2, L in [0, K/2], 0 < beta < min(1, sqrt(L))
    bool satisfied = false;       // measured <= c'' * beta (when in range; else vacuous)
    ReportRow row;
};

// L defaults to K*|T|/N, the size that centers the interval on the mean.
inline HypergeomResult hypergeom_claim_check(
    std::uint32_t n, std::uint32_t k, std::uint32_t t_size, const Rational& beta,
    std::optional<Rational> l_override = std::nullopt,
    const Rational& c_frozen = derived_constants::hypergeom_cpp()) {
    if (k < 1 || k > n) throw std::invalid_argument("hypergeom: need 1 <= K <= N");
    if (t_size > n) throw std::invalid_argument("hypergeom: |T| > N");
    if (!(beta > 0)) throw std::invalid_argument("hypergeom: beta must be positive");
    if (n >= (1u << 20)) throw guard_error("hypergeom: N too large for the exact sweep");

    HypergeomResult r;
    r.beta = beta;
    r.L = l_override ? *l_override : Rational(static_cast<long>(k) * t_size, n);
    r.L.canonicalize();
    if (r.L < 0) throw std::invalid_argument("hypergeom: L must be nonnegative");

    // interval condition (R - L)^2 <= beta^2 L, decided exactly per term
    Rational b2l = beta * beta * r.L;
    Rational total = binom_rat(n, k);
    Rational acc = 0;
    for (std::uint32_t overlap = 0; overlap <= std::min(k, t_size); ++overlap) {
        Rational dev = Rational(overlap) - r.L;
        if (dev * dev > b2l) continue;
        acc += binom_rat(t_size, overlap) * binom_rat(n - t_size, k - overlap);
    }
    r.measured = acc / total;
    r.ratio = r.measured / beta;

    r.in_claim_range = (n > 2 * k) && (k > 1) && !(r.L > Rational(static_cast<long>(k), 2)) &&
                       beta < 1 && beta * beta < r.L;
    r.satisfied = !r.in_claim_range || !(r.measured > c_frozen * beta);
    r.row = {"hypergeom",
             {{"n", std::to_string(n)},
              {"k", std::to_string(k)},
              {"tset", std::to_string(t_size)},
              {"beta", fmt(beta)},
              {"L", fmt(r.L)}},
             fmt(r.measured),
             "<=",
             fmt(Rational(c_frozen * beta)),
             r.satisfied,
             {{"ratio", fmt(r.ratio)},
              {"in_claim_range", r.in_claim_range ? "true" : "false"}}};
    return r;
}

struct HypergeomSweep {
    std::vector<HypergeomResult> cells;
    Rational max_ratio;  // max of measured/beta over in-range cells
};

// The fixed sweep the constant is frozen from: all in-range combinations of
// the grids below with the default L = K|T|/N.
inline HypergeomSweep hypergeom_sweep(std::uint32_t n_cap = 200) {
    const std::uint32_t n_grid[] = {8, 12, 16, 24, 32, 48, 64, 96, 128, 200};
    const long beta_num[] = {1, 1, 1, 3, 9};
    const long beta_den[] = {10, 4, 2, 4, 10};

    HypergeomSweep sweep;
    sweep.max_ratio = 0;
    for (std::uint32_t n : n_grid) {
        if (n > n_cap) continue;
        std::vector<std::uint32_t> ks = {2, 3, n / 6, n / 4, (n - 1) / 2};
        std::sort(ks.begin(), ks.end());
        ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
        std::vector<std::uint32_t> ts = {1, n / 8, n / 4, n / 2};
        std::sort(ts.begin(), ts.end());
        ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
        for (std::uint32_t k : ks) {
            if (k < 2 || 2 * k >= n) continue;
            for (std::uint32_t t : ts) {
                if (t < 1) continue;
                for (std::size_t bi = 0; bi < 5; ++bi) {
                    Rational beta(beta_num[bi], beta_den[bi]);
                    auto cell = hypergeom_claim_check(n, k, t, beta);
                    if (!cell.in_claim_range) continue;
                    if (cell.ratio > sweep.max_ratio) sweep.max_ratio = cell.ratio;
                    sweep.cells.push_back(std::move(cell));
                }
            }
        }
    }
    return sweep;
}

}  // namespace hashlab
