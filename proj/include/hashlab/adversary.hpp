#pragma once

// Lower-bound witnesses: seeded randomized search for flat sources whose
// hashed image is far from uniform, the explicit split-domain family
// instance with its exact certificate, and farness-from-low-cp
// certification via water-filling.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hashlab/bounds.hpp"
#include "hashlab/rng.hpp"

namespace hashlab {

// Fraction of family indices whose image of the flat source is eps-far
// from uniform, exactly.  At the eps = 0 boundary this counts any
// deviation, i.e. one minus the fraction of exactly uniform images.
template <class S>
S fraction_far(const HashFamily& f, const FlatSource& src, const S& eps) {
    if (src.domain_size != f.domain_size())
        throw std::invalid_argument("fraction_far: domain mismatch");
    const S zero = scalar_traits<S>::from_int(0);
    const S unif = frac<S>(1, f.range_size());
    const S share = frac<S>(1, static_cast<long>(src.support.size()));
    const bool boundary = !(eps > zero);
    std::uint64_t far = 0;
    std::vector<S> image(f.range_size(), zero);
    for (std::uint64_t h = 0; h < f.family_size(); ++h) {
        std::fill(image.begin(), image.end(), zero);
        for (std::uint32_t x : src.support) image[f.eval(h, x)] += share;
        S dist = zero;
        for (const S& m : image) {
            S d = m - unif;
            if (d < zero) d = -d;
            dist += d;
        }
        dist /= scalar_traits<S>::from_int(2);
        far += boundary ? dist > zero : !(dist < eps);
    }
    S out = frac<S>(static_cast<long>(far), 1);
    return out / scalar_traits<S>::from_int(static_cast<long>(f.family_size()));
}

template <class S>
struct FlatSearchResult {
    FlatSource best;
    S best_fraction{};
    std::uint64_t seed = 0;
    std::uint64_t trials = 0;
    bool exhaustive = false;
};

// Probabilistic-method search made constructive: sample `trials` uniform
// size-K supports with per-trial derived seeds, score each exactly, and
// return the argmax (ties break to the lexicographically smallest
// support).
template <class S>
FlatSearchResult<S> search_flat_source(const HashFamily& f, std::uint32_t k, const S& eps,
                                       std::uint64_t trials, std::uint64_t seed) {
    if (k < 1 || k > f.domain_size()) throw std::invalid_argument("search: K out of range");
    if (trials < 1) throw std::invalid_argument("search: need at least one trial");
    FlatSearchResult<S> out;
    out.seed = seed;
    out.trials = trials;
    bool have = false;
    for (std::uint64_t trial = 0; trial < trials; ++trial) {
        SplitMix64 g(child_seed(seed, trial));
        FlatSource cand(f.domain_size(), g.subset(f.domain_size(), k));
        S frac_far = fraction_far(f, cand, eps);
        bool better = !have || frac_far > out.best_fraction ||
                      (frac_far == out.best_fraction && cand.support < out.best.support);
        if (better) {
            out.best = cand;
            out.best_fraction = frac_far;
            have = true;
        }
    }
    return out;
}

// Exhaustive variant over all C(N, K) supports (guarded); dominates any
// randomized search result.
template <class S>
FlatSearchResult<S> search_flat_source_exhaustive(const HashFamily& f, std::uint32_t k,
                                                  const S& eps,
                                                  std::uint64_t guard_supports = 100000) {
    long double combos = 1;
    for (std::uint32_t i = 0; i < k; ++i)
        combos = combos * (f.domain_size() - i) / (i + 1);
    if (combos > static_cast<long double>(guard_supports))
        throw guard_error("search: C(N,K) exceeds the exhaustive guard");
    FlatSearchResult<S> out;
    out.exhaustive = true;
    bool have = false;
    detail::for_each_subset(f.domain_size(), k, [&](const std::vector<std::uint32_t>& pts) {
        FlatSource cand(f.domain_size(), pts);
        S frac_far = fraction_far(f, cand, eps);
        if (!have || frac_far > out.best_fraction) {
            out.best = cand;
            out.best_fraction = frac_far;
            have = true;
        }
    });
    return out;
}

// Serializable certificate for a lower-bound instance.
struct LowerBoundWitness {
    std::string family;
    std::string source;
    std::string claimed_property;
    std::uint64_t seed = 0;
    bool satisfied = false;
    KV certificate;  // exact fraction strings, fixed order
};

// Largest gamma on the grid such that every distribution within
// statistical distance gamma of the joint still has collision probability
// above alpha / (product of axis sizes).  Zero means no farness certified.
template <class S>
S farness_from_low_cp(const JointDist<S>& joint, const S& alpha,
                      const std::vector<S>& budget_grid) {
    if (!scalar_traits<S>::exact)
        throw std::invalid_argument("farness_from_low_cp: exact mode required");
    S threshold = alpha / scalar_traits<S>::from_int(static_cast<long>(joint.size()));
    S best = scalar_traits<S>::from_int(0);
    for (const S& gamma : budget_grid) {
        if (gamma < scalar_traits<S>::from_int(0) || !(gamma < scalar_traits<S>::from_int(1)))
            continue;
        if (min_cp_within_distance(joint, gamma) > threshold && gamma > best) best = gamma;
    }
    return best;
}

template <class S>
std::vector<S> default_budget_grid() {
    std::vector<S> grid;
    for (int k = 0; k < 100; ++k) grid.push_back(frac<S>(k, 100));
    return grid;
}

// ---------------------------------------------------------------------------
// Statistical-distance lower bound witness: search for a flat source, take
// iid copies, and measure the exact distance of (H, Y) from uniform.
template <class S>
struct LbStatResult {
    LowerBoundWitness witness;
    FlatSearchResult<S> search;
    S measured_farness{};
    S per_h_average{};  // mean over h of the slice distance; equals the joint distance
};

template <class S>
LbStatResult<S> lb_stat_witness(const HashFamily& f, std::uint32_t k, const S& single_eps,
                                const S& target, std::uint32_t t, std::uint64_t trials,
                                std::uint64_t seed,
                                std::uint64_t guard_cells = (1ull << 24)) {
    LbStatResult<S> r;
    r.search = search_flat_source(f, k, single_eps, trials, seed);
    auto src = BlockSourceTree<S>::iid(r.search.best.template to_dist<S>(), t);
    auto joint = hashed_joint(f, src, guard_cells);
    auto uniform = JointDist<S>::uniform(joint.axes());
    r.measured_farness = stat_dist(joint, uniform);

    // by uniformity of H, the joint distance is the average slice distance
    const S inv_h = frac<S>(1, static_cast<long>(f.family_size()));
    S acc = scalar_traits<S>::from_int(0);
    for (std::uint64_t h = 0; h < f.family_size(); ++h) {
        auto slice = hashed_given_h(f, h, src, guard_cells);
        acc += stat_dist(slice.flatten(), Dist<S>::uniform(slice.flatten().domain_size()));
    }
    r.per_h_average = acc * inv_h;

    std::string support;
    for (std::size_t i = 0; i < r.search.best.support.size(); ++i)
        support += (i ? "," : "") + std::to_string(r.search.best.support[i]);
    r.witness.family = f.descriptor();
    r.witness.source = "flat:n" + std::to_string(f.domain_size()) + ":support=" + support;
    r.witness.claimed_property = "stat_farness";
    r.witness.seed = seed;
    r.witness.satisfied = !(r.measured_farness < target);
    r.witness.certificate = {{"fraction_far", fmt(r.search.best_fraction)},
                             {"single_eps", fmt(single_eps)},
                             {"t", std::to_string(t)},
                             {"measured_farness", fmt(r.measured_farness)},
                             {"target", fmt(target)}};
    return r;
}

// ---------------------------------------------------------------------------
// The explicit split-domain 2-universal lower bound instance.
template <class S>
struct Lb2UnivResult {
    LowerBoundWitness witness;
    S bad_fraction{};
    S bad_cp{};                 // collision probability of h(X) at every bad index
    S eps{};                    // the construction's eps = s / (4 M^t)
    double bad_closeness = 0;   // max Hellinger closeness over bad indices
    double closeness_bound = 0; // stated bound 1 - M/(64 K eps)
    double proof_bound = 0;     // the stronger 1 - M^2/(64 K eps) from the proof
    bool stated_bound_ok = false;
    bool proof_bound_ok = false;
    bool good_uniform = true;
    bool universal_pairs_ok = false;  // recorded, not asserted: the zero
                                      // vectors of two sub-domains always collide
    S farness_gamma{};          // certified farness of the iid-T joint from low cp
};

template <class S>
Lb2UnivResult<S> lb_2univ_witness(std::uint32_t m, std::uint32_t t, std::uint32_t s,
                                  std::uint32_t blocks, const S& alpha,
                                  std::uint64_t guard_cells = (1ull << 24)) {
    SplitDomainFamily fam(m, t, s);
    const std::uint32_t mt = fam.big_field_ref().order();
    const std::uint32_t n = fam.domain_size();
    const std::uint64_t k = static_cast<std::uint64_t>(s) * mt;

    Lb2UnivResult<S> r;
    r.eps = frac<S>(s, 1) / frac<S>(4 * static_cast<long>(mt), 1);

    const S zero = scalar_traits<S>::from_int(0);
    std::uint64_t bad = 0;
    bool first_bad = true;
    r.bad_cp = zero;
    std::vector<S> image(m, zero);
    const S share = frac<S>(1, static_cast<long>(n));
    double worst_closeness = 0;
    for (std::uint32_t a = 0; a < mt; ++a)
        for (std::uint32_t b = 0; b < mt; ++b) {
            std::uint32_t zero_seeds = 0;
            for (std::uint32_t i = 0; i < s; ++i) zero_seeds += fam.seed_for(a, b, i) == 0;
            bool is_bad = (b != 0) && zero_seeds == 1;
            bool is_good = (b != 0) && zero_seeds == 0;

            std::fill(image.begin(), image.end(), zero);
            for (std::uint32_t x = 0; x < n; ++x)
                image[fam.eval(static_cast<std::uint64_t>(a) * mt + b, x)] += share;
            Dist<S> img(m, image);
            if (is_bad) {
                ++bad;
                S c = cp(img);
                if (first_bad) {
                    r.bad_cp = c;
                    first_bad = false;
                } else if (c != r.bad_cp) {
                    r.witness.certificate.emplace_back("bad_cp_mismatch", fmt(c));
                }
                worst_closeness = std::max(worst_closeness, hellinger_closeness(img));
            } else if (is_good) {
                for (std::uint32_t y = 0; y < m; ++y)
                    if (img[y] != frac<S>(1, m)) r.good_uniform = false;
            }
        }
    r.bad_fraction = frac<S>(static_cast<long>(bad), 1) /
                     frac<S>(static_cast<long>(fam.family_size()), 1);
    r.bad_closeness = worst_closeness;

    double keps = to_double(S(frac<S>(static_cast<long>(k), 1) * r.eps));
    r.closeness_bound = 1.0 - m / (64.0 * keps);
    r.proof_bound = 1.0 - (double)m * m / (64.0 * keps);
    r.stated_bound_ok = worst_closeness <= r.closeness_bound + 1e-12;
    r.proof_bound_ok = worst_closeness <= r.proof_bound + 1e-12;
    r.universal_pairs_ok = verify_universal(fam, 2).ok;

    // farness of the iid joint from all low-cp distributions, desk scale
    auto src = BlockSourceTree<S>::iid(Dist<S>::uniform(n), blocks);
    auto joint = hashed_joint(fam, src, guard_cells);
    r.farness_gamma = farness_from_low_cp(joint, alpha, default_budget_grid<S>());

    r.witness.family = fam.descriptor();
    r.witness.source = "flat:n" + std::to_string(n) + ":support=all,iid_t=" +
                       std::to_string(blocks);
    r.witness.claimed_property = "lb_2univ";
    r.witness.satisfied = r.stated_bound_ok && r.good_uniform &&
                          r.bad_fraction ==
                              S(frac<S>(static_cast<long>((mt - 1)), 1) *
                                frac<S>(s, 1) / frac<S>(static_cast<long>(mt), 1) /
                                frac<S>(static_cast<long>(mt), 1));
    KV cert{{"k", std::to_string(k)},
            {"eps", fmt(r.eps)},
            {"bad_fraction", fmt(r.bad_fraction)},
            {"bad_cp", fmt(r.bad_cp)},
            {"bad_closeness", fmt_double(r.bad_closeness)},
            {"closeness_bound_stated", fmt_double(r.closeness_bound)},
            {"closeness_bound_proof", fmt_double(r.proof_bound)},
            {"proof_bound_ok", r.proof_bound_ok ? "true" : "false"},
            {"good_uniform", r.good_uniform ? "true" : "false"},
            {"universal_pairs_ok", r.universal_pairs_ok ? "true" : "false"},
            {"closeness_decay_t", fmt_double(std::pow(r.bad_closeness, blocks))},
            {"farness_gamma", fmt(r.farness_gamma)},
            {"alpha", fmt(alpha)}};
    for (auto& kv : cert) r.witness.certificate.push_back(std::move(kv));
    return r;
}

// ---------------------------------------------------------------------------
// Support-counting route: iid copies of an arbitrary flat K-source have a
// hashed support of at most |H| K^T tuples; when that is small enough, the
// water-filled minimum certifies farness from every low-cp distribution.
template <class S>
struct SupportCountResult {
    std::uint64_t support_size = 0;
    std::uint64_t support_bound = 0;  // |H| K^T
    bool premise = false;             // support <= (delta^2 / 4 alpha) M^T
    bool certified = false;           // min_sq_mass(Y, delta) > alpha / M^T
    S min_cp{};
    S threshold{};
    ReportRow row;
};

template <class S>
SupportCountResult<S> support_counting_bound(const HashFamily& f, std::uint32_t k,
                                             std::uint32_t t, const S& alpha, const S& delta,
                                             std::uint64_t guard_cells = (1ull << 24)) {
    if (k < 1 || k > f.domain_size()) throw std::invalid_argument("support: K out of range");
    std::vector<std::uint32_t> pts(k);
    for (std::uint32_t i = 0; i < k; ++i) pts[i] = i;
    auto src = BlockSourceTree<S>::iid(Dist<S>::flat(f.domain_size(), pts), t);
    auto joint = hashed_joint(f, src, guard_cells);
    std::vector<std::string> ynames;
    for (std::uint32_t i = 1; i <= t; ++i) ynames.push_back("Y" + std::to_string(i));
    auto ymarg = joint.marginal(ynames);

    SupportCountResult<S> r;
    for (const S& msp : ymarg.mass()) r.support_size += msp > scalar_traits<S>::from_int(0);
    r.support_bound = f.family_size();
    for (std::uint32_t i = 0; i < t; ++i) r.support_bound *= k;

    S mt = scalar_traits<S>::from_int(1);
    for (std::uint32_t i = 0; i < t; ++i) mt *= scalar_traits<S>::from_int(f.range_size());
    S cap = delta * delta / (frac<S>(4, 1) * alpha) * mt;
    r.premise = !(frac<S>(static_cast<long>(r.support_size), 1) > cap);
    r.threshold = alpha / mt;
    r.min_cp = min_sq_mass(ymarg.flatten(), delta).min_sq_mass;
    r.certified = r.premise && r.min_cp > r.threshold;
    r.row = {"support_counting",
             {{"family", f.descriptor()},
              {"k", std::to_string(k)},
              {"t", std::to_string(t)},
              {"alpha", fmt(alpha)},
              {"delta", fmt(delta)}},
             std::to_string(r.support_size),
             "<=",
             std::to_string(r.support_bound),
             r.support_size <= r.support_bound,
             {{"premise", r.premise ? "true" : "false"},
              {"certified", r.certified ? "true" : "false"},
              {"min_cp_at_delta", fmt(r.min_cp)},
              {"cp_threshold", fmt(r.threshold)}}};
    return r;
}

// ---------------------------------------------------------------------------
// Witness for the no-hash-axis lower bound: certify farness of the
// Y-marginal itself (coupling any candidate Z back through H).
template <class S>
struct LbNoHResult {
    LowerBoundWitness witness;
    S gamma_marginal{};
    S gamma_joint{};
};

template <class S>
LbNoHResult<S> lb_no_h_witness(const HashFamily& f, std::uint32_t k, const S& single_eps,
                               std::uint32_t t, const S& alpha, std::uint64_t trials,
                               std::uint64_t seed, std::uint64_t guard_cells = (1ull << 24)) {
    auto search = search_flat_source(f, k, single_eps, trials, seed);
    auto src = BlockSourceTree<S>::iid(search.best.template to_dist<S>(), t);
    auto joint = hashed_joint(f, src, guard_cells);
    std::vector<std::string> ynames;
    for (std::uint32_t i = 1; i <= t; ++i) ynames.push_back("Y" + std::to_string(i));
    auto ymarg = joint.marginal(ynames);

    LbNoHResult<S> r;
    auto grid = default_budget_grid<S>();
    // marginal: threshold alpha / M^T; joint: alpha / (|H| M^T).  A
    // marginal certificate always implies the joint one, never conversely.
    r.gamma_marginal = farness_from_low_cp(ymarg, alpha, grid);
    r.gamma_joint = farness_from_low_cp(joint, alpha, grid);

    std::string support;
    for (std::size_t i = 0; i < search.best.support.size(); ++i)
        support += (i ? "," : "") + std::to_string(search.best.support[i]);
    r.witness.family = f.descriptor();
    r.witness.source = "flat:n" + std::to_string(f.domain_size()) + ":support=" + support;
    r.witness.claimed_property = "lb_no_h";
    r.witness.seed = seed;
    r.witness.satisfied = r.gamma_marginal > scalar_traits<S>::from_int(0);
    r.witness.certificate = {{"gamma_marginal", fmt(r.gamma_marginal)},
                             {"gamma_joint", fmt(r.gamma_joint)},
                             {"alpha", fmt(alpha)},
                             {"t", std::to_string(t)},
                             {"fraction_far", fmt(search.best_fraction)}};
    return r;
}

}  // namespace hashlab
