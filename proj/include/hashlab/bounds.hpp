#pragma once

// Mechanical checkers for the upper-bound lemmas and theorems: leftover
// hashing, conditional-cp chains, the Markov tail, the distribution
// transformer that repairs heavy tails, and the full collision/statistical
// closeness pipelines for pairwise-independent and 4-wise independent
// families.  Every measured quantity is exact; bounds involving square
// roots are compared in the quadratic extension, not in floating point.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "hashlab/report.hpp"
#include "hashlab/source.hpp"
#include "hashlab/surd.hpp"

namespace hashlab {

namespace detail {

// Prefix mass arrays for one hash slice: level[j] holds the masses of all
// length-j prefixes (row-major), level[T] being the cells themselves.
template <class S>
std::vector<std::vector<S>> prefix_levels(const std::vector<S>& slice,
                                          const std::vector<std::uint32_t>& sizes) {
    const std::uint32_t t = static_cast<std::uint32_t>(sizes.size());
    std::vector<std::vector<S>> level(t + 1);
    level[t] = slice;
    for (std::uint32_t j = t; j-- > 0;) {
        level[j].assign(level[j + 1].size() / sizes[j], scalar_traits<S>::from_int(0));
        for (std::size_t idx = 0; idx < level[j + 1].size(); ++idx)
            level[j][idx / sizes[j]] += level[j + 1][idx];
    }
    return level;
}

// Collision probability of block j+1 conditioned on prefix p (weight w > 0).
template <class S>
S node_cond_cp(const std::vector<std::vector<S>>& level, std::uint32_t j, std::uint64_t p,
               std::uint32_t size_j, const S& w) {
    S sq = scalar_traits<S>::from_int(0);
    for (std::uint32_t y = 0; y < size_j; ++y) {
        const S& c = level[j + 1][p * size_j + y];
        sq += c * c;
    }
    return sq / (w * w);
}

// Walk one slice applying the truncation rule: descend while the running
// average excess (1/T) sum_i (cp_i - 1/M_i) stays <= alpha; at the first
// crossing, the whole subtree resamples uniformly.  Returns the rejected
// (truncated) mass; if `out` is non-null, writes the transformed slice.
template <class S>
S modify_slice(const std::vector<S>& slice, const std::vector<std::uint32_t>& sizes,
               const SurdThreshold<S>& alpha, std::vector<S>* out) {
    const std::uint32_t t = static_cast<std::uint32_t>(sizes.size());
    auto level = prefix_levels(slice, sizes);
    std::vector<std::uint64_t> cells_below(t + 1);
    cells_below[t] = 1;
    for (std::uint32_t j = t; j-- > 0;) cells_below[j] = cells_below[j + 1] * sizes[j];

    const S zero = scalar_traits<S>::from_int(0);
    const S invt = frac<S>(1, t);
    S rejected = zero;

    auto walk = [&](auto&& self, std::uint32_t j, std::uint64_t p, const S& b) -> void {
        const S& w = level[j][p];
        if (!(w > zero)) return;
        if (j == t) {
            if (out) (*out)[p] += w;
            return;
        }
        S c = node_cond_cp(level, j, p, sizes[j], w);
        S bnext = b + (c - frac<S>(1, sizes[j])) * invt;
        if (gt_surd(bnext, alpha)) {
            rejected += w;
            if (out) {
                S share = w / scalar_traits<S>::from_int(static_cast<long>(cells_below[j]));
                std::uint64_t base = p * cells_below[j];
                for (std::uint64_t k = 0; k < cells_below[j]; ++k) (*out)[base + k] += share;
            }
            return;
        }
        for (std::uint32_t y = 0; y < sizes[j]; ++y) self(self, j + 1, p * sizes[j] + y, bnext);
    };
    walk(walk, 0, 0, zero);
    return rejected;
}

template <class S>
std::vector<std::uint32_t> block_sizes(const JointDist<S>& joint) {
    if (joint.axes().size() < 2 || joint.axes()[0].name != "H")
        throw std::invalid_argument("expected a joint with hash axis \"H\" first");
    std::vector<std::uint32_t> sizes;
    for (std::size_t i = 1; i < joint.axes().size(); ++i) sizes.push_back(joint.axes()[i].size);
    return sizes;
}

inline void require_2universal(const HashFamily& f) {
    if (!verify_universal(f, 2).ok)
        throw std::invalid_argument("family " + f.descriptor() + " is not 2-universal");
}

inline void require_4wise(const HashFamily& f) {
    if (!verify_s_wise(f, 4).ok)
        throw std::invalid_argument("family " + f.descriptor() + " is not 4-wise independent");
}

template <class S>
void require_block_source(const BlockSourceTree<S>& src, std::uint64_t k) {
    auto v = validate_block_k_source(src, k);
    if (!v.ok)
        throw std::invalid_argument("source is not a block " + std::to_string(k) +
                                    "-source (worst conditional cp " + fmt(v.worst_cp) + ")");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Leftover hashing: cp(H(X) | H) <= 1/M + 1/K for 2-universal families and
// cp(X) <= 1/K.
template <class S>
struct LhlResult {
    S measured{};
    S bound{};
    bool satisfied = false;
    ReportRow row;
};

template <class S>
LhlResult<S> lhl_check(const HashFamily& f, const Dist<S>& x, std::uint64_t k) {
    detail::require_2universal(f);
    if (x.domain_size() != f.domain_size())
        throw std::invalid_argument("lhl: source domain mismatch");
    S cpx = cp(x);
    if (cpx > frac<S>(1, static_cast<long>(k)))
        throw std::invalid_argument("lhl: cp(x) exceeds 1/K for declared K");

    const S zero = scalar_traits<S>::from_int(0);
    S acc = zero;
    std::vector<S> image(f.range_size(), zero);
    for (std::uint64_t h = 0; h < f.family_size(); ++h) {
        std::fill(image.begin(), image.end(), zero);
        for (std::uint32_t v = 0; v < f.domain_size(); ++v)
            if (x[v] > zero) image[f.eval(h, v)] += x[v];
        for (const S& m : image) acc += m * m;
    }
    LhlResult<S> r;
    r.measured = acc / scalar_traits<S>::from_int(static_cast<long>(f.family_size()));
    r.bound = frac<S>(1, f.range_size()) + frac<S>(1, static_cast<long>(k));
    r.satisfied = !(r.measured > r.bound);
    r.row = {"lhl",
             {{"family", f.descriptor()}, {"k", std::to_string(k)}},
             fmt(r.measured),
             "<=",
             fmt(r.bound),
             r.satisfied,
             {{"cp_x", fmt(cpx)}}};
    return r;
}

// ---------------------------------------------------------------------------
// Conditional-cp chain: max_i cp(Y_i | H, Y_{<i}) <= 1/M + 1/K.
template <class S>
struct ChainResult {
    S measured{};  // the worst block
    S bound{};
    std::vector<S> per_block;
    bool satisfied = false;
    ReportRow row;
};

template <class S>
ChainResult<S> cond_cp_chain_check(const HashFamily& f, const BlockSourceTree<S>& src,
                                   std::uint64_t k, std::uint64_t guard_cells = (1ull << 24)) {
    detail::require_2universal(f);
    detail::require_block_source(src, k);

    auto slices = hashed_slices(f, src, guard_cells);
    std::vector<std::uint32_t> sizes(src.blocks(), f.range_size());
    const S zero = scalar_traits<S>::from_int(0);
    const S inv_h = frac<S>(1, static_cast<long>(f.family_size()));

    ChainResult<S> r;
    r.per_block.assign(src.blocks(), zero);
    for (const auto& slice : slices) {
        auto level = detail::prefix_levels(slice, sizes);
        for (std::uint32_t i = 0; i < src.blocks(); ++i) {
            // E over prefixes of this slice of cp(Y_{i+1} | prefix), in
            // slice units; the slice itself sums to 1 given h.
            S acc = zero;
            for (std::uint64_t p = 0; p < level[i].size(); ++p) {
                const S& w = level[i][p];
                if (!(w > zero)) continue;
                S sq = zero;
                for (std::uint32_t y = 0; y < sizes[i]; ++y) {
                    const S& c = level[i + 1][p * sizes[i] + y];
                    sq += c * c;
                }
                acc += sq / w;
            }
            r.per_block[i] += acc * inv_h;
        }
    }
    r.measured = r.per_block[0];
    for (const S& v : r.per_block)
        if (v > r.measured) r.measured = v;
    r.bound = frac<S>(1, f.range_size()) + frac<S>(1, static_cast<long>(k));
    r.satisfied = !(r.measured > r.bound);
    KV extras{{"cp_H", fmt(inv_h)}};
    for (std::uint32_t i = 0; i < src.blocks(); ++i)
        extras.emplace_back("block" + std::to_string(i + 1), fmt(r.per_block[i]));
    r.row = {"cond_cp_chain",
             {{"family", f.descriptor()},
              {"k", std::to_string(k)},
              {"t", std::to_string(src.blocks())}},
             fmt(r.measured),
             "<=",
             fmt(r.bound),
             r.satisfied,
             std::move(extras)};
    return r;
}

// ---------------------------------------------------------------------------
// Markov tail: Pr over (h, y) that the average conditional collision
// probability exceeds 1/M + alpha, with alpha = 1/(K eps); at most eps.
template <class S>
struct TailResult {
    S measured{};
    S epsilon{};
    bool satisfied = false;
    ReportRow row;
};

template <class S>
TailResult<S> markov_tail(const HashFamily& f, const BlockSourceTree<S>& src, std::uint64_t k,
                          const S& eps, std::uint64_t guard_cells = (1ull << 24)) {
    detail::require_2universal(f);
    detail::require_block_source(src, k);
    if (!(eps > scalar_traits<S>::from_int(0)))
        throw std::invalid_argument("markov_tail: eps must be positive");

    S alpha = scalar_traits<S>::from_int(1) / (scalar_traits<S>::from_int(static_cast<long>(k)) * eps);
    auto thr = SurdThreshold<S>::rational(alpha);
    auto slices = hashed_slices(f, src, guard_cells);
    std::vector<std::uint32_t> sizes(src.blocks(), f.range_size());

    S bad = scalar_traits<S>::from_int(0);
    for (const auto& slice : slices) bad += detail::modify_slice<S>(slice, sizes, thr, nullptr);
    TailResult<S> r;
    r.measured = bad / scalar_traits<S>::from_int(static_cast<long>(f.family_size()));
    r.epsilon = eps;
    r.satisfied = !(r.measured > eps);
    r.row = {"markov_tail",
             {{"family", f.descriptor()},
              {"k", std::to_string(k)},
              {"t", std::to_string(src.blocks())},
              {"eps", fmt(eps)}},
             fmt(r.measured),
             "<=",
             fmt(r.epsilon),
             r.satisfied,
             {{"alpha", fmt(alpha)}}};
    return r;
}

// ---------------------------------------------------------------------------
// The transformer behind the closeness theorems: keep sequences whose
// average conditional cp excess is within alpha, truncate the rest at the
// crossing prefix and resample the suffix uniformly.  Preserves the H
// marginal exactly.
template <class S>
struct ModifyResult {
    JointDist<S> output;
    S distance{};       // exact statistical distance to the input
    S rejected_mass{};  // mass of sequences that crossed the threshold
};

template <class S>
ModifyResult<S> modify(const JointDist<S>& joint, const SurdThreshold<S>& alpha) {
    if (!scalar_traits<S>::exact)
        throw std::invalid_argument("modify: exact mode required");
    auto sizes = detail::block_sizes(joint);
    const std::uint64_t slice_len = joint.size() / joint.axes()[0].size;

    std::vector<S> out_mass(joint.size(), scalar_traits<S>::from_int(0));
    S rejected = scalar_traits<S>::from_int(0);
    for (std::uint32_t h = 0; h < joint.axes()[0].size; ++h) {
        std::vector<S> slice(joint.mass().begin() + h * slice_len,
                             joint.mass().begin() + (h + 1) * slice_len);
        std::vector<S> out_slice(slice_len, scalar_traits<S>::from_int(0));
        rejected += detail::modify_slice<S>(slice, sizes, alpha, &out_slice);
        for (std::uint64_t i = 0; i < slice_len; ++i) out_mass[h * slice_len + i] = out_slice[i];
    }
    JointDist<S> out(joint.axes(), std::move(out_mass));
    ModifyResult<S> r{std::move(out), scalar_traits<S>::from_int(0), rejected};
    r.distance = stat_dist(joint, r.output);
    return r;
}

template <class S>
ModifyResult<S> modify(const JointDist<S>& joint, const S& alpha) {
    return modify(joint, SurdThreshold<S>::rational(alpha));
}

// ---------------------------------------------------------------------------
// Collision probability pipeline for 2-universal families:
// hashed joint -> modify(alpha = 1/(K eps)); the modified joint must be
// within the Markov tail of the original and obey
// cp <= (1 + M/(K eps))^T / (|H| M^T).
template <class S>
struct Thm2CpResult {
    S modified_cp{};
    S bound{};
    S tail{};      // exact Markov tail mass
    S distance{};  // exact distance achieved by modify
    S epsilon{};
    bool satisfied = false;
    ReportRow row;
};

template <class S>
Thm2CpResult<S> thm_2univ_cp_check(const HashFamily& f, const BlockSourceTree<S>& src,
                                   std::uint64_t k, const S& eps,
                                   std::uint64_t guard_cells = (1ull << 24)) {
    auto tail = markov_tail(f, src, k, eps, guard_cells);
    S alpha = scalar_traits<S>::from_int(1) / (scalar_traits<S>::from_int(static_cast<long>(k)) * eps);
    auto joint = hashed_joint(f, src, guard_cells);
    auto mod = modify(joint, alpha);

    const std::uint32_t t = src.blocks();
    const std::uint32_t m = f.range_size();
    S per_block = scalar_traits<S>::from_int(1) + scalar_traits<S>::from_int(m) * alpha;
    S bound = pow_int(per_block, t) /
              (scalar_traits<S>::from_int(static_cast<long>(f.family_size())) *
               pow_int(scalar_traits<S>::from_int(m), t));

    Thm2CpResult<S> r;
    r.modified_cp = cp(mod.output);
    r.bound = bound;
    r.tail = tail.measured;
    r.distance = mod.distance;
    r.epsilon = eps;
    r.satisfied = !(r.modified_cp > bound) && !(mod.distance > tail.measured) && tail.satisfied;
    r.row = {"thm_2univ_cp",
             {{"family", f.descriptor()},
              {"k", std::to_string(k)},
              {"t", std::to_string(t)},
              {"eps", fmt(eps)}},
             fmt(r.modified_cp),
             "<=",
             fmt(r.bound),
             r.satisfied,
             {{"tail", fmt(r.tail)},
              {"distance", fmt(r.distance)},
              {"rejected", fmt(mod.rejected_mass)}}};
    return r;
}

// ---------------------------------------------------------------------------
// Variance of cp(h(X)) over a 4-wise independent family: at most 2/(M K^2).
template <class S>
struct VarianceResult {
    S measured{};
    S bound{};
    bool satisfied = false;
    ReportRow row;
};

template <class S>
VarianceResult<S> fourwise_variance_check(const HashFamily& f, const Dist<S>& x,
                                          std::uint64_t k) {
    detail::require_4wise(f);
    if (x.domain_size() != f.domain_size())
        throw std::invalid_argument("variance: source domain mismatch");
    if (cp(x) > frac<S>(1, static_cast<long>(k)))
        throw std::invalid_argument("variance: cp(x) exceeds 1/K for declared K");

    const S zero = scalar_traits<S>::from_int(0);
    S sum = zero, sum_sq = zero;
    std::vector<S> image(f.range_size(), zero);
    for (std::uint64_t h = 0; h < f.family_size(); ++h) {
        std::fill(image.begin(), image.end(), zero);
        for (std::uint32_t v = 0; v < f.domain_size(); ++v)
            if (x[v] > zero) image[f.eval(h, v)] += x[v];
        S c = zero;
        for (const S& m : image) c += m * m;
        sum += c;
        sum_sq += c * c;
    }
    S inv_h = frac<S>(1, static_cast<long>(f.family_size()));
    S mean = sum * inv_h;

    VarianceResult<S> r;
    r.measured = sum_sq * inv_h - mean * mean;
    r.bound = frac<S>(2, 1) / (scalar_traits<S>::from_int(f.range_size()) *
                               scalar_traits<S>::from_int(static_cast<long>(k)) *
                               scalar_traits<S>::from_int(static_cast<long>(k)));
    r.satisfied = !(r.measured > r.bound);
    r.row = {"fourwise_variance",
             {{"family", f.descriptor()}, {"k", std::to_string(k)}},
             fmt(r.measured),
             "<=",
             fmt(r.bound),
             r.satisfied,
             {{"mean_cp", fmt(mean)}}};
    return r;
}

// ---------------------------------------------------------------------------
// Collision probability pipeline for 4-wise independent families; the tail
// threshold and collision bound live in Q[sqrt(2M/(K^2 eps))] and are
// compared exactly there.
template <class S>
struct Thm4CpResult {
    S modified_cp{};
    QuadExt<S> bound{};  // (1 + M/K + sqrt(2M/(K^2 eps)))^T / (|H| M^T), scaled form
    S tail{};
    S distance{};
    bool tail_ok = false;
    bool cp_ok = false;
    bool satisfied = false;
    ReportRow row;
};

template <class S>
Thm4CpResult<S> thm_4wise_cp_check(const HashFamily& f, const BlockSourceTree<S>& src,
                                   std::uint64_t k, const S& eps,
                                   std::uint64_t guard_cells = (1ull << 24)) {
    detail::require_4wise(f);
    detail::require_block_source(src, k);
    if (!(eps > scalar_traits<S>::from_int(0)))
        throw std::invalid_argument("thm_4wise_cp: eps must be positive");

    const std::uint32_t t = src.blocks();
    const std::uint32_t m = f.range_size();
    const S kk = scalar_traits<S>::from_int(static_cast<long>(k));
    const S mm = scalar_traits<S>::from_int(m);

    // alpha = 1/K + sqrt(2 / (M K^2 eps)); per-block bound is (1 + M alpha)/M
    SurdThreshold<S> alpha{scalar_traits<S>::from_int(1) / kk,
                           frac<S>(2, 1) / (mm * kk * kk * eps)};
    auto slices = hashed_slices(f, src, guard_cells);
    std::vector<std::uint32_t> sizes(t, m);
    S bad = scalar_traits<S>::from_int(0);
    for (const auto& slice : slices) bad += detail::modify_slice<S>(slice, sizes, alpha, nullptr);
    S tail = bad / scalar_traits<S>::from_int(static_cast<long>(f.family_size()));

    auto joint = hashed_joint(f, src, guard_cells);
    auto mod = modify(joint, alpha);

    // (1 + M/K + sqrt(2M/(K^2 eps)))^T, exactly in the quadratic extension
    QuadExt<S> per_block{scalar_traits<S>::from_int(1) + mm / kk, scalar_traits<S>::from_int(1),
                         frac<S>(2, 1) * mm / (kk * kk * eps)};
    QuadExt<S> powt = pow_quad(per_block, t);
    S scale = scalar_traits<S>::from_int(static_cast<long>(f.family_size())) *
              pow_int(mm, t);

    Thm4CpResult<S> r;
    r.modified_cp = cp(mod.output);
    r.bound = powt;
    r.tail = tail;
    r.distance = mod.distance;
    r.tail_ok = !(tail > eps);
    r.cp_ok = leq_quad(S(r.modified_cp * scale), powt);
    r.satisfied = r.tail_ok && r.cp_ok && !(mod.distance > tail);
    r.row = {"thm_4wise_cp",
             {{"family", f.descriptor()},
              {"k", std::to_string(k)},
              {"t", std::to_string(t)},
              {"eps", fmt(eps)}},
             fmt(r.modified_cp),
             "<=",
             fmt_double(powt.value() / to_double(scale)),
             r.satisfied,
             {{"tail", fmt(tail)},
              {"distance", fmt(mod.distance)},
              {"alpha", fmt_double(alpha.value())}}};
    return r;
}

// ---------------------------------------------------------------------------
// Statistical closeness of (H, Y) to (H, U): requires K > MT/eps^2; the
// exact distance must be within eps, and the Hellinger route
// d^2 <= Delta <= sqrt(2) d with closeness at least (1 + M/K)^(-T/2) is
// reported alongside (float evaluations of the square roots carry a 1e-12
// comparison slack).
template <class S>
struct Thm2StatResult {
    S measured{};
    S epsilon{};
    double closeness = 0;
    double closeness_lower = 0;
    double hellinger = 0;
    bool closeness_ok = false;
    bool sandwich_ok = false;
    bool satisfied = false;
    ReportRow row;
};

template <class S>
Thm2StatResult<S> thm_2univ_stat_check(const HashFamily& f, const BlockSourceTree<S>& src,
                                       std::uint64_t k, const S& eps,
                                       std::uint64_t guard_cells = (1ull << 24)) {
    detail::require_2universal(f);
    detail::require_block_source(src, k);
    const std::uint32_t t = src.blocks();
    const std::uint32_t m = f.range_size();
    // precondition K > MT/eps^2
    if (!(scalar_traits<S>::from_int(static_cast<long>(k)) * eps * eps >
          scalar_traits<S>::from_int(m) * scalar_traits<S>::from_int(t)))
        throw std::invalid_argument("thm_2univ_stat: requires K > MT/eps^2");

    auto joint = hashed_joint(f, src, guard_cells);
    auto uniform = JointDist<S>::uniform(joint.axes());
    Thm2StatResult<S> r;
    r.measured = stat_dist(joint, uniform);
    r.epsilon = eps;
    r.closeness = hellinger_closeness(joint);
    r.closeness_lower =
        std::pow(1.0 + static_cast<double>(m) / static_cast<double>(k), -0.5 * t);
    r.hellinger = std::sqrt(std::max(0.0, 1.0 - r.closeness));

    const double slack = 1e-12;
    double delta = to_double(r.measured);
    r.closeness_ok = r.closeness + slack >= r.closeness_lower;
    r.sandwich_ok = (r.hellinger * r.hellinger <= delta + slack) &&
                    (delta <= std::sqrt(2.0) * r.hellinger + slack);
    r.satisfied = !(r.measured > eps) && r.closeness_ok && r.sandwich_ok;
    r.row = {"thm_2univ_stat",
             {{"family", f.descriptor()},
              {"k", std::to_string(k)},
              {"t", std::to_string(t)},
              {"eps", fmt(eps)}},
             fmt(r.measured),
             "<=",
             fmt(eps),
             r.satisfied,
             {{"closeness", fmt_double(r.closeness)},
              {"closeness_lower", fmt_double(r.closeness_lower)},
              {"hellinger", fmt_double(r.hellinger)}}};
    return r;
}

// ---------------------------------------------------------------------------
// Hellinger closeness from small conditional collision probabilities:
// if cp(X_i | X_{<i}) <= alpha_i / M_i for every block, then
// C(X) >= sqrt(1 / prod alpha_i).
struct ClosenessChainResult {
    double measured = 0;
    double bound = 0;
    bool premise_ok = false;
    bool satisfied = false;
    ReportRow row;
};

template <class S>
ClosenessChainResult closeness_chain_check(const JointDist<S>& joint,
                                           const std::vector<S>& alphas) {
    const auto& axes = joint.axes();
    if (alphas.size() != axes.size())
        throw std::invalid_argument("closeness_chain: one alpha per axis required");

    ClosenessChainResult r;
    r.premise_ok = true;
    KV extras;
    std::vector<std::string> given;
    for (std::size_t i = 0; i < axes.size(); ++i) {
        S cc = cond_cp(joint, axes[i].name, given);
        S lim = alphas[i] / scalar_traits<S>::from_int(axes[i].size);
        if (cc > lim) r.premise_ok = false;
        extras.emplace_back("cond_cp_" + axes[i].name, fmt(cc));
        given.push_back(axes[i].name);
    }
    S prod = scalar_traits<S>::from_int(1);
    for (const S& a : alphas) prod *= a;
    r.measured = hellinger_closeness(joint);
    r.bound = std::sqrt(1.0 / to_double(prod));
    bool conclusion = r.measured + 1e-12 >= r.bound;
    r.satisfied = r.premise_ok && conclusion;
    extras.emplace_back("premise_ok", r.premise_ok ? "true" : "false");
    r.row = {"closeness_chain", {{"axes", std::to_string(axes.size())}},
             fmt_double(r.measured), ">=", fmt_double(r.bound), r.satisfied, std::move(extras)};
    return r;
}

}  // namespace hashlab
