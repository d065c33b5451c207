#pragma once

// The acceptance suite: every headline claim checked end to end at desk
// scale, with one outcome per criterion.  The CLI `selftest` subcommand and
// the acceptance test binary both run exactly this code, so the data files
// it writes are the reference for byte-identical reproduction.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "hashlab/adversary.hpp"
#include "hashlab/bounds.hpp"
#include "hashlab/constants.hpp"
#include "hashlab/growth.hpp"
#include "hashlab/hypergeom.hpp"
#include "hashlab/rng.hpp"

namespace hashlab {

struct CriterionOutcome {
    int id = 0;
    std::string slug;
    bool pass = false;
    std::vector<ReportRow> rows;
};

namespace selftest_detail {

using R = Rational;

// Random block K-source over [n]^t whose conditionals are flat supports of
// size >= k (occasionally perturbed, with an exact cp check and flat
// fallback), branching capped so the sequence tree stays desk-sized.
inline BlockSourceTree<R> random_block_source(SplitMix64& g, std::uint32_t n, std::uint32_t t,
                                              std::uint32_t k) {
    std::uint32_t cap = t >= 4 ? 6 : (t == 3 ? 10 : 16);
    cap = std::min(cap, n);
    if (k > cap) throw std::invalid_argument("random_block_source: k exceeds branch cap");

    std::map<std::vector<std::uint32_t>, Dist<R>> conds;
    auto make_conditional = [&]() -> Dist<R> {
        std::uint32_t size = k + (std::uint32_t)g.below(cap - k + 1);
        auto support = g.subset(n, size);
        if (g.below(3) == 0) {
            // near-uniform rational weights; keep only if cp stays within 1/k
            std::vector<R> mass(n, R(0));
            long total = 0;
            std::vector<long> w(support.size());
            for (auto& v : w) {
                v = 3 + (long)g.below(3);
                total += v;
            }
            R cpv(0);
            for (std::size_t i = 0; i < support.size(); ++i) {
                R q(w[i], total);
                q.canonicalize();
                mass[support[i]] = q;
                cpv += q * q;
            }
            if (!(cpv > R(1, (long)k))) return Dist<R>(n, std::move(mass));
        }
        return Dist<R>::flat(n, support);
    };

    auto build = [&](auto&& self, std::vector<std::uint32_t>& prefix) -> void {
        Dist<R> d = make_conditional();
        conds.emplace(prefix, d);
        if (prefix.size() + 1 == t) return;
        for (std::uint32_t v = 0; v < n; ++v) {
            if (!(d[v] > 0)) continue;
            prefix.push_back(v);
            self(self, prefix);
            prefix.pop_back();
        }
    };
    std::vector<std::uint32_t> prefix;
    build(build, prefix);
    return BlockSourceTree<R>::explicit_tree(n, t, std::move(conds));
}

inline JointDist<R> random_small_joint(SplitMix64& g, std::uint32_t n_axes) {
    std::vector<Axis> axes;
    static const char* names[] = {"X", "Y", "Z", "W"};
    std::uint64_t total = 1;
    for (std::uint32_t i = 0; i < n_axes; ++i) {
        std::uint32_t size = 2 + (std::uint32_t)g.below(3);
        axes.push_back({names[i], size});
        total *= size;
    }
    std::vector<long> w(total);
    long sum = 0;
    for (auto& v : w) {
        v = (long)g.below(64);
        sum += v;
    }
    if (sum == 0) w[0] = sum = 1;
    std::vector<R> mass;
    for (long v : w) {
        R q(v, sum);
        q.canonicalize();
        mass.push_back(q);
    }
    return JointDist<R>(std::move(axes), std::move(mass));
}

}  // namespace selftest_detail

// ---------------------------------------------------------------------------

inline CriterionOutcome criterion_lhl() {
    using R = Rational;
    CriterionOutcome out{1, "lhl_flat_sweep", true, {}};
    AffineFamily f(8, 2);
    R worst(0);
    detail::for_each_subset(8, 4, [&](const std::vector<std::uint32_t>& pts) {
        auto r = lhl_check(f, Dist<R>::flat(8, pts), 4);
        out.pass = out.pass && r.satisfied;
        if (r.measured > worst) worst = r.measured;
        out.rows.push_back(std::move(r.row));
    });
    ReportRow margin{"lhl_tightness_margin",
                     {{"family", f.descriptor()}, {"k", "4"}},
                     fmt(worst),
                     "<=",
                     fmt(R(3, 4)),
                     !(worst > R(3, 4)),
                     {}};
    out.pass = out.pass && margin.satisfied;
    out.rows.push_back(std::move(margin));
    return out;
}

inline CriterionOutcome criterion_cond_chain(std::uint64_t seed) {
    using R = Rational;
    CriterionOutcome out{2, "cond_cp_chain", true, {}};
    for (int i = 0; i < 100; ++i) {
        SplitMix64 g(child_seed(seed, 200 + i));
        bool truly_random = i % 2 == 1;
        std::uint32_t t = 1 + (std::uint32_t)g.below(4);
        std::uint32_t k = 2 + (std::uint32_t)g.below(3);  // 2..4
        std::unique_ptr<HashFamily> fam;
        std::uint32_t n;
        if (truly_random) {
            n = 5 + (std::uint32_t)g.below(2);  // 5..6
            fam = std::make_unique<TrulyRandomFamily>(n, 2);
        } else {
            n = 16;
            fam = std::make_unique<AffineFamily>(16, 2);
        }
        auto src = selftest_detail::random_block_source(g, n, t, k);
        auto r = cond_cp_chain_check(*fam, src, k);
        out.pass = out.pass && r.satisfied;
        r.row.params.emplace_back("instance", std::to_string(i));
        out.rows.push_back(std::move(r.row));
    }
    return out;
}

inline CriterionOutcome criterion_thm2cp(std::uint64_t seed) {
    using R = Rational;
    CriterionOutcome out{3, "thm_2univ_cp", true, {}};
    AffineFamily f(16, 2);
    {
        std::vector<std::uint32_t> base{0, 1, 2, 3, 4, 5, 6, 7};
        auto src = BlockSourceTree<R>::iid(Dist<R>::flat(16, base), 4);
        auto r = thm_2univ_cp_check(f, src, 8, frac<R>(1, 2));
        out.pass = out.pass && r.satisfied;
        out.rows.push_back(std::move(r.row));
    }
    for (int i = 0; i < 20; ++i) {
        SplitMix64 g(child_seed(seed, 300 + i));
        std::uint32_t t = 2 + (std::uint32_t)g.below(3);
        std::uint64_t k = (i % 2 == 0) ? 8 : 4;
        R eps = (i % 3 == 0) ? frac<R>(1, 4) : frac<R>(1, 2);
        BlockSourceTree<R> src =
            (i % 4 == 3)
                ? selftest_detail::random_block_source(g, 16, t, (std::uint32_t)k)
                : BlockSourceTree<R>::iid(
                      Dist<R>::flat(16, g.subset(16, (std::uint32_t)k)), t);
        auto r = thm_2univ_cp_check(f, src, k, eps);
        out.pass = out.pass && r.satisfied;
        r.row.params.emplace_back("instance", std::to_string(i));
        out.rows.push_back(std::move(r.row));
    }
    return out;
}

inline CriterionOutcome criterion_variance4() {
    using R = Rational;
    CriterionOutcome out{4, "fourwise_variance", true, {}};
    KwiseFamily f(8, 2, 4);
    detail::for_each_subset(8, 4, [&](const std::vector<std::uint32_t>& pts) {
        auto r = fourwise_variance_check(f, Dist<R>::flat(8, pts), 4);
        out.pass = out.pass && r.satisfied;
        out.rows.push_back(std::move(r.row));
    });
    return out;
}

inline CriterionOutcome criterion_thm2stat(std::uint64_t seed) {
    using R = Rational;
    CriterionOutcome out{5, "thm_2univ_stat", true, {}};
    auto run = [&](const HashFamily& f, const BlockSourceTree<R>& src, std::uint64_t k,
                   const R& eps, const std::string& label) {
        auto r = thm_2univ_stat_check(f, src, k, eps);
        out.pass = out.pass && r.satisfied;
        r.row.params.emplace_back("instance", label);
        out.rows.push_back(std::move(r.row));
    };
    AffineFamily f32(32, 2);
    std::vector<std::uint32_t> canonical(16);
    for (std::uint32_t i = 0; i < 16; ++i) canonical[i] = i;
    run(f32, BlockSourceTree<R>::iid(Dist<R>::flat(32, canonical), 2), 16, frac<R>(3, 4),
        "canonical");
    for (int i = 0; i < 4; ++i) {
        SplitMix64 g(child_seed(seed, 500 + i));
        run(f32, BlockSourceTree<R>::iid(Dist<R>::flat(32, g.subset(32, 16)), 2), 16,
            frac<R>(3, 4), "q32_" + std::to_string(i));
    }
    AffineFamily f16(16, 2);
    for (int i = 0; i < 2; ++i) {
        SplitMix64 g(child_seed(seed, 520 + i));
        run(f16, BlockSourceTree<R>::iid(Dist<R>::flat(16, g.subset(16, 8)), 1), 8,
            frac<R>(3, 4), "q16_" + std::to_string(i));
    }
    TrulyRandomFamily fr(8, 2);
    std::vector<std::uint32_t> full(8);
    for (std::uint32_t i = 0; i < 8; ++i) full[i] = i;
    run(fr, BlockSourceTree<R>::iid(Dist<R>::flat(8, full), 2), 8, frac<R>(3, 4), "random_n8");
    return out;
}

inline CriterionOutcome criterion_cp_lemmas(std::uint64_t seed) {
    using R = Rational;
    CriterionOutcome out{6, "cp_lemmas_brute_force", true, {}};
    int violations = 0;
    for (int i = 0; i < 1000; ++i) {
        SplitMix64 g(child_seed(seed, 600 + i));
        std::uint32_t n_axes = 2 + (std::uint32_t)g.below(3);
        auto j = selftest_detail::random_small_joint(g, n_axes);
        const auto& axes = j.axes();

        // cond_cp against brute force through condition()
        {
            R brute(0);
            auto ymarg = j.marginal({axes[1].name}).flatten();
            for (std::uint32_t v = 0; v < ymarg.domain_size(); ++v) {
                if (!(ymarg[v] > 0)) continue;
                auto c = j.condition(axes[1].name, v);
                brute += ymarg[v] * cp(c.marginal({axes[0].name}).flatten());
            }
            if (cond_cp(j, axes[0].name, {axes[1].name}) != brute) {
                ++violations;
                continue;
            }
        }
        // conditioning monotonicity
        {
            R c0 = cp(j.marginal({axes[0].name}).flatten());
            R c1 = cond_cp(j, axes[0].name, {axes[1].name});
            if (c0 > c1) ++violations;
            if (n_axes >= 3) {
                R c2 = cond_cp(j, axes[0].name, {axes[1].name, axes[2].name});
                if (c1 > c2) ++violations;
            }
        }
        // chain bound cp(joint) <= alpha^T
        {
            R alpha(0);
            std::uint32_t t = (std::uint32_t)axes.size();
            auto probe = [&](auto&& self, const JointDist<R>& cur, std::uint32_t depth,
                             R partial) -> void {
                auto marg = cur.marginal({axes[depth].name}).flatten();
                partial += cp(marg);
                if (depth + 1 == t) {
                    R avg = partial / R((long)t);
                    if (avg > alpha) alpha = avg;
                    return;
                }
                for (std::uint32_t v = 0; v < marg.domain_size(); ++v)
                    if (marg[v] > 0) self(self, cur.condition(axes[depth].name, v), depth + 1, partial);
            };
            probe(probe, j, 0, R(0));
            if (cp(j) > pow_int(alpha, t)) ++violations;
        }
    }
    out.pass = violations == 0;
    out.rows.push_back({"cp_lemmas",
                        {{"joints", "1000"}},
                        std::to_string(violations),
                        "==",
                        "0",
                        out.pass,
                        {}});
    return out;
}

inline CriterionOutcome criterion_growth(std::uint64_t seed) {
    using R = Rational;
    CriterionOutcome out{7, "product_growth", true, {}};
    const R c0_sq = derived_constants::growth_c0_sq();
    R min_ratio_sq(-1);
    for (int j = 1; j <= 8; ++j) {
        R eps(j, 16);
        eps.canonicalize();
        Dist<R> x(2, {R(frac<R>(1, 2) - eps), R(frac<R>(1, 2) + eps)});
        Dist<R> u = Dist<R>::uniform(2);
        R prev(0);
        for (std::uint32_t t = 1; t <= 16; ++t) {
            R delta = product_stat_dist(x, u, t);
            bool monotone = !(prev > delta);
            auto large = product_growth_large(eps, t);
            bool small_ok = true;
            if (!(delta > frac<R>(3, 10))) {
                R ratio_sq = (delta / eps) * (delta / eps) / R((long)t);
                small_ok = !(ratio_sq < c0_sq);
                if (min_ratio_sq < 0 || ratio_sq < min_ratio_sq) min_ratio_sq = ratio_sq;
            }
            bool ok = monotone && large.satisfied && small_ok;
            out.pass = out.pass && ok;
            out.rows.push_back({"growth_cell",
                                {{"eps", fmt(eps)}, {"t", std::to_string(t)}},
                                fmt(delta),
                                ">=",
                                fmt_double(large.bound),
                                ok,
                                {{"monotone", monotone ? "true" : "false"},
                                 {"large_ok", large.satisfied ? "true" : "false"},
                                 {"small_ok", small_ok ? "true" : "false"}}});
            prev = delta;
        }
    }
    out.rows.push_back({"growth_c0_sq_min",
                        {},
                        fmt(min_ratio_sq),
                        ">=",
                        fmt(c0_sq),
                        !(min_ratio_sq < c0_sq),
                        {}});

    // randomized reduction on 100 random pairs
    int reduction_fails = 0;
    for (int i = 0; i < 100; ++i) {
        SplitMix64 g(child_seed(seed, 700 + i));
        std::uint32_t m = 2 + (std::uint32_t)g.below(5);
        auto mk = [&](void) {
            std::vector<long> w(m);
            long sum = 0;
            for (auto& v : w) {
                v = (long)g.below(256);
                sum += v;
            }
            if (sum == 0) w[0] = sum = 1;
            std::vector<R> mass;
            for (long v : w) {
                R q(v, sum);
                q.canonicalize();
                mass.push_back(q);
            }
            return Dist<R>(m, std::move(mass));
        };
        auto red = bernoulli_reduction(mk(), mk());
        if (!red.ok) ++reduction_fails;
    }
    out.pass = out.pass && reduction_fails == 0;
    out.rows.push_back({"bernoulli_reduction_sweep",
                        {{"pairs", "100"}},
                        std::to_string(reduction_fails),
                        "==",
                        "0",
                        reduction_fails == 0,
                        {}});
    return out;
}

inline CriterionOutcome criterion_lb2univ() {
    using R = Rational;
    CriterionOutcome out{8, "lb_2univ_witness", true, {}};
    SplitDomainFamily fam(2, 4, 8);
    auto universal = verify_universal(fam, 2);
    out.rows.push_back({"lb2univ_universal",
                        {{"family", fam.descriptor()}},
                        universal.ok ? "true" : "false",
                        "==",
                        "true",
                        universal.ok,
                        {{"worst_pair_collisions", std::to_string(universal.worst_count)}}});
    auto w = lb_2univ_witness<R>(2, 4, 8, 3, frac<R>(100, 1));
    bool frac_ok = w.bad_fraction == frac<R>(15, 32);
    bool cp_ok = w.bad_cp == frac<R>(65, 128);
    out.rows.push_back({"lb2univ_bad_fraction",
                        {{"family", fam.descriptor()}},
                        fmt(w.bad_fraction),
                        "==",
                        "15/32",
                        frac_ok,
                        {}});
    out.rows.push_back({"lb2univ_bad_cp",
                        {{"family", fam.descriptor()}},
                        fmt(w.bad_cp),
                        "==",
                        "65/128",
                        cp_ok,
                        {}});
    out.rows.push_back({"lb2univ_good_uniform",
                        {{"family", fam.descriptor()}},
                        w.good_uniform ? "true" : "false",
                        "==",
                        "true",
                        w.good_uniform,
                        {}});
    out.rows.push_back({"lb2univ_closeness",
                        {{"family", fam.descriptor()}, {"eps", fmt(w.eps)}},
                        fmt_double(w.bad_closeness),
                        "<=",
                        fmt_double(w.closeness_bound),
                        w.stated_bound_ok,
                        {{"proof_bound", fmt_double(w.proof_bound)},
                         {"proof_bound_ok", w.proof_bound_ok ? "true" : "false"},
                         {"farness_gamma", fmt(w.farness_gamma)}}});
    out.pass = universal.ok && frac_ok && cp_ok && w.good_uniform && w.stated_bound_ok;
    return out;
}

inline CriterionOutcome criterion_hypergeom() {
    using R = Rational;
    CriterionOutcome out{9, "hypergeom_sweep", true, {}};
    auto sweep = hypergeom_sweep();
    R frozen = derived_constants::hypergeom_cpp();
    bool reproduced = sweep.max_ratio == frozen;
    for (const auto& cell : sweep.cells) {
        out.pass = out.pass && cell.satisfied;
        out.rows.push_back(cell.row);
    }
    out.rows.push_back({"hypergeom_max_ratio",
                        {{"cells", std::to_string(sweep.cells.size())}},
                        fmt(sweep.max_ratio),
                        "==",
                        fmt(frozen),
                        reproduced,
                        {}});
    out.pass = out.pass && reproduced;
    return out;
}

inline CriterionOutcome criterion_waterfill(std::uint64_t seed) {
    using R = Rational;
    CriterionOutcome out{10, "waterfill", true, {}};
    int exact_fails = 0;
    for (int i = 0; i < 500; ++i) {
        SplitMix64 g(child_seed(seed, 1000 + i));
        std::uint32_t m = 2 + (std::uint32_t)g.below(10);
        std::vector<long> w(m);
        long sum = 0;
        for (auto& v : w) {
            v = (long)g.below(1 << 12);
            sum += v;
        }
        if (sum == 0) w[0] = sum = 1;
        std::vector<R> mass;
        for (long v : w) {
            R q(v, sum);
            q.canonicalize();
            mass.push_back(q);
        }
        Dist<R> p(m, std::move(mass));
        R budget(1 + (long)g.below(1000), 1001);
        budget.canonicalize();
        auto r = min_sq_mass(p, budget);
        R total(0), value(0);
        bool ok = true;
        for (std::uint32_t x = 0; x < m; ++x) {
            ok = ok && !(r.achieving_q[x] < 0) && !(r.achieving_q[x] > p[x]) &&
                 r.achieving_q[x] == std::min(p[x], r.level);
            total += r.achieving_q[x];
            value += r.achieving_q[x] * r.achieving_q[x];
        }
        ok = ok && total == budget && value == r.min_sq_mass;
        if (!ok) ++exact_fails;
    }
    out.rows.push_back({"waterfill_exact_kkt",
                        {{"instances", "500"}},
                        std::to_string(exact_fails),
                        "==",
                        "0",
                        exact_fails == 0,
                        {}});

    int float_fails = 0;
    for (int i = 0; i < 500; ++i) {
        SplitMix64 g(child_seed(seed, 1500 + i));
        std::uint32_t m = 2 + (std::uint32_t)g.below(10);
        std::vector<double> p(m);
        double sum = 0;
        for (auto& v : p) {
            v = 1e-9 + g.uniform01();
            sum += v;
        }
        for (auto& v : p) v /= sum;
        double budget = 0.001 + 0.998 * g.uniform01();
        auto r = min_sq_mass(Dist<double>(m, std::vector<double>(p)), budget);
        double lo = 0, hi = 0;
        for (double v : p) hi = std::max(hi, v);
        for (int iter = 0; iter < 200; ++iter) {
            double mid = 0.5 * (lo + hi);
            double s = 0;
            for (double v : p) s += std::min(v, mid);
            (s < budget ? lo : hi) = mid;
        }
        double lambda = 0.5 * (lo + hi), oracle = 0;
        for (double v : p) oracle += std::min(v, lambda) * std::min(v, lambda);
        if (std::abs(oracle - r.min_sq_mass) > 1e-9) ++float_fails;
    }
    out.rows.push_back({"waterfill_float_oracle",
                        {{"instances", "500"}},
                        std::to_string(float_fails),
                        "==",
                        "0",
                        float_fails == 0,
                        {}});

    int mono_fails = 0;
    for (int i = 0; i < 20; ++i) {
        SplitMix64 g(child_seed(seed, 2000 + i));
        auto j = selftest_detail::random_small_joint(g, 2);
        auto grid = default_budget_grid<R>();
        R prev_gamma(-1);
        for (long a : {1L, 2L, 5L, 20L, 100L}) {
            R gamma = farness_from_low_cp(j, R(a), grid);
            if (prev_gamma >= 0 && gamma > prev_gamma) ++mono_fails;
            prev_gamma = gamma;
        }
    }
    out.rows.push_back({"farness_monotone_alpha",
                        {{"instances", "20"}},
                        std::to_string(mono_fails),
                        "==",
                        "0",
                        mono_fails == 0,
                        {}});
    out.pass = exact_fails == 0 && float_fails == 0 && mono_fails == 0;
    return out;
}

// Criteria 1..10; determinism (11) is checked by running this twice and
// comparing the serialized rows byte for byte.
inline std::vector<CriterionOutcome> run_acceptance(std::uint64_t seed) {
    std::vector<CriterionOutcome> out;
    out.push_back(criterion_lhl());
    out.push_back(criterion_cond_chain(seed));
    out.push_back(criterion_thm2cp(seed));
    out.push_back(criterion_variance4());
    out.push_back(criterion_thm2stat(seed));
    out.push_back(criterion_cp_lemmas(seed));
    out.push_back(criterion_growth(seed));
    out.push_back(criterion_lb2univ());
    out.push_back(criterion_hypergeom());
    out.push_back(criterion_waterfill(seed));
    return out;
}

inline std::string acceptance_digest(const std::vector<CriterionOutcome>& outcomes) {
    std::string all;
    for (const auto& c : outcomes) {
        all += std::to_string(c.id) + ":" + c.slug + ":" + (c.pass ? "1" : "0") + "\n";
        for (const auto& r : c.rows) all += to_csv(r) + "\n";
    }
    return all;
}

inline void write_acceptance_files(const std::vector<CriterionOutcome>& outcomes,
                                   const std::string& out_dir, const std::string& format) {
    std::vector<ReportRow> summary;
    for (const auto& c : outcomes) {
        summary.push_back({"criterion_" + std::to_string(c.id),
                           {{"name", c.slug}},
                           c.pass ? "pass" : "fail",
                           "==",
                           "pass",
                           c.pass,
                           {{"rows", std::to_string(c.rows.size())}}});
        char num[8];
        std::snprintf(num, sizeof(num), "%02d", c.id);
        std::string base = out_dir + "/criterion_" + num + "_" + c.slug;
        if (format == "json")
            write_rows_json(base + ".json", c.rows);
        else
            write_rows_csv(base + ".csv", c.rows);
    }
    if (format == "json")
        write_rows_json(out_dir + "/acceptance.json", summary);
    else
        write_rows_csv(out_dir + "/acceptance.csv", summary);
}

}  // namespace hashlab
