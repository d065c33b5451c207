#include <catch_amalgamated.hpp>

#include "hashlab/bounds.hpp"
#include "hashlab/rng.hpp"

using namespace hashlab;
using R = Rational;

namespace {

// independent route: average conditional cp of a full sequence, computed
// with JointDist conditioning only
R sequence_avg_cond_cp(const JointDist<R>& joint, std::uint32_t h,
                       const std::vector<std::uint32_t>& y) {
    auto slice = joint.condition("H", h);
    R acc(0);
    JointDist<R> cur = slice;
    for (std::size_t i = 0; i < y.size(); ++i) {
        std::string name = "Y" + std::to_string(i + 1);
        auto marg = cur.marginal({name}).flatten();
        acc += cp(marg);
        if (i + 1 < y.size()) cur = cur.condition(name, y[i]);
    }
    return acc / R((long)y.size());
}

}  // namespace

TEST_CASE("leftover hashing: flat sources under the affine family") {
    AffineFamily f(8, 2);
    // every flat 4-subset measures exactly 1/4 + (3/4)(1/2) = 5/8
    int checked = 0;
    detail::for_each_subset(8, 4, [&](const std::vector<std::uint32_t>& pts) {
        auto r = lhl_check(f, Dist<R>::flat(8, pts), 4);
        CHECK(r.measured == R(5, 8));
        CHECK(r.bound == R(3, 4));
        CHECK(r.satisfied);
        ++checked;
    });
    CHECK(checked == 70);
}

TEST_CASE("leftover hashing: full-entropy input") {
    // the family contains q constant functions (a = 0), so the exact value
    // is (1 - 1/q)/M + 1/q, not 1/M
    AffineFamily f(8, 2);
    auto r = lhl_check(f, Dist<R>::uniform(8), 8);
    CHECK(r.measured == R(9, 16));
    CHECK(r.satisfied);
}

TEST_CASE("leftover hashing preconditions") {
    SplitDomainFamily notuniv(2, 2, 2);
    CHECK_THROWS_AS(lhl_check(notuniv, Dist<R>::uniform(8), 4), std::invalid_argument);
    AffineFamily f(8, 2);
    CHECK_THROWS_AS(lhl_check(f, Dist<R>::flat(8, {0, 1}), 4), std::invalid_argument);
}

TEST_CASE("conditional-cp chain") {
    AffineFamily f(16, 2);
    auto src = BlockSourceTree<R>::iid(Dist<R>::flat(16, {0, 1, 2, 3}), 2);
    auto r = cond_cp_chain_check(f, src, 4);
    CHECK(r.satisfied);
    CHECK(r.bound == R(3, 4));
    for (const auto& b : r.per_block) CHECK(!(b > r.bound));

    // T = 1 reduces to the leftover hash check
    auto src1 = BlockSourceTree<R>::iid(Dist<R>::flat(16, {0, 1, 2, 3}), 1);
    auto chain1 = cond_cp_chain_check(f, src1, 4);
    auto lhl1 = lhl_check(f, Dist<R>::flat(16, {0, 1, 2, 3}), 4);
    CHECK(chain1.measured == lhl1.measured);

    // truly random family obeys the same bound
    TrulyRandomFamily tr(6, 2);
    auto src2 = BlockSourceTree<R>::iid(Dist<R>::flat(6, {1, 3, 5}), 2);
    CHECK(cond_cp_chain_check(tr, src2, 3).satisfied);
}

TEST_CASE("markov tail: exact value and independent oracle") {
    AffineFamily f(16, 2);
    auto src = BlockSourceTree<R>::iid(Dist<R>::flat(16, {0, 1, 2, 3, 4, 5, 6, 7}), 4);
    auto r = markov_tail(f, src, 8, frac<R>(1, 2));
    CHECK(r.satisfied);
    CHECK(r.measured == R(1, 8));  // regression pin for this instance

    // independent oracle: enumerate all (h, y) support cells of the joint
    auto joint = hashed_joint(f, src);
    R threshold = R(1, 2) + R(1, 4);  // 1/M + 1/(K eps)
    R bad(0);
    for (std::uint64_t cell = 0; cell < joint.size(); ++cell) {
        if (!(joint.mass()[cell] > 0)) continue;
        std::uint32_t h = joint.coord(cell, 0);
        std::vector<std::uint32_t> y;
        for (std::size_t ax = 1; ax < joint.axes().size(); ++ax)
            y.push_back(joint.coord(cell, ax));
        if (sequence_avg_cond_cp(joint, h, y) > threshold) bad += joint.mass()[cell];
    }
    CHECK(bad == r.measured);
}

TEST_CASE("markov tail: full-entropy source and a K sweep") {
    AffineFamily f(16, 2);
    // full-entropy input: only the q constant functions exceed the
    // threshold, so the tail is exactly 1/q (not zero)
    auto full = BlockSourceTree<R>::iid(Dist<R>::uniform(16), 4);
    CHECK(markov_tail(f, full, 16, frac<R>(1, 2)).measured == R(1, 16));

    // K sweep at fixed (N, M, T, eps) with flat supports {0..K-1}: the
    // tail saturates to zero once 1/M + 1/(K eps) reaches 1, so it is not
    // monotone in K
    std::vector<R> tails;
    for (std::uint32_t k : {1u, 2u, 4u, 8u, 16u}) {
        std::vector<std::uint32_t> sup(k);
        for (std::uint32_t i = 0; i < k; ++i) sup[i] = i;
        auto src = BlockSourceTree<R>::iid(Dist<R>::flat(16, sup), 4);
        auto r = markov_tail(f, src, k, frac<R>(1, 2));
        CHECK(r.satisfied);
        tails.push_back(r.measured);
    }
    CHECK(tails == std::vector<R>{R(0), R(0), R(0), R(1, 8), R(1, 16)});
}

TEST_CASE("modify: identity on already-good joints") {
    AffineFamily f(4, 2);
    auto src = BlockSourceTree<R>::iid(Dist<R>::uniform(4), 2);
    auto joint = hashed_joint(f, src);
    auto good = modify(joint, frac<R>(1, 2));
    CHECK(good.distance == 0);
    CHECK(good.rejected_mass == 0);
    CHECK(good.output.mass() == joint.mass());
}

TEST_CASE("modify: output properties") {
    AffineFamily f(16, 2);
    auto src = BlockSourceTree<R>::iid(Dist<R>::flat(16, {0, 1, 2, 3, 4, 5, 6, 7}), 4);
    auto joint = hashed_joint(f, src);
    R alpha = frac<R>(1, 4);
    auto mod = modify(joint, alpha);

    // the H marginal is exactly unchanged
    CHECK(mod.output.marginal({"H"}).mass() == joint.marginal({"H"}).mass());

    // the statistical distance never exceeds the rejected mass, and the
    // rejected mass is the exact markov tail at the same alpha
    CHECK(!(mod.distance > mod.rejected_mass));
    auto tail = markov_tail(f, src, 8, frac<R>(1, 2));
    CHECK(mod.rejected_mass == tail.measured);
    // resampling can reproduce the original sequence, so distance < mass
    CHECK(mod.distance < mod.rejected_mass);

    // every output support point satisfies the average-cp bound exactly
    R limit = R(1, 2) + alpha;
    for (std::uint64_t cell = 0; cell < mod.output.size(); ++cell) {
        if (!(mod.output.mass()[cell] > 0)) continue;
        std::uint32_t h = mod.output.coord(cell, 0);
        std::vector<std::uint32_t> y;
        for (std::size_t ax = 1; ax < mod.output.axes().size(); ++ax)
            y.push_back(mod.output.coord(cell, ax));
        CHECK(!(sequence_avg_cond_cp(mod.output, h, y) > limit));
    }
}

TEST_CASE("modify: crossing at the first block resamples the whole slice") {
    // point-mass blocks have conditional cp 1; with a tiny alpha the
    // crossing happens at j = 0 and each slice becomes fully uniform
    LinearH0Family f(2, 1);  // two functions on domain {0, 1}
    std::map<std::vector<std::uint32_t>, Dist<R>> conds;
    conds.emplace(std::vector<std::uint32_t>{}, Dist<R>::point_mass(2, 1));
    conds.emplace(std::vector<std::uint32_t>{1}, Dist<R>::point_mass(2, 1));
    auto src = BlockSourceTree<R>::explicit_tree(2, 2, std::move(conds));
    auto joint = hashed_joint(f, src);
    auto mod = modify(joint, frac<R>(1, 100));
    for (const auto& m : mod.output.mass()) CHECK(m == R(1, 8));
    CHECK(mod.rejected_mass == 1);
    CHECK(mod.output.marginal({"H"}).mass() == joint.marginal({"H"}).mass());
}

TEST_CASE("modify: exact mode required and axis checks") {
    JointDist<double> j({{"H", 2}, {"Y1", 2}}, {0.25, 0.25, 0.25, 0.25});
    CHECK_THROWS_AS(modify(j, 0.5), std::invalid_argument);
    JointDist<R> wrong({{"A", 2}, {"Y1", 2}}, {R(1, 4), R(1, 4), R(1, 4), R(1, 4)});
    CHECK_THROWS_AS(modify(wrong, frac<R>(1, 2)), std::invalid_argument);
}

TEST_CASE("2-universal collision pipeline") {
    AffineFamily f(16, 2);
    auto src = BlockSourceTree<R>::iid(Dist<R>::flat(16, {0, 1, 2, 3, 4, 5, 6, 7}), 4);
    auto r = thm_2univ_cp_check(f, src, 8, frac<R>(1, 2));
    CHECK(r.satisfied);
    CHECK(r.bound == R(81, 65536));  // (1/(256*16)) (1 + 2/(8*1/2))^4
    CHECK(!(r.distance > r.tail));
    CHECK(!(r.tail > frac<R>(1, 2)));

    // full-entropy source: everything within bound trivially
    auto full = BlockSourceTree<R>::iid(Dist<R>::uniform(16), 2);
    CHECK(thm_2univ_cp_check(f, full, 16, frac<R>(1, 2)).satisfied);

    // negative control: declared K overstates a source with a point-mass
    // block; rejected at validation
    std::map<std::vector<std::uint32_t>, Dist<R>> conds;
    conds.emplace(std::vector<std::uint32_t>{}, Dist<R>::point_mass(16, 3));
    conds.emplace(std::vector<std::uint32_t>{3}, Dist<R>::uniform(16));
    auto degenerate = BlockSourceTree<R>::explicit_tree(16, 2, std::move(conds));
    CHECK_THROWS_AS(thm_2univ_cp_check(f, degenerate, 8, frac<R>(1, 2)),
                    std::invalid_argument);
}

TEST_CASE("4-wise variance bound") {
    KwiseFamily f(8, 2, 4);
    // flat 4-subsets give variance exactly 3/128 under exact 4-wise
    // independence (binomial image counts)
    auto r = fourwise_variance_check(f, Dist<R>::flat(8, {0, 2, 5, 7}), 4);
    CHECK(r.measured == R(3, 128));
    CHECK(r.bound == R(1, 16));
    CHECK(r.satisfied);

    // point mass: cp(h(X)) = 1 constant, variance zero
    auto pt = fourwise_variance_check(f, Dist<R>::point_mass(8, 5), 1);
    CHECK(pt.measured == 0);
    CHECK(pt.satisfied);

    // full domain: nonnegative and within bound
    auto full = fourwise_variance_check(f, Dist<R>::uniform(8), 8);
    CHECK(!(full.measured < 0));
    CHECK(full.satisfied);

    AffineFamily only2(8, 2);
    CHECK_THROWS_AS(fourwise_variance_check(only2, Dist<R>::uniform(8), 8),
                    std::invalid_argument);
}

TEST_CASE("4-wise collision pipeline") {
    KwiseFamily f(8, 2, 4);
    auto src = BlockSourceTree<R>::iid(Dist<R>::flat(8, {0, 1, 2, 3}), 2);
    auto r = thm_4wise_cp_check(f, src, 4, frac<R>(1, 2));
    CHECK(r.satisfied);
    CHECK(r.tail_ok);
    CHECK(r.cp_ok);
    CHECK(!(r.distance > r.tail));

    // full-entropy source: tail zero is not guaranteed (constant members),
    // but the bound must hold with slack
    auto full = BlockSourceTree<R>::iid(Dist<R>::uniform(8), 2);
    auto rf = thm_4wise_cp_check(f, full, 8, frac<R>(1, 2));
    CHECK(rf.satisfied);
}

TEST_CASE("statistical closeness pipeline") {
    AffineFamily f(32, 2);
    std::vector<std::uint32_t> sup(16);
    for (std::uint32_t i = 0; i < 16; ++i) sup[i] = i;
    auto src = BlockSourceTree<R>::iid(Dist<R>::flat(32, sup), 2);
    auto r = thm_2univ_stat_check(f, src, 16, frac<R>(3, 4));
    CHECK(r.satisfied);
    CHECK(r.closeness_ok);
    CHECK(r.sandwich_ok);

    // full-entropy source through a bijective-plus-constant family still
    // satisfies the theorem
    AffineFamily f16(16, 2);
    auto full = BlockSourceTree<R>::iid(Dist<R>::uniform(16), 1);
    auto rf = thm_2univ_stat_check(f16, full, 16, frac<R>(3, 4));
    CHECK(rf.satisfied);

    // precondition: K <= MT/eps^2 rejected
    auto small = BlockSourceTree<R>::iid(Dist<R>::flat(16, {0, 1}), 2);
    CHECK_THROWS_AS(thm_2univ_stat_check(f16, small, 2, frac<R>(1, 2)),
                    std::invalid_argument);
}

TEST_CASE("closeness chain") {
    // uniform joint: premise with alpha = 1 and C = 1
    auto u = JointDist<R>::uniform({{"X1", 2}, {"X2", 2}});
    auto r = closeness_chain_check(u, {R(1), R(1)});
    CHECK(r.premise_ok);
    CHECK(r.satisfied);
    CHECK(r.measured == Catch::Approx(1.0));

    // iid biased coin with per-block alpha = M cp = 5/4
    Dist<R> coin(2, {R(3, 4), R(1, 4)});
    auto j = JointDist<R>::iid_power(coin, 2);
    auto rc = closeness_chain_check(j, {R(5, 4), R(5, 4)});
    CHECK(rc.premise_ok);
    CHECK(rc.satisfied);
    double single = hellinger_closeness(coin);
    CHECK(rc.measured == Catch::Approx(single * single).margin(1e-12));

    // random two-block joints with alpha defined by the measured premise
    SplitMix64 g(777);
    for (int rep = 0; rep < 40; ++rep) {
        std::vector<long> w(9);
        long sum = 0;
        for (auto& v : w) {
            v = 1 + (long)g.below(50);
            sum += v;
        }
        std::vector<R> mass;
        for (long v : w) {
            R q(v, sum);
            q.canonicalize();
            mass.push_back(q);
        }
        JointDist<R> joint({{"X1", 3}, {"X2", 3}}, std::move(mass));
        R a1 = cp(joint.marginal({"X1"}).flatten()) * 3;
        R a2 = cond_cp(joint, "X2", {"X1"}) * 3;
        auto rr = closeness_chain_check(joint, {a1, a2});
        CHECK(rr.premise_ok);
        CHECK(rr.satisfied);
    }

    // premise violation is reported, not thrown
    auto bad = closeness_chain_check(j, {R(1), R(1)});
    CHECK_FALSE(bad.premise_ok);
    CHECK_FALSE(bad.satisfied);
}
