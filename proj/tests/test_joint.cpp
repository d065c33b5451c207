#include <catch_amalgamated.hpp>

#include "hashlab/joint.hpp"
#include "hashlab/rng.hpp"

using namespace hashlab;
using R = Rational;

namespace {

JointDist<R> random_joint(SplitMix64& g, std::vector<Axis> axes) {
    std::uint64_t total = 1;
    for (auto& a : axes) total *= a.size;
    std::vector<long> w(total);
    long sum = 0;
    for (auto& v : w) {
        v = 1 + static_cast<long>(g.below(1 << 12));
        sum += v;
    }
    std::vector<R> mass;
    for (long v : w) {
        R q(v, sum);
        q.canonicalize();
        mass.push_back(q);
    }
    return JointDist<R>(std::move(axes), std::move(mass));
}

}  // namespace

TEST_CASE("iid power of a uniform base is uniform") {
    auto j = JointDist<R>::iid_power(Dist<R>::uniform(2), 3);
    REQUIRE(j.size() == 8);
    for (const auto& m : j.mass()) CHECK(m == R(1, 8));
    CHECK(j.axes()[0].name == "X1");
    CHECK(j.axes()[2].name == "X3");
}

TEST_CASE("marginal of a product recovers the factors") {
    Dist<R> a(2, {R(1, 3), R(2, 3)});
    Dist<R> b(3, {R(1, 2), R(1, 3), R(1, 6)});
    auto j = JointDist<R>::product({{"A", a}, {"B", b}});
    auto ma = j.marginal({"A"});
    auto mb = j.marginal({"B"});
    for (std::uint32_t v = 0; v < 2; ++v) CHECK(ma.mass()[v] == a[v]);
    for (std::uint32_t v = 0; v < 3; ++v) CHECK(mb.mass()[v] == b[v]);
}

TEST_CASE("condition then marginalize matches hand computation") {
    // two-axis joint over 2x2: mass = [[1/8, 3/8], [1/4, 1/4]]
    JointDist<R> j({{"X", 2}, {"Y", 2}}, {R(1, 8), R(3, 8), R(1, 4), R(1, 4)});
    auto c0 = j.condition("X", 0);
    CHECK(c0.mass()[0] == R(1, 4));  // (1/8) / (1/2)
    CHECK(c0.mass()[1] == R(3, 4));
    auto c1 = j.condition("Y", 1);
    CHECK(c1.mass()[0] == R(3, 5));  // (3/8) / (5/8)
    CHECK(c1.mass()[1] == R(2, 5));

    // conditioning on a zero-probability event is an error
    JointDist<R> z({{"X", 2}, {"Y", 2}}, {R(1, 2), R(1, 2), R(0), R(0)});
    CHECK_THROWS_AS(z.condition("X", 1), std::domain_error);
}

TEST_CASE("cond_cp basics") {
    // independent: cond_cp equals cp of the target marginal
    Dist<R> x(3, {R(1, 2), R(1, 3), R(1, 6)});
    Dist<R> y(2, {R(1, 4), R(3, 4)});
    auto j = JointDist<R>::product({{"X", x}, {"Y", y}});
    CHECK(cond_cp(j, "X", {"Y"}) == cp(x));

    // perfect copy: conditioning reveals X
    std::vector<R> copy_mass(4, R(0));
    copy_mass[0 * 2 + 0] = R(1, 2);
    copy_mass[1 * 2 + 1] = R(1, 2);
    JointDist<R> copy({{"X", 2}, {"Y", 2}}, std::move(copy_mass));
    CHECK(cond_cp(copy, "X", {"Y"}) == 1);
    CHECK(cp(copy.marginal({"X"}).flatten()) == R(1, 2));

    CHECK_THROWS_AS(cond_cp(j, "X", {"X"}), std::invalid_argument);
    CHECK_THROWS_AS(cond_cp(j, "Z", {}), std::invalid_argument);
}

TEST_CASE("cond_cp equals brute force over outcomes") {
    SplitMix64 g(404);
    for (int rep = 0; rep < 50; ++rep) {
        auto j = random_joint(g, {{"X", 3}, {"Y", 3}});
        // brute force: sum over y of Pr[y] * cp(X | y)
        R acc(0);
        for (std::uint32_t yv = 0; yv < 3; ++yv) {
            R w(0);
            std::vector<R> col(3, R(0));
            for (std::uint32_t xv = 0; xv < 3; ++xv) {
                const R& m = j.mass()[xv * 3 + yv];
                w += m;
                col[xv] += m;
            }
            if (w == 0) continue;
            R c(0);
            for (const auto& v : col) c += (v / w) * (v / w);
            acc += w * c;
        }
        CHECK(cond_cp(j, "X", {"Y"}) == acc);
    }
}

TEST_CASE("conditioning monotonicity on random three-axis joints") {
    SplitMix64 g(505);
    for (int rep = 0; rep < 100; ++rep) {
        auto j = random_joint(
            g, {{"X", 2 + (std::uint32_t)g.below(3)}, {"Y", 2 + (std::uint32_t)g.below(3)},
                {"Z", 2 + (std::uint32_t)g.below(3)}});
        R base = cp(j.marginal({"X"}).flatten());
        R one = cond_cp(j, "X", {"Y"});
        R two = cond_cp(j, "X", {"Y", "Z"});
        CHECK(!(base > one));
        CHECK(!(one > two));
    }
}

TEST_CASE("chain bound: cp(joint) <= alpha^T for the worst average prefix cp") {
    SplitMix64 g(606);
    for (int rep = 0; rep < 100; ++rep) {
        std::uint32_t t = 2 + (std::uint32_t)g.below(3);
        std::vector<Axis> axes;
        for (std::uint32_t i = 1; i <= t; ++i)
            axes.push_back({"X" + std::to_string(i), 2 + (std::uint32_t)g.below(2)});
        auto j = random_joint(g, axes);

        // alpha := max over support sequences of the average conditional cp;
        // the summand for block i depends only on the prefix, so the walk
        // branches on prefixes and finishes once the last block is scored.
        R alpha(0);
        auto probe = [&](auto&& self, const JointDist<R>& cur, std::uint32_t depth,
                         R partial) -> void {
            std::string name = "X" + std::to_string(depth + 1);
            auto marg = cur.marginal({name}).flatten();
            partial += cp(marg);
            if (depth + 1 == t) {
                R avg = partial / R((long)t);
                if (avg > alpha) alpha = avg;
                return;
            }
            for (std::uint32_t v = 0; v < marg.domain_size(); ++v)
                if (marg[v] > 0) self(self, cur.condition(name, v), depth + 1, partial);
        };
        probe(probe, j, 0, R(0));
        CHECK(!(cp(j) > pow_int(alpha, t)));
    }
}

TEST_CASE("flatten and uniform") {
    auto u = JointDist<R>::uniform({{"A", 2}, {"B", 3}});
    CHECK(cp(u) == R(1, 6));
    CHECK(u.flatten().domain_size() == 6);
    CHECK(min_cp_within_distance(u, R(0)) == R(1, 6));
}

TEST_CASE("joint validation") {
    CHECK_THROWS_AS(JointDist<R>({{"A", 2}, {"A", 2}},
                                 {R(1, 4), R(1, 4), R(1, 4), R(1, 4)}),
                    std::invalid_argument);
    CHECK_THROWS_AS(JointDist<R>({{"A", 2}}, {R(1, 2)}), std::invalid_argument);
    CHECK_THROWS_AS(JointDist<R>({{"A", 2}}, {R(2, 3), R(2, 3)}), std::invalid_argument);
}
