#include <catch_amalgamated.hpp>

#include "hashlab/growth.hpp"
#include "hashlab/joint.hpp"
#include "hashlab/rng.hpp"

using namespace hashlab;
using R = Rational;

namespace {

Dist<R> random_dist(SplitMix64& g, std::uint32_t m) {
    std::vector<long> w(m);
    long sum = 0;
    for (auto& v : w) {
        v = (long)g.below(100);
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
}

}  // namespace

TEST_CASE("bernoulli product distances, exact") {
    // Pr[0] = 1/2 - eps vs fair coin: T = 1 gives eps, T = 2 gives eps + eps^2
    R eps(1, 10);
    Dist<R> x(2, {R(2, 5), R(3, 5)});
    Dist<R> u = Dist<R>::uniform(2);
    CHECK(product_stat_dist(x, u, 1) == eps);
    CHECK(product_stat_dist(x, u, 2) == R(11, 100));

    // the weight-class route agrees with plain product enumeration
    for (std::uint32_t t = 1; t <= 6; ++t) {
        auto xt = JointDist<R>::iid_power(x, t).flatten();
        auto ut = JointDist<R>::iid_power(u, t).flatten();
        CHECK(product_stat_dist(x, u, t) == stat_dist(xt, ut));
    }
}

TEST_CASE("product distance is monotone in T") {
    SplitMix64 g(55);
    for (int rep = 0; rep < 10; ++rep) {
        auto a = random_dist(g, 3);
        auto b = random_dist(g, 3);
        R prev(0);
        for (std::uint32_t t = 1; t <= 5; ++t) {
            R cur = product_stat_dist(a, b, t);
            CHECK(!(prev > cur));
            prev = cur;
        }
    }
}

TEST_CASE("reduction to a bernoulli pair") {
    // point mass vs uniform coin: f(Y) is exactly uniform and the distance
    // halves at worst
    auto r = bernoulli_reduction(Dist<R>::point_mass(2, 0), Dist<R>::uniform(2));
    CHECK(r.eps == R(1, 2));
    CHECK(r.delta_f == R(1, 2));
    CHECK(r.ok);

    // identical inputs reduce to distance zero
    auto same = bernoulli_reduction(Dist<R>::uniform(4), Dist<R>::uniform(4));
    CHECK(same.eps == 0);
    CHECK(same.delta_f == 0);
    CHECK(same.ok);

    // random pairs: f(y) lands exactly on a fair coin and delta_f >= eps/2
    SplitMix64 g(66);
    for (int rep = 0; rep < 100; ++rep) {
        auto x = random_dist(g, 2 + (std::uint32_t)g.below(5));
        auto y = random_dist(g, x.domain_size());
        auto red = bernoulli_reduction(x, y);
        CHECK(red.ok);
        // verify Pr[f(y) = 0] = 1/2 from the construction pieces
        R py_out(1);
        for (auto v : red.event) py_out -= y[v];
        CHECK(py_out * red.coin_p0 == R(1, 2));
    }
}

TEST_CASE("large-T growth against the exponential bound") {
    auto r2 = product_growth_large(frac<R>(1, 2), 2);
    CHECK(r2.measured == R(3, 4));
    CHECK(r2.satisfied);

    // T = 1: eps >= 1 - e^(-eps^2/2) is analytic
    for (long j : {1L, 3L, 8L}) {
        auto r = product_growth_large(frac<R>(j, 16), 1);
        CHECK(r.measured == frac<R>(j, 16));
        CHECK(r.satisfied);
    }

    // sweep T = 1..64 for eps in {1/8, 1/4, 1/2}
    for (long num : {1L, 2L, 4L}) {
        for (std::uint32_t t = 1; t <= 64; ++t) {
            auto r = product_growth_large(frac<R>(num, 8), t);
            CHECK(r.satisfied);
        }
    }
}

TEST_CASE("growth table rows") {
    auto table = product_growth_small(Dist<R>(2, {R(2, 5), R(3, 5)}), Dist<R>::uniform(2), 6);
    REQUIRE(table.deltas.size() == 6);
    CHECK(table.deltas[0] == R(1, 10));
    CHECK(table.deltas[1] == R(11, 100));
    for (const auto& row : table.rows) CHECK(row.satisfied);
    CHECK(table.reduction.ok);
}

TEST_CASE("guards and domains") {
    CHECK_THROWS_AS(product_stat_dist(Dist<R>::uniform(2), Dist<R>::uniform(3), 2),
                    std::invalid_argument);
    CHECK_THROWS_AS(product_stat_dist(Dist<R>::uniform(6), Dist<R>::uniform(6), 12, 1000),
                    guard_error);
    CHECK_THROWS_AS(product_growth_large(R(3, 4), 2), std::invalid_argument);
}
