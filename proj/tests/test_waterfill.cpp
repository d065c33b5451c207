#include <catch_amalgamated.hpp>

#include "hashlab/joint.hpp"
#include "hashlab/rng.hpp"

using namespace hashlab;
using R = Rational;

namespace {

Dist<R> random_dist(SplitMix64& g, std::uint32_t m) {
    std::vector<long> w(m);
    long total = 0;
    for (auto& v : w) {
        v = static_cast<long>(g.below(1 << 14));
        total += v;
    }
    if (total == 0) w[0] = total = 1;
    std::vector<R> mass;
    for (long v : w) {
        R q(v, total);
        q.canonicalize();
        mass.push_back(q);
    }
    return Dist<R>(m, std::move(mass));
}

// independent float oracle: bisect the clip level until the budget matches
double bisect_min_sq_mass(const std::vector<double>& p, double budget) {
    double lo = 0, hi = 0;
    for (double v : p) hi = std::max(hi, v);
    for (int iter = 0; iter < 200; ++iter) {
        double mid = 0.5 * (lo + hi);
        double s = 0;
        for (double v : p) s += std::min(v, mid);
        (s < budget ? lo : hi) = mid;
    }
    double lambda = 0.5 * (lo + hi), acc = 0;
    for (double v : p) acc += std::min(v, lambda) * std::min(v, lambda);
    return acc;
}

}  // namespace

TEST_CASE("water-filling worked examples") {
    {
        Dist<R> p(2, {R(3, 4), R(1, 4)});
        auto r = min_sq_mass(p, R(1, 2));
        CHECK(r.level == R(1, 4));
        CHECK(r.min_sq_mass == R(1, 8));
        CHECK(r.achieving_q == std::vector<R>{R(1, 4), R(1, 4)});
    }
    {
        auto r = min_sq_mass(Dist<R>::uniform(5), R(1));
        CHECK(r.min_sq_mass == R(1, 5));
    }
    {
        Dist<R> p(2, {R(1), R(0)});
        auto r = min_sq_mass(p, R(1, 2));
        CHECK(r.min_sq_mass == R(1, 4));
        CHECK(r.achieving_q == std::vector<R>{R(1, 2), R(0)});
    }
    CHECK_THROWS_AS(min_sq_mass(Dist<R>::uniform(2), R(0)), std::invalid_argument);
    CHECK_THROWS_AS(min_sq_mass(Dist<R>::uniform(2), R(3, 2)), std::invalid_argument);
}

TEST_CASE("exact optimum satisfies the clipped form and exchange optimality") {
    SplitMix64 g(808);
    for (int rep = 0; rep < 500; ++rep) {
        std::uint32_t m = 2 + (std::uint32_t)g.below(10);
        auto p = random_dist(g, m);
        R budget(1 + (long)g.below(1000), 1001);
        budget.canonicalize();
        auto r = min_sq_mass(p, budget);

        // feasibility and exact budget
        R total(0);
        for (std::uint32_t x = 0; x < m; ++x) {
            CHECK(!(r.achieving_q[x] < 0));
            CHECK(!(r.achieving_q[x] > p[x]));
            CHECK(r.achieving_q[x] == std::min(p[x], r.level));
            total += r.achieving_q[x];
        }
        CHECK(total == budget);

        // value matches
        R msm(0);
        for (const auto& q : r.achieving_q) msm += q * q;
        CHECK(msm == r.min_sq_mass);

        // pairwise exchange optimality: no donor (q_i > 0) and receiver
        // (q_j < p_j) with q_j < q_i, or shifting mass would reduce the sum
        for (std::uint32_t i = 0; i < m; ++i)
            for (std::uint32_t j = 0; j < m; ++j) {
                if (i == j || !(r.achieving_q[i] > 0) || !(r.achieving_q[j] < p[j])) continue;
                CHECK(!(r.achieving_q[j] < r.achieving_q[i]));
            }
    }
}

TEST_CASE("float mode matches the bisection oracle within 1e-9") {
    SplitMix64 g(909);
    for (int rep = 0; rep < 500; ++rep) {
        std::uint32_t m = 2 + (std::uint32_t)g.below(10);
        std::vector<double> p(m);
        double total = 0;
        for (auto& v : p) {
            v = 1e-9 + g.uniform01();
            total += v;
        }
        for (auto& v : p) v /= total;
        double budget = 0.001 + 0.998 * g.uniform01();
        Dist<double> d(m, std::vector<double>(p));
        auto r = min_sq_mass(d, budget);
        CHECK(r.min_sq_mass == Catch::Approx(bisect_min_sq_mass(p, budget)).margin(1e-9));
    }
}

TEST_CASE("min_cp_within_distance certifies random perturbations") {
    SplitMix64 g(1010);
    for (int rep = 0; rep < 40; ++rep) {
        auto base = random_dist(g, 8);
        JointDist<R> j({{"X", 8}}, base.mass());
        R gamma(1 + (long)g.below(60), 100);
        gamma.canonicalize();
        R lower = min_cp_within_distance(j, gamma);

        // every random Q within distance gamma must have cp >= lower
        for (int probe = 0; probe < 20; ++probe) {
            // push up to gamma of mass from one region to another
            std::vector<R> q = base.mass();
            R moved(0);
            for (int step = 0; step < 8 && moved < gamma; ++step) {
                std::uint32_t from = (std::uint32_t)g.below(8);
                std::uint32_t to = (std::uint32_t)g.below(8);
                R amount = std::min(q[from], R(R(gamma - moved) / R(2)));
                q[from] -= amount;
                q[to] += amount;
                moved += amount;
            }
            Dist<R> qd(8, std::move(q));
            R dist = stat_dist(base, qd);
            if (dist > gamma) continue;
            CHECK(!(cp(qd) < lower));
        }
    }
}

TEST_CASE("point mass within distance 1/2 on two outcomes") {
    JointDist<R> j({{"X", 2}}, {R(1), R(0)});
    CHECK(min_cp_within_distance(j, R(1, 2)) == R(1, 4));
    CHECK(min_cp_within_distance(j, R(0)) == R(1));
}
