#include <catch_amalgamated.hpp>

#include "hashlab/hypergeom.hpp"

using namespace hashlab;
using R = Rational;

TEST_CASE("worked example: N=4, K=2, |T|=2, beta=1/2") {
    // L = 1; the interval holds exactly |S cap T| = 1, probability 4/6
    auto r = hypergeom_claim_check(4, 2, 2, R(1, 2));
    CHECK(r.L == 1);
    CHECK(r.measured == R(2, 3));
    CHECK(r.ratio == R(4, 3));
    // N = 2K sits outside the claim's range, so nothing is asserted
    CHECK_FALSE(r.in_claim_range);
    CHECK(r.satisfied);
}

TEST_CASE("tiny beta with non-integral L catches nothing") {
    // L = 3/2, beta = 1/100: the interval contains no integer
    auto r = hypergeom_claim_check(8, 3, 4, R(1, 100));
    CHECK(r.L == R(3, 2));
    CHECK(r.measured == 0);
    CHECK(r.in_claim_range);
    CHECK(r.satisfied);
}

TEST_CASE("hypergeometric mass sums correctly") {
    // with beta wide open (L override), the interval covers everything
    auto r = hypergeom_claim_check(10, 3, 5, R(9, 10), R(3, 2));
    R total(0);
    for (std::uint32_t overlap = 0; overlap <= 3; ++overlap)
        total += binom_rat(5, overlap) * binom_rat(5, 3 - overlap) / binom_rat(10, 3);
    CHECK(total == 1);
    CHECK(!(r.measured > 1));
}

TEST_CASE("sweep reproduces the frozen constant byte for byte") {
    auto a = hypergeom_sweep();
    auto b = hypergeom_sweep();
    REQUIRE(a.cells.size() == b.cells.size());
    CHECK(a.max_ratio == b.max_ratio);
    for (std::size_t i = 0; i < a.cells.size(); ++i)
        CHECK(to_csv(a.cells[i].row) == to_csv(b.cells[i].row));
    CHECK(a.max_ratio == derived_constants::hypergeom_cpp());
    for (const auto& cell : a.cells) CHECK(cell.satisfied);
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(hypergeom_claim_check(4, 5, 2, R(1, 2)), std::invalid_argument);
    CHECK_THROWS_AS(hypergeom_claim_check(4, 2, 5, R(1, 2)), std::invalid_argument);
    CHECK_THROWS_AS(hypergeom_claim_check(4, 2, 2, R(0)), std::invalid_argument);
    CHECK(binom_rat(5, 7) == 0);
    CHECK(binom_rat(200, 100) > 0);
}
