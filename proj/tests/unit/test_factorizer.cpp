#include <catch2/catch_amalgamated.hpp>

#include "haupt/factorizer.hpp"
#include "haupt/hauptmodul.hpp"

using namespace haupt;

TEST_CASE("exact_divide performs integer long division", "[factorizer]") {
    IntPoly prod = poly_mul(IntPoly{-4, 1}, IntPoly{3, 0, 1});  // (y-4)(y^2+3)
    auto q = exact_divide(prod, IntPoly{-4, 1});
    REQUIRE(q.has_value());
    CHECK(*q == IntPoly{3, 0, 1});
    CHECK_FALSE(exact_divide(prod, IntPoly{1, 1}).has_value());  // y+1 is no divisor
}

TEST_CASE("quadratic with two integer roots", "[factorizer]") {
    Factorization f = factor_over_z(IntPoly{BigInt(-732096), BigInt(-240), BigInt(1)});
    REQUIRE(f.factors.size() == 2);
    CHECK(f.factors[0] == IntPoly{BigInt(-984), BigInt(1)});  // y - 984 sorts first
    CHECK(f.factors[1] == IntPoly{BigInt(744), BigInt(1)});   // y + 744
}

TEST_CASE("irreducible sextic times a linear factor", "[factorizer]") {
    LevelData lvl = load_level_file("data/levels/level_029.json");
    Factorization f = factor_over_z(lvl.expected.h);
    REQUIRE(f.factors.size() == 2);
    CHECK(f.factors[0] == IntPoly{2, 1});
    CHECK(f.factors[1] ==
          IntPoly{BigInt(-4), BigInt(-32), BigInt(-83), BigInt(-66), BigInt(-17), BigInt(2),
                  BigInt(1)});
    // The product restores the input.
    CHECK(poly_mul(f.factors[0], f.factors[1]) == lvl.expected.h);
}

TEST_CASE("factor ordering is canonical", "[factorizer]") {
    std::vector<IntPoly> fs{IntPoly{BigInt(-984), BigInt(1)}, IntPoly{3, 0, 1},
                            IntPoly{BigInt(744), BigInt(1)}};
    auto sorted = sorted_factors(fs);
    CHECK(sorted[0] == IntPoly{BigInt(-984), BigInt(1)});  // degree 1 before degree 2,
    CHECK(sorted[1] == IntPoly{BigInt(744), BigInt(1)});   // then lexicographic coefficients
    CHECK(sorted[2] == IntPoly{3, 0, 1});
}

TEST_CASE("inputs outside the contract are rejected", "[factorizer]") {
    CHECK_THROWS_AS(factor_over_z(IntPoly{2, 4, 2}), Error);  // not monic
    IntPoly sq = poly_mul(IntPoly{1, 1}, IntPoly{1, 1});
    CHECK_THROWS_AS(factor_over_z(sq), NotSquarefree);
    CHECK_THROWS_AS(factor_over_z(IntPoly{5}), Error);  // constant
}

TEST_CASE("precision doubling leaves the factorization unchanged", "[factorizer]") {
    LevelData lvl = load_level_file("data/levels/level_110.json");
    Factorization base = factor_over_z(lvl.expected.h, 192);
    Factorization twice = factor_over_z(lvl.expected.h, 384);
    CHECK(base.factors == twice.factors);
}
