#include <catch2/catch_amalgamated.hpp>

#include "haupt/hauptmodul.hpp"
#include "haupt/schwarzian_ode.hpp"

using namespace haupt;

TEST_CASE("b-coefficient closed form pins", "[schwarzian]") {
    LevelData lvl29 = load_level_file("data/levels/level_029.json");
    CHECK(b_coefficient(*lvl29.q_expansion, 0) == -15);

    QSeries j1 = eisenstein_j_level1(6);
    CHECK(b_coefficient(j1, 1) == BigRat(BigInt("-472862720")));
}

TEST_CASE("closed form agrees with the direct series route", "[schwarzian]") {
    // t's q^k coefficient must equal 2 b(k) wherever both are defined.
    for (const char* path : {"data/levels/level_001.json", "data/levels/level_029.json"}) {
        LevelData lvl = load_level_file(path);
        QSeries j = lvl.level == 1 ? eisenstein_j_level1(32) : *lvl.q_expansion;
        SchwarzianIngredients ing = schwarzian_ingredients(j);
        const int kmax = std::min(ing.t.truncation_order(), j.truncation_order() - 1);
        for (int k = 0; k < kmax; ++k)
            CHECK(ing.t.at(k) == BigRat(2) * b_coefficient(j, k));
    }
}

TEST_CASE("ingredient leading terms", "[schwarzian]") {
    QSeries j = eisenstein_j_level1(8);
    SchwarzianIngredients ing = schwarzian_ingredients(j);
    CHECK(ing.t.min_exponent() == -2);
    CHECK(ing.t.at(-2) == -1);
    CHECK(ing.t.at(-1) == 0);
    CHECK(ing.f.min_exponent() == -4);
    CHECK(ing.f.at(-4) == 1);
}

TEST_CASE("a corrupted expansion trips the leading-term check", "[schwarzian]") {
    QSeries j = eisenstein_j_level1(8);
    QSeries bad = j + QSeries::monomial(BigRat(1), -1, 8);  // doubles the q^-1 term
    CHECK_THROWS_AS(schwarzian_ingredients(bad), LeadingTermMismatch);
}

TEST_CASE("level-1 system solves to the known polynomials", "[schwarzian]") {
    QSeries j = eisenstein_j_level1(12);
    OdeSystem sys = assemble_system(j, 2);
    CHECK(sys.n == 2);
    CHECK(sys.equations.size() == 6);  // rows q^-5 .. q^0
    CHECK(sys.equations.front().q_power == -5);
    CHECK(sys.equations.back().q_power == 0);

    OdePolynomials pq = solve_ode(sys);
    CHECK(pq.p == IntPoly{BigInt(1743552), BigInt(-480), BigInt(1)});
    CHECK(pq.q == IntPoly{BigInt("1071929106432"), BigInt("702812160"), BigInt("-2813184"),
                          BigInt(-960), BigInt(2)});
    CHECK(ode_residual_is_zero(j, pq.p, pq.q));
}

TEST_CASE("level-29 pinned equations appear literally", "[schwarzian]") {
    LevelData lvl = load_level_file("data/levels/level_029.json");
    OdeSystem sys = assemble_system(*lvl.q_expansion, 12);
    REQUIRE(sys.equations.size() == 26);

    const OdeEquation& top = sys.equations.front();  // q^-15: A11 - B13 = 0
    CHECK(top.q_power == -15);
    CHECK(top.a == std::map<int, BigInt>{{11, BigInt(1)}});
    CHECK(top.b == std::map<int, BigInt>{{13, BigInt(-1)}});
    CHECK(top.constant == 0);

    const OdeEquation& next = sys.equations[1];  // q^-14: A10 - B12 - 48 = 0
    CHECK(next.q_power == -14);
    CHECK(next.a == std::map<int, BigInt>{{10, BigInt(1)}});
    CHECK(next.b == std::map<int, BigInt>{{12, BigInt(-1)}});
    CHECK(next.constant == -48);
}

TEST_CASE("solving a wrong-size system is rejected", "[schwarzian]") {
    QSeries j = eisenstein_j_level1(12);
    CHECK_THROWS_AS(assemble_system(j, 3), Error);   // n must be even
    CHECK_THROWS_AS(assemble_system(j, 0), Error);   // and at least 2
}

TEST_CASE("residual detection catches wrong polynomials", "[schwarzian]") {
    QSeries j = eisenstein_j_level1(12);
    IntPoly p{BigInt(1743552), BigInt(-480), BigInt(1)};
    IntPoly q{BigInt("1071929106432"), BigInt("702812160"), BigInt("-2813184"), BigInt(-960),
              BigInt(2)};
    IntPoly p_bad = p;
    p_bad[0] += 1;
    CHECK(ode_residual_is_zero(j, p, q));
    CHECK_FALSE(ode_residual_is_zero(j, p_bad, q));
}
