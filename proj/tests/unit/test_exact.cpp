#include <catch2/catch_amalgamated.hpp>

#include "haupt/exact.hpp"

using namespace haupt;

TEST_CASE("QSeries indexing and truncation semantics", "[exact]") {
    QSeries s(-1, {BigRat(1), BigRat(0), BigRat(5)}, 2);
    CHECK(s.min_exponent() == -1);
    CHECK(s.truncation_order() == 2);
    CHECK(s.at(-1) == 1);
    CHECK(s.at(0) == 0);
    CHECK(s.at(1) == 5);
    CHECK(s.at(-7) == 0);  // below the stored window the series is exactly zero
    CHECK_THROWS_AS(s.at(2), TruncationError);
    CHECK_THROWS_AS(s.at(100), TruncationError);
}

TEST_CASE("series_mul tracks the shorter reliable window", "[exact]") {
    // (q^-1 + q) * (1 + q): the first factor is only known through q^1,
    // so the product is only reliable through q^0 = (-1) + 1.
    QSeries a(-1, {BigRat(1), BigRat(0), BigRat(1)}, 2);
    QSeries b(0, {BigRat(1), BigRat(1)}, 2);
    QSeries p = series_mul(a, b);
    CHECK(p.min_exponent() == -1);
    CHECK(p.truncation_order() == 1);
    CHECK(p.at(-1) == 1);
    CHECK(p.at(0) == 1);
    CHECK_THROWS_AS(p.at(1), TruncationError);
}

TEST_CASE("poly_of_series expands an integer polynomial in a series", "[exact]") {
    // j = q^-1 + 2q; j^2 - 3 = q^-2 + 1 + 4q^2.
    QSeries j(-1, {BigRat(1), BigRat(0), BigRat(2)}, 2);
    QSeries v = poly_of_series(IntPoly{-3, 0, 1}, j);
    CHECK(v.at(-2) == 1);
    CHECK(v.at(-1) == 0);
    CHECK(v.at(0) == 1);
}

TEST_CASE("solve_rational_system solves exactly", "[exact]") {
    // x + y = 3, x - y = 1 -> x = 2, y = 1; entries include denominators.
    std::vector<std::vector<BigRat>> m{{BigRat(1, 2), BigRat(1, 2)}, {BigRat(1), BigRat(-1)}};
    std::vector<BigRat> rhs{BigRat(3, 2), BigRat(1)};
    auto x = solve_rational_system(m, rhs);
    REQUIRE(x.size() == 2);
    CHECK(x[0] == BigRat(2));
    CHECK(x[1] == BigRat(1));
}

TEST_CASE("solve_rational_system needs a pivot permutation", "[exact]") {
    // Leading zero forces column/row exchange.
    std::vector<std::vector<BigRat>> m{{BigRat(0), BigRat(2), BigRat(1)},
                                       {BigRat(1), BigRat(0), BigRat(0)},
                                       {BigRat(0), BigRat(0), BigRat(3)}};
    std::vector<BigRat> rhs{BigRat(5), BigRat(7), BigRat(9)};
    auto x = solve_rational_system(m, rhs);
    CHECK(x[0] == BigRat(7));
    CHECK(x[1] == BigRat(1));
    CHECK(x[2] == BigRat(3));
}

TEST_CASE("solve_rational_system rejects singular systems", "[exact]") {
    std::vector<std::vector<BigRat>> m{{BigRat(1), BigRat(2)}, {BigRat(2), BigRat(4)}};
    std::vector<BigRat> rhs{BigRat(1), BigRat(2)};
    CHECK_THROWS_AS(solve_rational_system(m, rhs), SingularSystem);
}

TEST_CASE("poly_sqrt_half extracts h with 2h^2 == Q", "[exact]") {
    IntPoly q1{BigInt("1071929106432"), BigInt("702812160"), BigInt("-2813184"),
               BigInt(-960), BigInt(2)};
    IntPoly h = poly_sqrt_half(q1);
    CHECK(h == IntPoly{BigInt(-732096), BigInt(-240), BigInt(1)});

    IntPoly sq = poly_mul(h, h);
    for (auto& c : sq) c *= 2;
    CHECK(sq == q1);
}

TEST_CASE("poly_sqrt_half rejects non-squares", "[exact]") {
    CHECK_THROWS_AS(poly_sqrt_half(IntPoly{2, 2, 2}), NotAPerfectSquare);
    // Correct leading coefficient but a broken cross term.
    CHECK_THROWS_AS(poly_sqrt_half(IntPoly{1, 1, 1, 0, 2}), NotAPerfectSquare);
}

TEST_CASE("poly_gcd and squarefree detection", "[exact]") {
    IntPoly a = poly_mul(IntPoly{1, 1}, IntPoly{1, 1});  // (y+1)^2
    IntPoly b = poly_mul(a, IntPoly{-2, 1});             // (y+1)^2 (y-2)
    CHECK_FALSE(poly_is_squarefree(b));
    CHECK(poly_is_squarefree(IntPoly{-2, -1, 1}));  // (y-2)(y+1)
    IntPoly g = poly_gcd(b, poly_derivative(b));
    CHECK(poly_degree(g) == 1);  // the repeated (y+1)
}

TEST_CASE("string round trips", "[exact]") {
    CHECK(parse_bigint("-472862720") == BigInt("-472862720"));
    CHECK(bigrat_to_string(parse_bigrat("-7/3")) == "-7/3");
    CHECK(bigrat_to_string(parse_bigrat("42")) == "42");
    CHECK(poly_to_string(IntPoly{BigInt(-732096), BigInt(-240), BigInt(1)}) ==
          "y^2 - 240y - 732096");
}
