#include <catch2/catch_amalgamated.hpp>

#include "haupt/mp.hpp"

using namespace haupt;

TEST_CASE("MpReal construction and printing", "[mp]") {
    MpReal a(3L, 128);
    MpReal b = MpReal::from_string("-0.5", 128);
    CHECK((a + b).to_double() == Catch::Approx(2.5));
    CHECK((a * b).to_double() == Catch::Approx(-1.5));
    CHECK(abs(b).to_double() == Catch::Approx(0.5));
    CHECK(MpReal(BigInt("123456789123456789"), 128).to_string(18) == "123456789123456789");
    CHECK(MpReal(BigRat(1, 4), 64).to_double() == Catch::Approx(0.25));
}

TEST_CASE("MpReal nearest-integer rounding", "[mp]") {
    CHECK(MpReal::from_string("983.9999999999", 128).to_nearest_bigint() == 984);
    CHECK(MpReal::from_string("-744.0000000001", 128).to_nearest_bigint() == -744);
}

TEST_CASE("MpComplex principal log and exp invert each other", "[mp]") {
    const mpfr_prec_t w = 192;
    MpComplex z{MpReal(-2L, w), MpReal(3L, w)};
    MpComplex back = exp(log(z));
    CHECK(abs(back - z) < MpReal::pow2(-150, w));
    // Principal branch: imaginary part of log lies in (-pi, pi].
    MpComplex neg{MpReal(-1L, w), MpReal(0L, w)};
    CHECK(abs(log(neg).imag() - MpReal::pi(w)) < MpReal::pow2(-150, w));
}

TEST_CASE("roots_of_intpoly certifies quadratic roots exactly where expected", "[mp]") {
    // (y - 984)(y + 744) = y^2 - 240y - 732096
    RootSet rs = roots_of_intpoly(IntPoly{BigInt(-732096), BigInt(-240), BigInt(1)}, 192);
    REQUIRE(rs.roots.size() == 2);
    // Sorted by real part: -744 first.
    CHECK(abs(rs.roots[0].real() + MpReal(744L, 256)) < MpReal::pow2(-150, 256));
    CHECK(abs(rs.roots[1].real() - MpReal(984L, 256)) < MpReal::pow2(-150, 256));
    CHECK(abs(rs.roots[0].imag()) < MpReal::pow2(-150, 256));
    CHECK(rs.worst_residual < MpReal::pow2(-96, 256));
}

TEST_CASE("roots_of_intpoly handles complex-conjugate pairs", "[mp]") {
    // y^2 + 1: roots +-i, sorted by (re, im).
    RootSet rs = roots_of_intpoly(IntPoly{1, 0, 1}, 160);
    REQUIRE(rs.roots.size() == 2);
    CHECK(rs.roots[0].imag().sign() < 0);
    CHECK(rs.roots[1].imag().sign() > 0);
    CHECK(abs(rs.roots[1].imag() - MpReal(1L, 200)) < MpReal::pow2(-120, 200));
}

TEST_CASE("roots_of_intpoly on a clustered septic stays certified", "[mp]") {
    // h for one of the larger levels: y^7 + 4y^6 - 13y^5 - 100y^4 - 215y^3
    // - 198y^2 - 68y - 8 has a root cluster near -1.
    IntPoly h{BigInt(-8), BigInt(-68), BigInt(-198), BigInt(-215),
              BigInt(-100), BigInt(-13), BigInt(4), BigInt(1)};
    RootSet rs = roots_of_intpoly(h, 256);
    REQUIRE(rs.roots.size() == 7);
    CHECK(rs.worst_residual < MpReal::pow2(-128, 320));
    // -2 is an exact root.
    bool found = false;
    for (const auto& r : rs.roots)
        if (abs(r - MpComplex{MpReal(-2L, 320), MpReal(0L, 320)}) < MpReal::pow2(-120, 320))
            found = true;
    CHECK(found);
}

TEST_CASE("mp_poly_eval matches integer evaluation", "[mp]") {
    IntPoly p{3, -2, 1};  // y^2 - 2y + 3 at y = 5 -> 18
    MpComplex v = mp_poly_eval(p, MpComplex{MpReal(5L, 128), MpReal(0L, 128)}, 128);
    CHECK(abs(v.real() - MpReal(18L, 128)) < MpReal::pow2(-100, 128));
}
