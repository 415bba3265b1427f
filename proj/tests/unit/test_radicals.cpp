#include <catch2/catch_amalgamated.hpp>

#include "haupt/radicals.hpp"

using namespace haupt;

namespace {

RadicalTower tower29() { return load_tower_file("data/towers/tower_029_0.json"); }

}  // namespace

TEST_CASE("tower fixture loads with its structure intact", "[radicals]") {
    RadicalTower t = tower29();
    CHECK(t.level == 29);
    CHECK(t.index == 0);
    CHECK(t.zeta_order == 3);
    REQUIRE(t.levels.size() == 3);
    CHECK(t.levels[0].k == 2);
    CHECK(t.levels[2].k == 3);
    CHECK(t.constant == BigRat(-1, 3));
    CHECK(t.target == IntPoly{BigInt(-4), BigInt(-32), BigInt(-83), BigInt(-66), BigInt(-17),
                              BigInt(2), BigInt(1)});
    CHECK(t.expected.branches == 12);
    CHECK(t.expected.distinct == 6);
    CHECK(t.expected.uniform_multiplicity == 2);
    CHECK(t.expected.branch_table.size() == 12);
}

TEST_CASE("every branch combination hits a target root", "[radicals]") {
    RadicalTower t = tower29();
    TowerReport rep = verify_tower(t, 256);
    CHECK(rep.branch_values.size() == 12);
    CHECK(rep.distinct_values == 6);
    CHECK(rep.uniform_multiplicity == 2);
    CHECK(rep.covered_all_roots);
    CHECK(rep.worst_residual < MpReal(1e-20, 256));
}

TEST_CASE("pinned branch evaluations to 26 decimals", "[radicals]") {
    RadicalTower t = tower29();
    const mpfr_prec_t bits = 256;
    const MpReal tol(1e-26, bits);

    MpComplex first = evaluate_tower_branch(t, {0, 0, 1}, bits);
    MpComplex want1{MpReal::from_string("4.92450092087802125617303717", bits),
                    MpReal(0.0, bits)};
    CHECK(abs(first - want1) < tol);

    MpComplex last = evaluate_tower_branch(t, {1, 1, 2}, bits);
    MpComplex want2{MpReal::from_string("-3.04937112671524243019906657", bits),
                    MpReal(0.0, bits)};
    CHECK(abs(last - want2) < tol);
}

TEST_CASE("branch choices outside the tower are rejected", "[radicals]") {
    RadicalTower t = tower29();
    CHECK_THROWS_AS(evaluate_tower_branch(t, {0, 0, 3}, 128), Error);  // k_3 = 3
    CHECK_THROWS_AS(evaluate_tower_branch(t, {0, 0}, 128), Error);     // wrong arity
}

TEST_CASE("principal branch of a real positive radicand is real", "[radicals]") {
    // omega_1 = sqrt(29) with branch 0 must be the positive square root.
    RadicalTower t = tower29();
    const mpfr_prec_t bits = 192;
    // Branch (0,*,*) fixes omega_1 = +sqrt(29); flipping to branch 1 negates it.
    MpComplex a = evaluate_tower_branch(t, {0, 0, 0}, bits);
    MpComplex b = evaluate_tower_branch(t, {1, 0, 0}, bits);
    CHECK(!(abs(a - b) < MpReal(1e-10, bits)));  // distinct branches differ
}

TEST_CASE("residuals sharpen with precision", "[radicals]") {
    RadicalTower t = tower29();
    TowerReport lo = verify_tower(t, 128);
    TowerReport hi = verify_tower(t, 320);
    CHECK(hi.worst_residual < lo.worst_residual);
    CHECK(hi.worst_residual < MpReal(1e-40, 320));
}
