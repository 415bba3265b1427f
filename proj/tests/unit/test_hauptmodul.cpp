#include <catch2/catch_amalgamated.hpp>

#include "haupt/hauptmodul.hpp"

using namespace haupt;

TEST_CASE("genus-zero level list", "[hauptmodul]") {
    const auto& levels = genus_zero_levels();
    CHECK(levels.size() == 44);
    CHECK(levels.front() == 1);
    CHECK(levels.back() == 119);
    CHECK(is_genus_zero_level(29));
    CHECK_FALSE(is_genus_zero_level(4));
    CHECK_FALSE(is_genus_zero_level(72));
}

TEST_CASE("Eisenstein construction pins the first coefficients", "[hauptmodul]") {
    QSeries j = eisenstein_j_level1(5);
    CHECK(j.min_exponent() == -1);
    CHECK(j.at(-1) == 1);
    CHECK(j.at(0) == 0);  // the constant term 744 is removed by normalization
    CHECK(j.at(1) == BigRat(BigInt("196884")));
    CHECK(j.at(2) == BigRat(BigInt("21493760")));
    CHECK(j.at(3) == BigRat(BigInt("864299970")));
    CHECK(j.at(4) == BigRat(BigInt("20245856256")));
}

namespace {

nlohmann::json minimal_doc() {
    return nlohmann::json{
        {"N", 29},
        {"q_expansion",
         {{"min_exponent", -1}, {"coefficients", {"1", "0", "3", "4"}}}},
        {"elliptic_points",
         {{{"re", "0"}, {"sqrt_arg", 29}, {"im_scale", "1/29"}, {"order", 2}}}},
        {"expected",
         {{"n", 2},
          {"P", {"0", "0", "1"}},
          {"Q", {"0", "0", "0", "0", "2"}},
          {"h", {"0", "1"}},
          {"factors", nlohmann::json::array({nlohmann::json::array({"0", "1"})})},
          {"values", {{{"re", "0"}, {"im", "0"}}}},
          {"points",
           {{{"quadratic", {29, 0, 1}},
             {"D", -116},
             {"v", 29},
             {"form", "4v"},
             {"kind", "row"},
             {"gamma", {0, -1, 1}}}}},
          {"class_field", nlohmann::json::array()},
          {"extra_groups", nlohmann::json::array()},
          {"equations", nlohmann::json::array()},
          {"value_identifications", nlohmann::json::array()}}}};
}

}  // namespace

TEST_CASE("ingest accepts a minimal well-formed document", "[hauptmodul]") {
    LevelData lvl = ingest_level(minimal_doc());
    CHECK(lvl.level == 29);
    REQUIRE(lvl.q_expansion.has_value());
    CHECK(lvl.q_expansion->at(1) == 3);
    CHECK(lvl.elliptic_points.size() == 1);
    CHECK(lvl.expected.points[0].discriminant == -116);
    CHECK(lvl.expected.points[0].gamma == std::array<long, 3>{0, -1, 1});
}

TEST_CASE("ingest rejects unknown levels", "[hauptmodul]") {
    auto doc = minimal_doc();
    doc["N"] = 12;  // genus one
    CHECK_THROWS_AS(ingest_level(doc), LevelUnknown);
}

TEST_CASE("ingest rejects a denormalized expansion", "[hauptmodul]") {
    auto doc = minimal_doc();
    doc["q_expansion"]["coefficients"][1] = "744";  // constant term must vanish
    CHECK_THROWS_AS(ingest_level(doc), NormalizationError);
    doc = minimal_doc();
    doc["q_expansion"]["min_exponent"] = 0;  // must start at q^-1
    CHECK_THROWS_AS(ingest_level(doc), NormalizationError);
}

TEST_CASE("ingest reports missing fields by name", "[hauptmodul]") {
    auto doc = minimal_doc();
    doc["expected"].erase("h");
    CHECK_THROWS_AS(ingest_level(doc), SchemaError);
    doc = minimal_doc();
    doc["elliptic_points"][0].erase("order");
    CHECK_THROWS_AS(ingest_level(doc), SchemaError);
}

TEST_CASE("ingest requires values to align with points", "[hauptmodul]") {
    auto doc = minimal_doc();
    doc["expected"]["values"].push_back({{"re", "1"}, {"im", "0"}});
    CHECK_THROWS_AS(ingest_level(doc), SchemaError);
}

TEST_CASE("level fixtures on disk load and validate", "[hauptmodul]") {
    LevelData lvl = load_level_file("data/levels/level_029.json");
    CHECK(lvl.level == 29);
    CHECK(lvl.expected.n == 12);
    CHECK(lvl.elliptic_points.size() == 7);
    CHECK(lvl.expected.equations.size() == 26);
    REQUIRE(lvl.q_expansion.has_value());
    CHECK(lvl.q_expansion->truncation_order() == 26);
}
