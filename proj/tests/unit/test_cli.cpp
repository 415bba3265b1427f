#include <catch2/catch_amalgamated.hpp>

#include <filesystem>

#include "haupt/cli.hpp"

using namespace haupt;

namespace {

CliConfig base_config() {
    CliConfig cfg;
    cfg.fixtures_dir = "data";
    return cfg;
}

}  // namespace

TEST_CASE("pipeline passes end to end for the computed level", "[cli]") {
    Json r = run_level_pipeline(base_config(), 1);
    CHECK(r["status"] == "ok");
    for (const auto& c : r["checks"]) CHECK(c["status"] != "fail");
    CHECK(r["artifacts"]["P"] == Json({"1743552", "-480", "1"}));
    CHECK(r["artifacts"]["h"] == Json({"-732096", "-240", "1"}));
}

TEST_CASE("pipeline passes end to end for the fixture-driven level", "[cli]") {
    PipelineArtifacts art;
    Json r = run_level_pipeline(base_config(), 29, &art);
    CHECK(r["status"] == "ok");
    REQUIRE(art.class_field.has_value());
    CHECK(art.class_field->groups.size() == 1);
    CHECK(art.tower_reports.size() == 1);
    CHECK(art.tower_reports[0].distinct_values == 6);

    // Every check that can run at level 29 must actually run.
    std::map<std::string, std::string> status;
    for (const auto& c : r["checks"])
        status[c["name"].get<std::string>()] = c["status"].get<std::string>();
    for (const char* name :
         {"expand", "structure", "equations", "solve", "sqrt", "factor", "match", "points",
          "fixed_points", "classfield", "integer_moduli", "series_values", "radicals",
          "branch_table", "value_identifications"})
        CHECK(status[name] == "pass");
}

TEST_CASE("missing fixtures are reported as skipped", "[cli]") {
    CliConfig cfg = base_config();
    cfg.fixtures_dir = "data/does-not-exist";
    Json r = run_level_pipeline(cfg, 29);
    CHECK(r["status"] == "skipped");
}

TEST_CASE("report cache round trip is byte-identical", "[cli]") {
    CliConfig cfg = base_config();
    auto dir = std::filesystem::temp_directory_path() / "haupt-cache-test";
    std::filesystem::remove_all(dir);
    cfg.cache_dir = dir.string();

    bool hit1 = true, hit2 = false;
    std::string first = run_level_report_cached(cfg, 1, &hit1);
    std::string second = run_level_report_cached(cfg, 1, &hit2);
    CHECK_FALSE(hit1);
    CHECK(hit2);
    CHECK(first == second);

    // A different numeric configuration must not reuse the entry.
    cfg.precision_bits = 320;
    bool hit3 = true;
    run_level_report_cached(cfg, 1, &hit3);
    CHECK_FALSE(hit3);
    std::filesystem::remove_all(dir);
}

TEST_CASE("text rendering mirrors the artifact tables", "[cli]") {
    Json r = run_level_pipeline(base_config(), 29);
    std::ostringstream os;
    detail::render_level_text(r, os);
    const std::string text = os.str();
    CHECK(text.find("level 29: ok") != std::string::npos);
    CHECK(text.find("P = y^12") != std::string::npos);
    CHECK(text.find("D=-116") != std::string::npos);
    CHECK(text.find("12 branches -> 6 values x2") != std::string::npos);
    CHECK(text.find("[pass] value_identifications") != std::string::npos);
}
