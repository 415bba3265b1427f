// Command-line driver: exposes the per-stage computations as subcommands and
// the full verification pipeline as `run`, `verify-all`, and `report`.
#include <cstdio>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "haupt/cli.hpp"

namespace {

using haupt::CliConfig;
using haupt::Json;

haupt::LevelData load_level(const CliConfig& cfg, int level) {
    const std::string path = haupt::detail::level_fixture_path(cfg, level);
    if (!std::filesystem::exists(path))
        throw haupt::Error("no fixture for level " + std::to_string(level) + " at " + path);
    return haupt::load_level_file(path);
}

haupt::QSeries expansion_for(const haupt::LevelData& lvl) {
    if (lvl.level == 1) return haupt::eisenstein_j_level1(32);
    if (lvl.q_expansion) return *lvl.q_expansion;
    throw haupt::Error("level " + std::to_string(lvl.level) +
                       " has no stored q-expansion; only fixture polynomials are available");
}

void emit(const CliConfig& cfg, const std::string& text) { haupt::detail::emit(cfg, text); }

int cmd_expand(const CliConfig& cfg, int level) {
    haupt::LevelData lvl = load_level(cfg, level);
    haupt::QSeries j = expansion_for(lvl);
    if (cfg.format == "json") {
        Json out;
        out["level"] = level;
        out["min_exponent"] = j.min_exponent();
        out["truncation_order"] = j.truncation_order();
        Json coeffs = Json::array();
        for (int e = j.min_exponent(); e < j.truncation_order(); ++e)
            coeffs.push_back({e, j.at(e).str()});
        out["coefficients"] = std::move(coeffs);
        emit(cfg, out.dump(2) + "\n");
    } else {
        std::ostringstream os;
        os << "level " << level << " Hauptmodul expansion (truncated at q^"
           << j.truncation_order() << "):\n";
        for (int e = j.min_exponent(); e < j.truncation_order(); ++e)
            if (j.at(e) != 0) os << "  q^" << e << ": " << j.at(e).str() << "\n";
        emit(cfg, os.str());
    }
    return 0;
}

int cmd_solve(const CliConfig& cfg, int level) {
    haupt::LevelData lvl = load_level(cfg, level);
    haupt::QSeries j = expansion_for(lvl);
    haupt::OdeSystem sys = haupt::assemble_system(j, lvl.expected.n);
    haupt::OdePolynomials pq = haupt::solve_ode(sys);
    if (cfg.format == "json") {
        Json out;
        out["level"] = level;
        out["n"] = sys.n;
        out["P"] = haupt::detail::poly_strings(pq.p);
        out["Q"] = haupt::detail::poly_strings(pq.q);
        out["residual_vanishes"] = haupt::ode_residual_is_zero(j, pq.p, pq.q);
        emit(cfg, out.dump(2) + "\n");
    } else {
        std::ostringstream os;
        os << "level " << level << " (n = " << sys.n << ")\n";
        os << "P = " << haupt::poly_to_string(pq.p) << "\n";
        os << "Q = " << haupt::poly_to_string(pq.q) << "\n";
        os << "residual vanishes: "
           << (haupt::ode_residual_is_zero(j, pq.p, pq.q) ? "yes" : "no") << "\n";
        emit(cfg, os.str());
    }
    return 0;
}

int cmd_factor(const CliConfig& cfg, int level) {
    haupt::LevelData lvl = load_level(cfg, level);
    haupt::IntPoly h = haupt::poly_sqrt_half(lvl.expected.q);
    haupt::Factorization fac =
        haupt::factor_over_z(h, static_cast<mpfr_prec_t>(cfg.precision_bits));
    if (cfg.format == "json") {
        Json out;
        out["level"] = level;
        out["h"] = haupt::detail::poly_strings(h);
        Json fs = Json::array();
        for (const auto& f : fac.factors) fs.push_back(haupt::detail::poly_strings(f));
        out["factors"] = std::move(fs);
        out["bits_used"] = static_cast<long>(fac.bits_used);
        emit(cfg, out.dump(2) + "\n");
    } else {
        std::ostringstream os;
        os << "level " << level << "\n";
        os << "h = " << haupt::poly_to_string(h) << "\n";
        os << "h =";
        for (const auto& f : fac.factors) os << " (" << haupt::poly_to_string(f) << ")";
        os << "\n";
        emit(cfg, os.str());
    }
    return 0;
}

int cmd_match(const CliConfig& cfg, int level) {
    haupt::LevelData lvl = load_level(cfg, level);
    const mpfr_prec_t bits = static_cast<mpfr_prec_t>(cfg.precision_bits);
    const mpfr_prec_t w = bits + 64;
    haupt::RootSet roots = haupt::roots_of_intpoly(lvl.expected.h, bits);
    std::vector<haupt::MpComplex> values;
    for (const auto& v : lvl.expected.values)
        values.push_back({haupt::MpReal::from_string(v.re, w),
                          haupt::MpReal::from_string(v.im, w)});
    haupt::MpReal tol(cfg.tolerance, w);
    haupt::MatchTable match = haupt::match_values_to_roots(values, roots.roots, tol);
    if (cfg.format == "json") {
        Json out;
        out["level"] = level;
        Json rows = Json::array();
        for (std::size_t i = 0; i < values.size(); ++i)
            rows.push_back({{"point", i},
                            {"value", haupt::detail::complex_string(values[i])},
                            {"root", match.value_to_root[i]},
                            {"distance", match.distances[i].to_string(6)}});
        out["pairs"] = std::move(rows);
        out["worst_distance"] = match.worst_distance.to_string(6);
        emit(cfg, out.dump(2) + "\n");
    } else {
        std::ostringstream os;
        os << "level " << level << ": " << values.size() << " values against deg "
           << haupt::poly_degree(lvl.expected.h) << " roots\n";
        for (std::size_t i = 0; i < values.size(); ++i)
            os << "  point " << i << " -> root " << match.value_to_root[i] << "  (distance "
               << match.distances[i].to_string(6) << ")\n";
        os << "worst distance: " << match.worst_distance.to_string(6) << "\n";
        emit(cfg, os.str());
    }
    return 0;
}

int run_and_report(const CliConfig& cfg, int level, const char* section) {
    haupt::PipelineArtifacts art;
    Json report = haupt::run_level_pipeline(cfg, level, &art);
    if (report["status"] == "skipped") {
        emit(cfg, report.dump(2) + "\n");
        return 1;
    }
    Json out;
    out["level"] = level;
    out["status"] = report["status"];
    out["checks"] = Json::array();
    out["artifacts"] = Json::object();
    if (report["artifacts"].contains(section))
        out["artifacts"][section] = report["artifacts"][section];
    if (cfg.format == "json") {
        emit(cfg, out.dump(2) + "\n");
    } else {
        std::ostringstream os;
        haupt::detail::render_level_text(out, os);
        emit(cfg, os.str());
    }
    return report["status"] == "fail" ? 1 : 0;
}

int cmd_run(const CliConfig& cfg, int level) {
    std::string bytes = haupt::run_level_report_cached(cfg, level);
    Json report = Json::parse(bytes);
    if (cfg.format == "json") {
        emit(cfg, bytes);
    } else {
        std::ostringstream os;
        haupt::detail::render_level_text(report, os);
        emit(cfg, os.str());
    }
    return report["status"] == "fail" ? 1 : 0;
}

int cmd_verify_all(const CliConfig& cfg) {
    Json agg = haupt::verify_all(cfg);
    if (cfg.format == "json") {
        emit(cfg, agg.dump(2) + "\n");
    } else {
        std::ostringstream os;
        for (const auto& r : agg["levels"]) {
            os << "level " << r["level"].get<int>() << ": " << r["status"].get<std::string>();
            if (r["status"] == "fail") {
                for (const auto& c : r["checks"])
                    if (c["status"] == "fail")
                        os << "\n    " << c["name"].get<std::string>() << ": "
                           << c["detail"].get<std::string>();
                if (r.contains("detail")) os << "\n    " << r["detail"].get<std::string>();
            }
            os << "\n";
        }
        os << agg["levels"].size() << " levels, " << agg["failures"].get<int>()
           << " failures, " << agg["skipped"].get<int>() << " skipped\n";
        emit(cfg, os.str());
    }
    return agg["failures"].get<int>() == 0 ? 0 : 1;
}

int cmd_report(const CliConfig& cfg, int level) {
    if (level > 0) return cmd_run(cfg, level);
    Json agg;
    agg["levels"] = Json::array();
    int failures = 0;
    for (int n : haupt::genus_zero_levels()) {
        Json r = Json::parse(haupt::run_level_report_cached(cfg, n));
        if (r["status"] == "fail") ++failures;
        agg["levels"].push_back(std::move(r));
    }
    agg["failures"] = failures;
    if (cfg.format == "json") {
        emit(cfg, agg.dump(2) + "\n");
    } else {
        std::ostringstream os;
        for (const auto& r : agg["levels"]) haupt::detail::render_level_text(r, os);
        os << agg["levels"].size() << " levels, " << failures << " failures\n";
        emit(cfg, os.str());
    }
    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hauptmodul pipeline for the genus-zero groups Gamma_0(N)+"};
    app.require_subcommand(1);

    CliConfig cfg;
    int level = 0;
    app.add_option("--fixtures", cfg.fixtures_dir, "fixture directory")
        ->capture_default_str();
    app.add_option("--precision-bits", cfg.precision_bits, "working precision in bits")
        ->capture_default_str();
    app.add_option("--tolerance", cfg.tolerance, "numeric matching tolerance")
        ->capture_default_str();
    app.add_option("--format", cfg.format, "output format: text or json")
        ->check(CLI::IsMember({"text", "json"}))
        ->capture_default_str();
    app.add_option("--out", cfg.out, "write output to this file instead of stdout");
    app.add_option("--cache-dir", cfg.cache_dir, "cache directory for level reports");
    app.add_option("--jobs", cfg.jobs, "worker threads for verify-all (0 = auto)");

    auto add_level_cmd = [&](const char* name, const char* desc, bool required) {
        CLI::App* sub = app.add_subcommand(name, desc);
        sub->fallthrough();
        auto* opt = sub->add_option("--level", level, "group level N");
        if (required) opt->required();
        return sub;
    };
    CLI::App* sc_expand = add_level_cmd("expand", "print the Hauptmodul q-expansion", true);
    CLI::App* sc_solve = add_level_cmd("solve", "solve the differential-equation system", true);
    CLI::App* sc_factor = add_level_cmd("factor", "factor h over the integers", true);
    CLI::App* sc_match = add_level_cmd("match", "match point values to roots of h", true);
    CLI::App* sc_class = add_level_cmd("classfield", "print the class-field grouping", true);
    CLI::App* sc_rad = add_level_cmd("radicals", "verify the radical towers", true);
    CLI::App* sc_run = add_level_cmd("run", "run the full pipeline for one level", true);
    CLI::App* sc_all = app.add_subcommand("verify-all", "run every level and aggregate");
    sc_all->fallthrough();
    CLI::App* sc_report = add_level_cmd("report", "emit reports (cached when available)", false);

    CLI11_PARSE(app, argc, argv);

    try {
        if (sc_expand->parsed()) return cmd_expand(cfg, level);
        if (sc_solve->parsed()) return cmd_solve(cfg, level);
        if (sc_factor->parsed()) return cmd_factor(cfg, level);
        if (sc_match->parsed()) return cmd_match(cfg, level);
        if (sc_class->parsed()) return run_and_report(cfg, level, "class_field");
        if (sc_rad->parsed()) return run_and_report(cfg, level, "towers");
        if (sc_run->parsed()) return cmd_run(cfg, level);
        if (sc_all->parsed()) return cmd_verify_all(cfg);
        if (sc_report->parsed()) return cmd_report(cfg, level);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
