// Nested radical towers over a cyclotomic field: ingest of tower documents,
// evaluation of any branch choice (principal logarithms shifted by the chosen
// 2*pi*i multiples), and numerical verification that every branch lands on a
// root of the stated integer polynomial.
#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "haupt/exact.hpp"
#include "haupt/hauptmodul.hpp"
#include "haupt/mp.hpp"

namespace haupt {

// coeff * zeta^zeta_pow * prod_i omega_i^omega_exponents[i], with zeta the
// primitive root of unity of the tower's cyclotomic order and omega_i the
// radical chosen at tower level i.
struct CycloTerm {
    BigRat coeff;
    int zeta_pow = 0;
    std::vector<int> omega_exponents;
};

struct CycloExpr {
    std::vector<CycloTerm> terms;
};

struct TowerLevel {
    int k = 0;            // radical index: omega = radicand^(1/k)
    CycloExpr radicand;   // may reference omegas from earlier levels only
};

struct BranchTableEntry {
    std::vector<int> branches;
    std::string re, im;
    bool principal_label_match = false;
};

struct TowerExpected {
    int branches = 0;
    int distinct = 0;
    int uniform_multiplicity = 0;  // common value-multiplicity across branches
    std::vector<BranchTableEntry> branch_table;
};

struct RadicalTower {
    int level = 0;            // the arithmetic level this tower belongs to
    int index = 0;            // position within that level's tower list
    int zeta_order = 1;       // cyclotomic order of zeta
    std::vector<TowerLevel> levels;
    BigRat constant;          // added to the evaluated expression
    CycloExpr value;
    IntPoly target;           // every branch value is a root of this
    TowerExpected expected;
};

namespace detail {

inline CycloExpr parse_cyclo_terms(const nlohmann::json& arr, std::size_t omega_width,
                                   const std::string& where) {
    CycloExpr out;
    for (const auto& t : arr) {
        if (!t.is_array() || t.size() != 3)
            throw SchemaError(where + " terms must be [coeff, zeta_pow, exps] triples");
        CycloTerm term;
        term.coeff = parse_bigrat(t[0].get<std::string>());
        term.zeta_pow = t[1].get<int>();
        for (const auto& e : t[2]) term.omega_exponents.push_back(e.get<int>());
        if (term.omega_exponents.size() > omega_width)
            throw SchemaError(where + " references radicals beyond its level");
        term.omega_exponents.resize(omega_width, 0);
        out.terms.push_back(std::move(term));
    }
    return out;
}

}  // namespace detail

inline RadicalTower ingest_tower(const nlohmann::json& doc) {
    using detail::field;
    if (!doc.is_object()) throw SchemaError("tower document must be a JSON object");
    RadicalTower t;
    t.level = field(doc, "N", "tower document").get<int>();
    if (!is_genus_zero_level(t.level))
        throw LevelUnknown("tower level " + std::to_string(t.level) + " unknown");
    t.index = field(doc, "index", "tower document").get<int>();
    t.zeta_order = field(doc, "n", "tower document").get<int>();
    if (t.zeta_order < 1) throw SchemaError("cyclotomic order must be positive");

    const auto& levels = field(doc, "levels", "tower document");
    std::size_t depth = 0;
    for (const auto& lv : levels) {
        TowerLevel tl;
        tl.k = field(lv, "k", "tower level").get<int>();
        if (tl.k < 2) throw SchemaError("radical index must be at least 2");
        tl.radicand = detail::parse_cyclo_terms(field(lv, "radicand", "tower level"), depth,
                                                "radicand");
        t.levels.push_back(std::move(tl));
        ++depth;
    }
    if (t.levels.empty()) throw SchemaError("tower needs at least one level");

    t.constant = parse_bigrat(field(doc, "constant", "tower document").get<std::string>());
    t.value = detail::parse_cyclo_terms(field(field(doc, "value", "tower document"), "terms",
                                              "tower value"),
                                        depth, "value");
    t.target = detail::parse_intpoly(field(doc, "target", "tower document"), "target");
    if (poly_degree(t.target) < 1) throw SchemaError("target polynomial must be nonconstant");

    const auto& ex = field(doc, "expected", "tower document");
    t.expected.branches = field(ex, "branches", "tower expected").get<int>();
    t.expected.distinct = field(ex, "distinct", "tower expected").get<int>();
    t.expected.uniform_multiplicity =
        field(ex, "uniform_multiplicity", "tower expected").get<int>();
    if (ex.contains("branch_table")) {
        for (const auto& row : ex["branch_table"]) {
            BranchTableEntry e;
            for (const auto& b : field(row, "branches", "branch table row"))
                e.branches.push_back(b.get<int>());
            e.re = field(row, "re", "branch table row").get<std::string>();
            e.im = field(row, "im", "branch table row").get<std::string>();
            e.principal_label_match =
                field(row, "principal_label_match", "branch table row").get<bool>();
            t.expected.branch_table.push_back(std::move(e));
        }
    }
    return t;
}

inline RadicalTower load_tower_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open tower fixture: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const std::exception& ex) {
        throw SchemaError("invalid JSON in " + path + ": " + ex.what());
    }
    return ingest_tower(doc);
}

namespace detail {

inline MpComplex eval_cyclo(const CycloExpr& expr, const MpComplex& zeta,
                            const std::vector<MpComplex>& omegas, mpfr_prec_t w) {
    MpComplex acc(w);
    for (const auto& term : expr.terms) {
        MpComplex t{MpReal(term.coeff, w), MpReal(0L, w)};
        for (int i = 0; i < term.zeta_pow; ++i) t = t * zeta;
        for (std::size_t j = 0; j < term.omega_exponents.size(); ++j)
            for (int i = 0; i < term.omega_exponents[j]; ++i) t = t * omegas[j];
        acc += t;
    }
    return acc;
}

}  // namespace detail

// Evaluates one branch: at level i the radical is
//   omega_i = exp((log r_i + 2 pi i branches[i]) / k_i)
// with the principal logarithm.  branches[i] must lie in [0, k_i).
inline MpComplex evaluate_tower_branch(const RadicalTower& t, const std::vector<int>& branches,
                                       mpfr_prec_t bits) {
    if (branches.size() != t.levels.size())
        throw Error("need one branch choice per tower level");
    const mpfr_prec_t w = bits + 64;
    const MpReal two_pi = MpReal(2L, w) * MpReal::pi(w);
    const MpReal theta = two_pi / MpReal(t.zeta_order, w);
    const MpComplex zeta{cos(theta), sin(theta)};

    std::vector<MpComplex> omegas;
    for (std::size_t i = 0; i < t.levels.size(); ++i) {
        const auto& lv = t.levels[i];
        if (branches[i] < 0 || branches[i] >= lv.k)
            throw Error("branch index out of range at level " + std::to_string(i));
        MpComplex r = detail::eval_cyclo(lv.radicand, zeta, omegas, w);
        MpComplex lg = log(r);
        MpComplex shifted{lg.real(), lg.imag() + two_pi * MpReal(branches[i], w)};
        MpReal k(static_cast<long>(lv.k), w);
        omegas.push_back(exp(MpComplex{shifted.real() / k, shifted.imag() / k}));
    }
    MpComplex val = detail::eval_cyclo(t.value, zeta, omegas, w);
    return val + MpComplex{MpReal(t.constant, w), MpReal(0L, w)};
}

struct TowerReport {
    std::vector<std::vector<int>> branch_choices;
    std::vector<MpComplex> branch_values;
    MpReal worst_residual;        // max |target(value)| over branches
    int distinct_values = 0;      // clusters at the given separation
    int uniform_multiplicity = 0; // common cluster size, 0 when not uniform
    bool covered_all_roots = false;
    std::vector<int> root_hits;   // branches landing on each target root
    mpfr_prec_t precision_bits = 0;
};

// Evaluates every branch combination, checks each against the target
// polynomial, and reports the value histogram and root coverage.
inline TowerReport verify_tower(const RadicalTower& t, mpfr_prec_t bits,
                                double cluster_separation = 1e-10) {
    const mpfr_prec_t w = bits + 64;
    TowerReport rep;
    rep.precision_bits = bits;
    rep.worst_residual = MpReal(0L, w);

    long total = 1;
    for (const auto& lv : t.levels) total *= lv.k;
    std::vector<int> choice(t.levels.size(), 0);
    for (long b = 0; b < total; ++b) {
        long rem = b;
        for (std::size_t i = t.levels.size(); i-- > 0;) {
            choice[i] = static_cast<int>(rem % t.levels[i].k);
            rem /= t.levels[i].k;
        }
        MpComplex val = evaluate_tower_branch(t, choice, bits);
        rep.worst_residual = max(rep.worst_residual, abs(mp_poly_eval(t.target, val, w)));
        rep.branch_choices.push_back(choice);
        rep.branch_values.push_back(val);
    }

    const MpReal sep(cluster_separation, w);
    std::vector<std::pair<MpComplex, int>> clusters;
    for (const auto& v : rep.branch_values) {
        bool placed = false;
        for (auto& [center, count] : clusters)
            if (abs(v - center) < sep) {
                ++count;
                placed = true;
                break;
            }
        if (!placed) clusters.emplace_back(v, 1);
    }
    rep.distinct_values = static_cast<int>(clusters.size());
    rep.uniform_multiplicity = clusters.empty() ? 0 : clusters.front().second;
    for (const auto& [center, count] : clusters)
        if (count != rep.uniform_multiplicity) rep.uniform_multiplicity = 0;

    const RootSet target_roots = roots_of_intpoly(t.target, bits);
    rep.root_hits.assign(target_roots.roots.size(), 0);
    for (const auto& v : rep.branch_values) {
        int best = -1;
        MpReal best_d(0L, w);
        for (std::size_t r = 0; r < target_roots.roots.size(); ++r) {
            MpReal d = abs(v - target_roots.roots[r]);
            if (best < 0 || d < best_d) best = static_cast<int>(r), best_d = d;
        }
        if (best >= 0 && best_d < sep) ++rep.root_hits[static_cast<std::size_t>(best)];
    }
    rep.covered_all_roots = true;
    for (int hits : rep.root_hits)
        if (hits == 0) rep.covered_all_roots = false;
    return rep;
}

}  // namespace haupt
