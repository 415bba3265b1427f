// Hauptmodul q-expansions: the genus-zero level registry, the exact
// Eisenstein-series construction at level 1, and ingest of level fixture
// documents (q-expansion, elliptic points, expected results).
#pragma once

#include <array>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "haupt/exact.hpp"

namespace haupt {

struct SchemaError : Error {
    using Error::Error;
};
struct NormalizationError : Error {
    using Error::Error;
};
struct LevelUnknown : Error {
    using Error::Error;
};

// The 44 levels whose Fricke-extended group has genus zero.
inline const std::vector<int>& genus_zero_levels() {
    static const std::vector<int> levels = {
        1,  2,  3,  5,  6,  7,  10, 11, 13, 14, 15, 17, 19, 21, 22,
        23, 26, 29, 30, 31, 33, 34, 35, 38, 39, 41, 42, 46, 47, 51,
        55, 59, 62, 66, 69, 70, 71, 78, 87, 94, 95, 105, 110, 119};
    return levels;
}

inline bool is_genus_zero_level(int n) {
    const auto& l = genus_zero_levels();
    return std::find(l.begin(), l.end(), n) != l.end();
}

// ---------------------------------------------------------------------------
// Level 1: j - 744 from Eisenstein series, exactly.

namespace detail {

inline BigInt sigma(int power, int n) {
    BigInt s = 0;
    for (int d = 1; d * d <= n; ++d) {
        if (n % d != 0) continue;
        BigInt a = d, b = n / d;
        BigInt ap = 1, bp = 1;
        for (int i = 0; i < power; ++i) ap *= a, bp *= b;
        s += ap;
        if (a != b) s += bp;
    }
    return s;
}

inline QSeries eisenstein(int power, const BigInt& scale, int trunc) {
    std::vector<BigRat> c(static_cast<std::size_t>(trunc));
    c[0] = 1;
    for (int n = 1; n < trunc; ++n) c[static_cast<std::size_t>(n)] = BigRat(scale * sigma(power, n));
    return QSeries(0, std::move(c), trunc);
}

// Reciprocal of a unit series (constant term 1) by Newton iteration:
// r <- r (2 - u r), doubling the number of correct terms each pass.
inline QSeries reciprocal_unit(const QSeries& u) {
    if (u.min_exponent() != 0 || u.at(0) != 1)
        throw NormalizationError("reciprocal requires a unit series with constant term 1");
    const int target = u.truncation_order();
    QSeries r = QSeries::constant(1, 1);
    for (int known = 1; known < target;) {
        known = std::min(2 * known, target);
        QSeries uk = u.truncate(known);
        QSeries two = QSeries::constant(2, known);
        // Pad r to the new truncation before refining.
        std::vector<BigRat> c(static_cast<std::size_t>(known));
        for (int e = 0; e < r.truncation_order(); ++e) c[static_cast<std::size_t>(e)] = r.at(e);
        QSeries rk(0, std::move(c), known);
        r = series_mul(rk, two - series_mul(uk, rk));
    }
    return r;
}

inline QSeries shift_exponents(const QSeries& s, int d) {
    std::vector<BigRat> c;
    c.reserve(static_cast<std::size_t>(s.truncation_order() - s.min_exponent()));
    for (int e = s.min_exponent(); e < s.truncation_order(); ++e) c.push_back(s.at(e));
    return QSeries(s.min_exponent() + d, std::move(c), s.truncation_order() + d);
}

}  // namespace detail

// q-expansion of the normalized level-1 Hauptmodul (j with constant term
// removed): exponents -1 .. truncation-1, leading coefficient 1, constant 0.
inline QSeries eisenstein_j_level1(int truncation) {
    if (truncation < 1) throw Error("truncation must be at least 1");
    const int t = truncation + 2;
    QSeries e4 = detail::eisenstein(3, 240, t);
    QSeries e6 = detail::eisenstein(5, -504, t);
    QSeries e4_3 = series_mul(series_mul(e4, e4), e4);
    QSeries disc = (e4_3 - series_mul(e6, e6)).scale(BigRat(1, 1728)).normalized();
    if (disc.min_exponent() != 1)
        throw NormalizationError("discriminant series must vanish to first order in q");
    // disc = q * unit; invert the unit part.
    QSeries unit = detail::shift_exponents(disc, -1);
    if (unit.at(0) != 1) throw NormalizationError("discriminant series is not monic in q");
    QSeries j = detail::shift_exponents(series_mul(e4_3, detail::reciprocal_unit(unit)), -1);
    j = j - QSeries::constant(744, j.truncation_order());
    return j.truncate(truncation);
}

// ---------------------------------------------------------------------------
// Level fixture documents.

struct EllipticPoint {
    BigRat re;        // real part of the fixed point
    long sqrt_arg;    // v in  im_scale * sqrt(v)
    BigRat im_scale;  // rational multiplier of sqrt(v)
    int order;        // stabilizer order
};

struct FixtureEquation {
    int q_power = 0;
    std::map<int, BigInt> a;  // nonzero P-coefficient columns
    std::map<int, BigInt> b;  // nonzero (Q/2)-coefficient columns
    BigInt constant;
};

struct FixturePoint {
    std::array<BigInt, 3> quadratic{};  // primitive (A, B, C), A > 0
    BigInt discriminant;
    long v = 0;
    std::string form;  // "4v" or "v"
    std::string kind;  // "row" or "integer_modulus"
    std::optional<std::array<long, 3>> gamma;
};

struct FixtureClassFieldRow {
    BigInt discriminant;
    long v = 0;
    std::string form;
    long printed_class_number = 0;
    long class_number = 0;  // class number of the discriminant itself
    bool v_prime = false;
    IntPoly poly;
    bool mixed_discriminants = false;
    bool printed_poly_deviates = false;
};

struct FixtureExtraGroup {
    long v = 0;
    std::vector<BigInt> pointwise_discriminants;
    int count = 0;
};

struct FixtureValue {
    std::string re, im;
};

struct FixtureValueIdent {
    int point = 0;
    std::string label;
    bool principal_label_match = false;
};

struct LevelExpected {
    int n = 0;
    IntPoly p, q, h;
    std::vector<IntPoly> factors;
    std::vector<FixtureValue> values;
    std::vector<FixturePoint> points;
    std::vector<FixtureClassFieldRow> class_field;
    std::vector<FixtureExtraGroup> extra_groups;
    std::vector<FixtureEquation> equations;        // present only where printed
    std::vector<FixtureValueIdent> value_idents;   // present only where printed
};

struct LevelData {
    int level = 0;
    std::optional<QSeries> q_expansion;
    std::vector<EllipticPoint> elliptic_points;
    LevelExpected expected;
};

namespace detail {

using Json = nlohmann::json;

inline const Json& field(const Json& j, const std::string& key, const std::string& where) {
    auto it = j.find(key);
    if (it == j.end()) throw SchemaError("missing field '" + key + "' in " + where);
    return *it;
}

inline IntPoly parse_intpoly(const Json& arr, const std::string& where) {
    if (!arr.is_array()) throw SchemaError(where + " must be an array of decimal strings");
    IntPoly p;
    for (const auto& x : arr) {
        if (!x.is_string()) throw SchemaError(where + " entries must be decimal strings");
        p.push_back(parse_bigint(x.get<std::string>()));
    }
    return p;
}

inline std::map<int, BigInt> parse_coeff_map(const Json& obj) {
    std::map<int, BigInt> m;
    for (auto it = obj.begin(); it != obj.end(); ++it)
        m[std::stoi(it.key())] = BigInt(it.value().get<long long>());
    return m;
}

}  // namespace detail

inline LevelData ingest_level(const nlohmann::json& doc) {
    using detail::field;
    if (!doc.is_object()) throw SchemaError("level document must be a JSON object");
    LevelData out;
    out.level = field(doc, "N", "level document").get<int>();
    if (!is_genus_zero_level(out.level))
        throw LevelUnknown("level " + std::to_string(out.level) +
                           " is not one of the 44 genus-zero levels");

    if (doc.contains("q_expansion")) {
        const auto& qe = doc["q_expansion"];
        int min_exp = field(qe, "min_exponent", "q_expansion").get<int>();
        if (min_exp != -1)
            throw NormalizationError("q-expansion must start at q^-1");
        const auto& coeffs = field(qe, "coefficients", "q_expansion");
        std::vector<BigRat> c;
        for (const auto& x : coeffs) {
            if (!x.is_string()) throw SchemaError("q-expansion coefficients must be strings");
            c.emplace_back(parse_bigint(x.get<std::string>()));
        }
        if (c.size() < 2) throw SchemaError("q-expansion needs at least two coefficients");
        QSeries j(-1, std::move(c), static_cast<int>(coeffs.size()) - 1);
        if (j.at(-1) != 1)
            throw NormalizationError("leading coefficient of q^-1 must be 1");
        if (j.at(0) != 0)
            throw NormalizationError("constant term must be 0");
        out.q_expansion = std::move(j);
    }

    for (const auto& p : field(doc, "elliptic_points", "level document")) {
        EllipticPoint e;
        e.re = parse_bigrat(field(p, "re", "elliptic point").get<std::string>());
        e.sqrt_arg = field(p, "sqrt_arg", "elliptic point").get<long>();
        e.im_scale = parse_bigrat(field(p, "im_scale", "elliptic point").get<std::string>());
        e.order = field(p, "order", "elliptic point").get<int>();
        if (e.sqrt_arg < 1 || !(e.im_scale > 0) || e.order < 2)
            throw SchemaError("elliptic point outside the upper half plane or order < 2");
        out.elliptic_points.push_back(std::move(e));
    }
    if (out.elliptic_points.empty()) throw SchemaError("no elliptic points listed");

    const auto& ex = field(doc, "expected", "level document");
    auto& e = out.expected;
    e.n = detail::field(ex, "n", "expected").get<int>();
    e.p = detail::parse_intpoly(field(ex, "P", "expected"), "expected.P");
    e.q = detail::parse_intpoly(field(ex, "Q", "expected"), "expected.Q");
    e.h = detail::parse_intpoly(field(ex, "h", "expected"), "expected.h");
    for (const auto& f : field(ex, "factors", "expected"))
        e.factors.push_back(detail::parse_intpoly(f, "expected.factors[]"));
    for (const auto& v : field(ex, "values", "expected"))
        e.values.push_back({field(v, "re", "value").get<std::string>(),
                            field(v, "im", "value").get<std::string>()});
    for (const auto& p : field(ex, "points", "expected")) {
        FixturePoint fp;
        const auto& quad = field(p, "quadratic", "expected point");
        if (!quad.is_array() || quad.size() != 3) throw SchemaError("quadratic must be a triple");
        for (int i = 0; i < 3; ++i) fp.quadratic[static_cast<std::size_t>(i)] = BigInt(quad[i].get<long long>());
        fp.discriminant = BigInt(field(p, "D", "expected point").get<long long>());
        fp.v = field(p, "v", "expected point").get<long>();
        fp.form = field(p, "form", "expected point").get<std::string>();
        fp.kind = field(p, "kind", "expected point").get<std::string>();
        const auto& g = field(p, "gamma", "expected point");
        if (!g.is_null()) {
            if (!g.is_array() || g.size() != 3) throw SchemaError("gamma must be a triple");
            fp.gamma = std::array<long, 3>{g[0].get<long>(), g[1].get<long>(), g[2].get<long>()};
        }
        e.points.push_back(std::move(fp));
    }
    for (const auto& r : field(ex, "class_field", "expected")) {
        FixtureClassFieldRow row;
        row.discriminant = BigInt(field(r, "D", "class-field row").get<long long>());
        row.v = field(r, "v", "class-field row").get<long>();
        row.form = field(r, "form", "class-field row").get<std::string>();
        row.printed_class_number = field(r, "printed_class_number", "class-field row").get<long>();
        row.class_number = field(r, "class_number", "class-field row").get<long>();
        row.v_prime = field(r, "v_prime", "class-field row").get<bool>();
        row.poly = detail::parse_intpoly(field(r, "poly", "class-field row"), "row.poly");
        row.mixed_discriminants = field(r, "mixed_discriminants", "class-field row").get<bool>();
        row.printed_poly_deviates = field(r, "printed_poly_deviates", "class-field row").get<bool>();
        e.class_field.push_back(std::move(row));
    }
    for (const auto& g : field(ex, "extra_groups", "expected")) {
        FixtureExtraGroup eg;
        eg.v = field(g, "v", "extra group").get<long>();
        for (const auto& d : field(g, "pointwise_D", "extra group"))
            eg.pointwise_discriminants.emplace_back(d.get<long long>());
        eg.count = field(g, "count", "extra group").get<int>();
        e.extra_groups.push_back(std::move(eg));
    }
    if (ex.contains("equations")) {
        for (const auto& q : ex["equations"]) {
            FixtureEquation fe;
            fe.q_power = field(q, "q_power", "equation").get<int>();
            fe.a = detail::parse_coeff_map(field(q, "A", "equation"));
            fe.b = detail::parse_coeff_map(field(q, "B", "equation"));
            fe.constant = parse_bigint(field(q, "constant", "equation").get<std::string>());
            e.equations.push_back(std::move(fe));
        }
    }
    if (ex.contains("value_identifications")) {
        for (const auto& vi : ex["value_identifications"]) {
            FixtureValueIdent id;
            id.point = field(vi, "point", "value identification").get<int>();
            id.label = field(vi, "label", "value identification").get<std::string>();
            id.principal_label_match =
                field(vi, "principal_label_match", "value identification").get<bool>();
            e.value_idents.push_back(std::move(id));
        }
    }

    if (e.values.size() != out.elliptic_points.size() ||
        e.points.size() != out.elliptic_points.size())
        throw SchemaError("expected values/points must align with elliptic_points");
    return out;
}

inline LevelData load_level_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open level fixture: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const std::exception& ex) {
        throw SchemaError("invalid JSON in " + path + ": " + ex.what());
    }
    return ingest_level(doc);
}

}  // namespace haupt
