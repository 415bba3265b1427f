// Elliptic fixed points: the integral quadratic a point satisfies, its
// discriminant class, numerical evaluation of the Hauptmodul there, matching
// of evaluated (or tabulated) values against polynomial roots, reduced-form
// class numbers, and assembly of the per-level class-field table.
#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "haupt/exact.hpp"
#include "haupt/factorizer.hpp"
#include "haupt/hauptmodul.hpp"
#include "haupt/mp.hpp"

namespace haupt {

struct BadDiscriminant : Error {
    using Error::Error;
};
struct DomainError : Error {
    using Error::Error;
};
struct AmbiguousMatch : Error {
    using Error::Error;
};
struct Unmatched : Error {
    using Error::Error;
};
struct FactorSplitAcrossDiscriminants : Error {
    using Error::Error;
};
struct CoverageGap : Error {
    using Error::Error;
};

enum class PointKind { Row, IntegerModulus };

struct PointClassification {
    std::array<BigInt, 3> quadratic{};  // primitive (A, B, C), A > 0
    BigInt discriminant;
    long v = 0;
    std::string form;  // "4v" when D = -4v, "v" when D = -v
    PointKind kind = PointKind::Row;
    std::optional<std::array<long, 3>> gamma;  // (a, b, c) normalizer data, rows only
};

// The fixed point of the degree-v normalizer element with data (a, b, c):
// the root of  c N x^2 - 2 a v x - b  in the upper half plane.
inline EllipticPoint fixed_point(long a, long b, long c, long v, int level) {
    if (c <= 0 || v <= 0 || level % v != 0) throw DomainError("invalid normalizer data");
    BigInt det = BigInt(a) * a * v * v + BigInt(b) * c * level;
    if (det != -v) throw DomainError("normalizer data has the wrong determinant");
    EllipticPoint e;
    e.re = BigRat(BigInt(a) * v, BigInt(c) * level);
    e.sqrt_arg = v;
    e.im_scale = BigRat(1, BigInt(c) * level);
    e.order = 2;
    return e;
}

inline PointClassification classify_point(const EllipticPoint& e, int level) {
    // Primitive integral (A, B, C) with A x^2 + B x + C = 0 satisfied by
    // re + i * im_scale * sqrt(sqrt_arg).
    BigRat pb = -2 * e.re;
    BigRat pc = e.re * e.re + e.im_scale * e.im_scale * e.sqrt_arg;
    BigInt l = lcm(denominator(pb), denominator(pc));
    BigInt a = l;
    BigInt b = numerator(pb) * (l / denominator(pb));
    BigInt c = numerator(pc) * (l / denominator(pc));
    BigInt g = gcd(gcd(a, b), c);
    a /= g, b /= g, c /= g;

    PointClassification out;
    out.quadratic = {a, b, c};
    out.discriminant = b * b - 4 * a * c;
    const BigInt& d = out.discriminant;
    if (d >= 0) throw BadDiscriminant("discriminant must be negative");

    if (e.order >= 3) {
        if (d != -3 && d != -4)
            throw BadDiscriminant("order >= 3 requires discriminant -3 or -4, got " + d.str());
        out.v = (d == -3) ? 3 : 1;
        out.form = (d == -3) ? "v" : "4v";
        out.kind = PointKind::IntegerModulus;
        return out;
    }
    if (d == -4) {
        // Fixed by the underlying congruence group itself, not only by the
        // extension; carries an integer modulus and joins no table row.
        out.v = 1;
        out.form = "4v";
        out.kind = PointKind::IntegerModulus;
        return out;
    }

    const long v = e.sqrt_arg;
    if (v <= 0 || level % v != 0)
        throw DomainError("order-2 point must have sqrt_arg dividing the level");
    out.v = v;
    out.kind = PointKind::Row;
    if (d == BigInt(-4) * v) {
        out.form = "4v";
        if (b % (2 * v) != 0 || a % level != 0)
            throw DomainError("normalizer data is not integral");
        out.gamma = std::array<long, 3>{static_cast<long>(BigInt(-b / (2 * v))),
                                        static_cast<long>(BigInt(-c)),
                                        static_cast<long>(BigInt(a / level))};
    } else if (d == BigInt(-1) * v) {
        out.form = "v";
        if (b % v != 0 || (2 * a) % level != 0)
            throw DomainError("normalizer data is not integral");
        out.gamma = std::array<long, 3>{static_cast<long>(BigInt(-b / v)),
                                        static_cast<long>(BigInt(-2 * c)),
                                        static_cast<long>(BigInt(2 * a / level))};
    } else {
        throw BadDiscriminant("order-2 discriminant " + d.str() + " is neither -4v nor -v");
    }
    const auto& gm = *out.gamma;
    if (BigInt(gm[0]) * gm[0] * v * v + BigInt(gm[1]) * gm[2] * level != -v)
        throw DomainError("normalizer determinant check failed");
    return out;
}

// ---------------------------------------------------------------------------
// Numerical evaluation of the q-expansion at a point.

struct JEvaluation {
    MpComplex value;
    MpReal error_bound;  // estimated truncation tail, geometric extrapolation
};

inline JEvaluation evaluate_j_at(const QSeries& j, const EllipticPoint& e, mpfr_prec_t bits) {
    const mpfr_prec_t w = bits;
    const MpReal two_pi = MpReal(2L, w) * MpReal::pi(w);
    const MpReal im = MpReal(e.im_scale, w) * sqrt(MpReal(e.sqrt_arg, w));
    if (!(im > MpReal(0L, w))) throw DomainError("point must lie in the upper half plane");
    const MpReal angle = two_pi * MpReal(e.re, w);
    const MpReal radius = exp(-(two_pi * im));
    const MpComplex q{radius * cos(angle), radius * sin(angle)};

    MpComplex one{MpReal(1L, w), MpReal(0L, w)};
    MpComplex acc = one / q;  // the q^-1 term, coefficient 1
    MpComplex pw = one;
    for (int k = 1; k < j.truncation_order(); ++k) {
        pw = pw * q;
        const BigRat& a = j.at(k);
        if (a != 0) acc += MpReal(a, w) * pw;
    }

    // Tail estimate: last stored term times a geometric series whose ratio
    // uses the worst recent coefficient growth.
    const int last = j.truncation_order() - 1;
    MpReal growth(0L, w);
    for (int k = std::max(1, last - 5); k < last; ++k) {
        if (j.at(k) == 0) continue;
        MpReal ratio = abs(MpReal(j.at(k + 1), w) / MpReal(j.at(k), w));
        growth = max(growth, ratio);
    }
    MpReal head = abs(MpReal(j.at(last), w)) * exp(MpReal(last, w) * log(radius));
    MpReal r = growth * radius;
    MpReal bound(0L, w);
    if (r < MpReal(1L, w)) {
        bound = head * r / (MpReal(1L, w) - r);
    } else {
        bound = MpReal::pow2(1 << 20, w);  // ratio >= 1: no convergent tail estimate
    }
    return {acc, bound};
}

// ---------------------------------------------------------------------------
// Greedy nearest matching with an ambiguity guard.

struct MatchTable {
    std::vector<int> value_to_root;  // index i -> root index
    std::vector<MpReal> distances;
    MpReal worst_distance;
};

inline MatchTable match_values_to_roots(const std::vector<MpComplex>& values,
                                        const std::vector<MpComplex>& roots,
                                        const MpReal& tolerance) {
    if (values.size() != roots.size())
        throw Unmatched("need exactly one value per root: " + std::to_string(values.size()) +
                        " values, " + std::to_string(roots.size()) + " roots");
    MatchTable out;
    out.worst_distance = MpReal(0L, tolerance.precision());
    std::vector<int> owner(roots.size(), -1);
    for (std::size_t i = 0; i < values.size(); ++i) {
        std::vector<MpReal> d;
        d.reserve(roots.size());
        for (const auto& r : roots) d.push_back(abs(values[i] - r));
        int best = 0, second = -1;
        for (int r = 1; r < static_cast<int>(roots.size()); ++r) {
            if (d[static_cast<std::size_t>(r)] < d[static_cast<std::size_t>(best)]) {
                second = best;
                best = r;
            } else if (second < 0 ||
                       d[static_cast<std::size_t>(r)] < d[static_cast<std::size_t>(second)]) {
                second = r;
            }
        }
        const MpReal& best_d = d[static_cast<std::size_t>(best)];
        if (!(best_d <= tolerance))
            throw Unmatched("value " + std::to_string(i) + " is " + best_d.to_string(6) +
                            " from its nearest root, tolerance " + tolerance.to_string(6));
        if (second >= 0 && !(d[static_cast<std::size_t>(second)] >=
                             MpReal(100L, best_d.precision()) * best_d))
            throw AmbiguousMatch("value " + std::to_string(i) +
                                 " has a second root within 100x of the nearest");
        if (owner[static_cast<std::size_t>(best)] >= 0)
            throw AmbiguousMatch("two values matched root " + std::to_string(best));
        owner[static_cast<std::size_t>(best)] = static_cast<int>(i);
        out.value_to_root.push_back(best);
        out.distances.push_back(best_d);
        out.worst_distance = max(out.worst_distance, best_d);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Class numbers by direct reduced-form counting.

inline long class_number_oracle(const BigInt& discriminant) {
    if (discriminant >= 0) throw DomainError("discriminant must be negative");
    BigInt mod = ((discriminant % 4) + 4) % 4;
    if (mod != 0 && mod != 1) throw DomainError("discriminant must be 0 or 1 mod 4");
    long count = 0;
    for (BigInt b = mod % 2; 3 * b * b <= -discriminant; b += 2) {
        BigInt m = (b * b - discriminant) / 4;
        for (BigInt a = (b > 1 ? b : BigInt(1)); a * a <= m; ++a) {
            if (m % a != 0) continue;
            BigInt c = m / a;
            if (gcd(gcd(a, b), c) != 1) continue;
            count += (b == 0 || a == b || a == c) ? 1 : 2;
        }
    }
    return count;
}

// ---------------------------------------------------------------------------
// Class-field table: one row per irreducible factor of h, holding the points
// matched to that factor's roots.

struct ClassFieldGroup {
    long v = 0;
    BigInt discriminant;  // -4v if any member has the 4v form, else -v
    std::string form;
    bool mixed_discriminants = false;
    std::vector<int> point_indices;
    std::vector<BigInt> pointwise_discriminants;
    IntPoly poly;
    long class_number = 0;  // class number of `discriminant`
};

struct ClassFieldTable {
    std::vector<ClassFieldGroup> groups;          // sorted by (v, discriminant)
    std::vector<int> integer_modulus_points;      // indices into the point list
};

inline ClassFieldTable build_class_field_table(const std::vector<PointClassification>& points,
                                               const Factorization& factorization,
                                               const std::vector<MpComplex>& roots,
                                               const MatchTable& match) {
    if (match.value_to_root.size() != points.size())
        throw CoverageGap("match table does not cover the point list");
    std::vector<int> root_to_point(roots.size(), -1);
    for (std::size_t i = 0; i < points.size(); ++i)
        root_to_point[static_cast<std::size_t>(match.value_to_root[i])] = static_cast<int>(i);

    // Ownership: recompute each factor's own roots at the factorization
    // precision and claim the nearest global root.  The two computations see
    // the same algebraic numbers, so claims sit at round-off distance while
    // distinct roots stay macroscopically separated.
    const mpfr_prec_t bits = factorization.bits_used > 0 ? factorization.bits_used : 192;
    const mpfr_prec_t w = bits + 64;
    const MpReal claim_tol = MpReal::pow2(-static_cast<long>(bits) / 4, w);
    struct Owned {
        const IntPoly* factor;
        std::vector<int> point_indices;
    };
    std::vector<Owned> owned;
    std::vector<bool> claimed(roots.size(), false);
    for (const auto& f : factorization.factors) {
        Owned o{&f, {}};
        for (const auto& sub : roots_of_intpoly(f, bits).roots) {
            int best = -1;
            MpReal best_d(0L, w);
            for (std::size_t r = 0; r < roots.size(); ++r) {
                MpReal d = abs(sub - roots[r]);
                if (best < 0 || d < best_d) best = static_cast<int>(r), best_d = d;
            }
            if (best < 0 || !(best_d < claim_tol) || claimed[static_cast<std::size_t>(best)])
                throw CoverageGap("factor root does not claim a unique global root");
            claimed[static_cast<std::size_t>(best)] = true;
            o.point_indices.push_back(root_to_point[static_cast<std::size_t>(best)]);
        }
        if (static_cast<int>(o.point_indices.size()) != poly_degree(f))
            throw CoverageGap("factor of degree " + std::to_string(poly_degree(f)) + " owns " +
                              std::to_string(o.point_indices.size()) + " roots");
        owned.push_back(std::move(o));
    }

    ClassFieldTable out;
    for (std::size_t i = 0; i < points.size(); ++i)
        if (points[i].kind == PointKind::IntegerModulus)
            out.integer_modulus_points.push_back(static_cast<int>(i));

    // Each irreducible factor of h is one table row: the points matched to
    // its roots.  Members always share v; a row whose members span both the
    // -4v and -v discriminants is labeled by the 4v form.
    for (const auto& o : owned) {
        bool any_row = false, any_integer = false;
        for (int pi : o.point_indices)
            (points[static_cast<std::size_t>(pi)].kind == PointKind::Row ? any_row : any_integer) =
                true;
        if (any_row && any_integer)
            throw FactorSplitAcrossDiscriminants(
                "a factor mixes row points with integer-modulus points");
        if (!any_row) continue;  // integer-modulus factors join no row

        ClassFieldGroup g;
        g.point_indices = o.point_indices;
        std::sort(g.point_indices.begin(), g.point_indices.end());
        bool any_4v = false, any_v = false;
        for (int pi : g.point_indices) {
            const auto& p = points[static_cast<std::size_t>(pi)];
            if (g.v == 0) g.v = p.v;
            if (p.v != g.v)
                throw FactorSplitAcrossDiscriminants("factor roots span two values of v");
            g.pointwise_discriminants.push_back(p.discriminant);
            (p.form == "4v" ? any_4v : any_v) = true;
        }
        g.mixed_discriminants = any_4v && any_v;
        g.discriminant = any_4v ? BigInt(-4) * g.v : BigInt(-1) * g.v;
        g.form = any_4v ? "4v" : "v";
        g.poly = *o.factor;
        if (poly_degree(g.poly) != static_cast<int>(g.point_indices.size()))
            throw CoverageGap("row polynomial degree does not match its point count");
        g.class_number = class_number_oracle(g.discriminant);
        out.groups.push_back(std::move(g));
    }
    std::sort(out.groups.begin(), out.groups.end(),
              [](const ClassFieldGroup& a, const ClassFieldGroup& b) {
                  if (a.v != b.v) return a.v < b.v;
                  if (a.discriminant != b.discriminant) return a.discriminant < b.discriminant;
                  return a.poly < b.poly;
              });
    return out;
}

// Printed class-number column convention: the class number of the row
// discriminant divided by 2^(omega(v) - 1), where omega counts distinct
// prime factors of v.  Equality with the plain class number holds exactly
// when v is prime.
inline long printed_class_number(const BigInt& discriminant, long v) {
    int omega = 0;
    long m = v;
    for (long p = 2; p * p <= m; ++p) {
        if (m % p == 0) {
            ++omega;
            while (m % p == 0) m /= p;
        }
    }
    if (m > 1) ++omega;
    long h = class_number_oracle(discriminant);
    long div = 1;
    for (int i = 1; i < omega; ++i) div *= 2;
    if (h % div != 0) throw DomainError("class number not divisible by 2^(omega-1)");
    return h / div;
}

}  // namespace haupt
