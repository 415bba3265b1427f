// Assembly and exact solution of the polynomial system coupling a Hauptmodul
// j to its Schwarzian-derivative combination: find P (monic, degree n) and Q
// (leading coefficient 2, degree n+2) with (Q/2)(j) * t + P(j) * f = 0, where
// t and f are differential expressions in j with leading terms -q^-2 and
// q^-4.
#pragma once

#include <map>
#include <vector>

#include "haupt/exact.hpp"

namespace haupt {

struct LeadingTermMismatch : Error {
    using Error::Error;
};
struct NonIntegerCoefficients : Error {
    using Error::Error;
};

// q d/dq, acting on exponents.
inline QSeries normalized_derivative(const QSeries& s) {
    return s.map_coefficients([](int e, const BigRat& c) { return c * e; });
}

// Closed form for the q^k coefficient of t/2 in terms of the expansion
// coefficients a(.) of j alone; used as an independent cross-check of the
// series route.
inline BigRat b_coefficient(const QSeries& j, int k) {
    if (k < 0) throw Error("b_coefficient requires k >= 0");
    BigRat m(k + 1);
    BigRat b = -m * (m * m + 3 * m + 1) * j.at(k + 1);
    BigRat s = 0;
    for (int l = 1; l <= k - 1; ++l)
        s += BigRat(l) * l * (k - l) * (5 * l - 3 * k) * j.at(l) * j.at(k - l);
    return b + s / 2;
}

struct SchwarzianIngredients {
    QSeries t;  // 2 (D^3 j * D j - (3/2) (D^2 j)^2), leading term -q^-2
    QSeries f;  // (D j)^4, leading term q^-4
};

inline SchwarzianIngredients schwarzian_ingredients(const QSeries& j) {
    QSeries d1 = normalized_derivative(j);
    QSeries d2 = normalized_derivative(d1);
    QSeries d3 = normalized_derivative(d2);
    QSeries t = (series_mul(d3, d1) - series_mul(d2, d2).scale(BigRat(3, 2))).scale(2);
    QSeries d1sq = series_mul(d1, d1);
    QSeries f = series_mul(d1sq, d1sq);
    if (t.min_exponent() != -2 || t.at(-2) != -1)
        throw LeadingTermMismatch("t must lead with -q^-2");
    if (f.min_exponent() != -4 || f.at(-4) != 1)
        throw LeadingTermMismatch("f must lead with q^-4");
    return {std::move(t), std::move(f)};
}

// One linear condition: the q^(q_power) coefficient of the residual.
// Maps hold only the nonzero columns; `a` indexes coefficients of P,
// `b` indexes coefficients of Q/2, and `constant` collects the contribution
// of the two pinned leading coefficients.
struct OdeEquation {
    int q_power = 0;
    std::map<int, BigInt> a;
    std::map<int, BigInt> b;
    BigInt constant;
};

struct OdeSystem {
    int n = 0;
    std::vector<OdeEquation> equations;  // q powers -(n+3) .. n-2, ascending
};

namespace detail {

inline BigInt require_integer(const BigRat& r, const char* what) {
    if (denominator(r) != 1)
        throw NonIntegerCoefficients(std::string(what) + " produced a non-integer");
    return numerator(r);
}

}  // namespace detail

// Rows are coefficient extractions of (Q/2)(j) t + P(j) f at the powers
// q^-(n+3) .. q^(n-2); the q^-(n+4) coefficient must vanish identically and
// is checked rather than used.
inline OdeSystem assemble_system(const QSeries& j, int n) {
    if (n < 2 || n % 2 != 0) throw Error("system order n must be a positive even integer");
    auto [t, f] = schwarzian_ingredients(j);

    std::vector<QSeries> jf{f}, jt{t};
    jf.reserve(static_cast<std::size_t>(n) + 1);
    jt.reserve(static_cast<std::size_t>(n) + 3);
    for (int k = 1; k <= n; ++k) jf.push_back(series_mul(jf.back(), j));
    for (int k = 1; k <= n + 2; ++k) jt.push_back(series_mul(jt.back(), j));

    const auto constant_at = [&](int m) {
        return jf[static_cast<std::size_t>(n)].at(m) + jt[static_cast<std::size_t>(n) + 2].at(m);
    };
    if (constant_at(-n - 4) != 0)
        throw LeadingTermMismatch("q^-(n+4) coefficient of the residual does not vanish");

    OdeSystem sys;
    sys.n = n;
    for (int m = -(n + 3); m <= n - 2; ++m) {
        OdeEquation eq;
        eq.q_power = m;
        for (int k = 0; k < n; ++k) {
            BigInt c = detail::require_integer(jf[static_cast<std::size_t>(k)].at(m), "A column");
            if (c != 0) eq.a[k] = std::move(c);
        }
        for (int k = 0; k < n + 2; ++k) {
            BigInt c = detail::require_integer(jt[static_cast<std::size_t>(k)].at(m), "B column");
            if (c != 0) eq.b[k] = std::move(c);
        }
        eq.constant = detail::require_integer(constant_at(m), "constant column");
        sys.equations.push_back(std::move(eq));
    }
    return sys;
}

struct OdePolynomials {
    IntPoly p;  // monic, degree n
    IntPoly q;  // leading coefficient 2, degree n+2
};

inline OdePolynomials solve_ode(const OdeSystem& sys) {
    const int n = sys.n;
    const std::size_t dim = 2 * static_cast<std::size_t>(n) + 2;
    if (sys.equations.size() != dim)
        throw Error("expected " + std::to_string(dim) + " equations, got " +
                    std::to_string(sys.equations.size()));

    // Unknown order: A_0..A_(n-1), then B_0..B_(n+1).
    std::vector<std::vector<BigRat>> m(dim, std::vector<BigRat>(dim));
    std::vector<BigRat> rhs(dim);
    for (std::size_t r = 0; r < dim; ++r) {
        const auto& eq = sys.equations[r];
        for (const auto& [k, c] : eq.a) m[r][static_cast<std::size_t>(k)] = BigRat(c);
        for (const auto& [k, c] : eq.b) m[r][static_cast<std::size_t>(n + k)] = BigRat(c);
        rhs[r] = BigRat(-eq.constant);
    }
    std::vector<BigRat> x = solve_rational_system(std::move(m), std::move(rhs));

    OdePolynomials out;
    out.p.resize(static_cast<std::size_t>(n) + 1);
    for (int k = 0; k < n; ++k)
        out.p[static_cast<std::size_t>(k)] =
            detail::require_integer(x[static_cast<std::size_t>(k)], "P coefficient");
    out.p[static_cast<std::size_t>(n)] = 1;
    out.q.resize(static_cast<std::size_t>(n) + 3);
    for (int k = 0; k < n + 2; ++k)
        out.q[static_cast<std::size_t>(k)] =
            2 * detail::require_integer(x[static_cast<std::size_t>(n + k)], "Q coefficient");
    out.q[static_cast<std::size_t>(n) + 2] = 2;
    return out;
}

// The defining combination re-expanded with the solved polynomials; all
// coefficients representable at the series' truncation must be zero.
inline QSeries ode_residual(const QSeries& j, const IntPoly& p, const IntPoly& q) {
    auto [t, f] = schwarzian_ingredients(j);
    QSeries lhs = series_mul(poly_of_series(q, j).scale(BigRat(1, 2)), t) +
                  series_mul(poly_of_series(p, j), f);
    return lhs;
}

inline bool ode_residual_is_zero(const QSeries& j, const IntPoly& p, const IntPoly& q) {
    QSeries r = ode_residual(j, p, q);
    for (int e = r.min_exponent(); e < r.truncation_order(); ++e)
        if (r.at(e) != 0) return false;
    return true;
}

}  // namespace haupt
