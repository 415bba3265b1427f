// Exact arithmetic foundation: arbitrary-precision integers and rationals,
// dense univariate polynomials, truncated Laurent q-series, and fraction-free
// linear solving.
#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/gmp.hpp>

namespace haupt {

using BigInt = boost::multiprecision::mpz_int;
using BigRat = boost::multiprecision::mpq_rational;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SingularSystem : Error {
    using Error::Error;
};
struct NotAPerfectSquare : Error {
    using Error::Error;
};
struct TruncationError : Error {
    using Error::Error;
};

// ---------------------------------------------------------------------------
// Polynomials, dense, ascending degree.  No trailing zeros; zero poly is {}.

using IntPoly = std::vector<BigInt>;
using RatPoly = std::vector<BigRat>;

inline void poly_trim(IntPoly& p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
}
inline void poly_trim(RatPoly& p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
}

inline int poly_degree(const IntPoly& p) { return static_cast<int>(p.size()) - 1; }

inline bool poly_is_monic(const IntPoly& p) { return !p.empty() && p.back() == 1; }

inline IntPoly poly_mul(const IntPoly& a, const IntPoly& b) {
    if (a.empty() || b.empty()) return {};
    IntPoly out(a.size() + b.size() - 1);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
}

inline IntPoly poly_derivative(const IntPoly& p) {
    IntPoly out;
    for (std::size_t i = 1; i < p.size(); ++i) out.push_back(p[i] * static_cast<long>(i));
    return out;
}

template <typename T>
inline T poly_eval(const std::vector<T>& p, const T& x) {
    T acc{};
    for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * x + *it;
    return acc;
}

inline std::string poly_to_string(const IntPoly& p, const std::string& var = "y") {
    if (p.empty()) return "0";
    std::string s;
    for (int i = poly_degree(p); i >= 0; --i) {
        const BigInt& c = p[i];
        if (c == 0) continue;
        if (!s.empty()) s += c > 0 ? " + " : " - ";
        else if (c < 0) s += "-";
        BigInt a = abs(c);
        if (a != 1 || i == 0) s += a.str();
        if (i > 0) s += var;
        if (i > 1) s += "^" + std::to_string(i);
    }
    return s;
}

// ---------------------------------------------------------------------------
// Truncated Laurent series: coefficients for exponents [min_exponent,
// truncation_order); everything at or past truncation_order is unknown.

class QSeries {
  public:
    QSeries() = default;
    QSeries(int min_exponent, std::vector<BigRat> coefficients, int truncation_order)
        : min_(min_exponent), trunc_(truncation_order), c_(std::move(coefficients)) {
        if (c_.size() != static_cast<std::size_t>(trunc_ - min_))
            throw TruncationError("coefficient count does not match exponent range");
    }

    static QSeries monomial(const BigRat& coeff, int exponent, int truncation_order) {
        std::vector<BigRat> c(static_cast<std::size_t>(truncation_order - exponent));
        c.at(0) = coeff;
        return QSeries(exponent, std::move(c), truncation_order);
    }
    static QSeries constant(const BigRat& value, int truncation_order) {
        return monomial(value, 0, truncation_order);
    }

    int min_exponent() const { return min_; }
    int truncation_order() const { return trunc_; }

    // Coefficient of q^e; exact zero below min_exponent, error at/after
    // truncation (the value there is unknown, not zero).
    const BigRat& at(int e) const {
        static const BigRat zero{0};
        if (e >= trunc_)
            throw TruncationError("coefficient q^" + std::to_string(e) +
                                  " requested beyond truncation O(q^" +
                                  std::to_string(trunc_) + ")");
        if (e < min_) return zero;
        return c_[static_cast<std::size_t>(e - min_)];
    }

    QSeries truncate(int new_order) const {
        if (new_order > trunc_) throw TruncationError("cannot extend a series by truncating");
        std::vector<BigRat> c(c_.begin(), c_.begin() + (new_order - min_));
        return QSeries(min_, std::move(c), new_order);
    }

    // Advances min_exponent past stored zero coefficients.
    QSeries normalized() const {
        std::size_t lead = 0;
        while (lead < c_.size() && c_[lead] == 0) ++lead;
        std::vector<BigRat> c(c_.begin() + static_cast<std::ptrdiff_t>(lead), c_.end());
        return QSeries(min_ + static_cast<int>(lead), std::move(c), trunc_);
    }

    QSeries scale(const BigRat& k) const {
        std::vector<BigRat> c(c_);
        for (auto& x : c) x *= k;
        return QSeries(min_, std::move(c), trunc_);
    }

    // Applies f to every (exponent, coefficient) pair; used for q d/dq.
    template <typename F>
    QSeries map_coefficients(F&& f) const {
        std::vector<BigRat> c(c_.size());
        for (std::size_t i = 0; i < c_.size(); ++i) c[i] = f(min_ + static_cast<int>(i), c_[i]);
        return QSeries(min_, std::move(c), trunc_);
    }

    friend QSeries operator+(const QSeries& a, const QSeries& b) {
        int min = std::min(a.min_, b.min_);
        int trunc = std::min(a.trunc_, b.trunc_);
        if (trunc <= min) throw TruncationError("empty overlap in series addition");
        std::vector<BigRat> c(static_cast<std::size_t>(trunc - min));
        for (int e = min; e < trunc; ++e)
            c[static_cast<std::size_t>(e - min)] = a.at(e) + b.at(e);
        return QSeries(min, std::move(c), trunc);
    }

    friend QSeries operator-(const QSeries& a, const QSeries& b) { return a + b.scale(-1); }

  private:
    int min_ = 0;
    int trunc_ = 0;
    std::vector<BigRat> c_;
};

// Exact convolution; the result is sound through the tightest truncation that
// either operand's unknown tail can reach.
inline QSeries series_mul(const QSeries& a, const QSeries& b) {
    int min = a.min_exponent() + b.min_exponent();
    int trunc = std::min(a.min_exponent() + b.truncation_order(),
                         b.min_exponent() + a.truncation_order());
    if (trunc <= min) throw TruncationError("empty overlap in series product");
    std::vector<BigRat> c(static_cast<std::size_t>(trunc - min));
    for (int ea = a.min_exponent(); ea < a.truncation_order(); ++ea) {
        const BigRat& ca = a.at(ea);
        if (ca == 0) continue;
        int eb_hi = std::min(b.truncation_order(), trunc - ea);
        for (int eb = b.min_exponent(); eb < eb_hi; ++eb) {
            const BigRat& cb = b.at(eb);
            if (cb != 0) c[static_cast<std::size_t>(ea + eb - min)] += ca * cb;
        }
    }
    return QSeries(min, std::move(c), trunc);
}

// p(j) with exact polynomial coefficients; for a Hauptmodul series (min
// exponent -1) the result has min exponent -deg(p).  Powers of j are built
// by repeated multiplication so the result keeps the widest window the
// truncation of j can justify; the exact scalar coefficients cost nothing.
inline QSeries poly_of_series(const RatPoly& p, const QSeries& j) {
    if (p.empty()) throw Error("poly_of_series requires a nonzero polynomial");
    const int slack = static_cast<int>(p.size()) * (std::abs(j.min_exponent()) + 1);
    QSeries acc = QSeries::constant(p[0], j.truncation_order() + slack);
    QSeries power = QSeries::constant(BigRat(1), j.truncation_order() + slack);
    for (std::size_t k = 1; k < p.size(); ++k) {
        power = series_mul(power, j);
        if (p[k] != 0) acc = acc + power.scale(p[k]);
    }
    return acc;
}

inline QSeries poly_of_series(const IntPoly& p, const QSeries& j) {
    RatPoly r(p.begin(), p.end());
    return poly_of_series(r, j);
}

// ---------------------------------------------------------------------------
// Exact linear solve, fraction-free (Bareiss) with full pivoting.

inline std::vector<BigRat> solve_rational_system(std::vector<std::vector<BigRat>> m,
                                                 std::vector<BigRat> rhs) {
    const std::size_t n = m.size();
    if (rhs.size() != n) throw Error("dimension mismatch in linear system");
    for (const auto& row : m)
        if (row.size() != n) throw Error("linear system matrix is not square");
    if (n == 0) return {};

    // Clear denominators row by row to an integer augmented matrix.
    std::vector<std::vector<BigInt>> a(n, std::vector<BigInt>(n + 1));
    for (std::size_t i = 0; i < n; ++i) {
        BigInt l = 1;
        for (std::size_t j = 0; j < n; ++j) l = lcm(l, denominator(m[i][j]));
        l = lcm(l, denominator(rhs[i]));
        for (std::size_t j = 0; j < n; ++j)
            a[i][j] = numerator(m[i][j]) * (l / denominator(m[i][j]));
        a[i][n] = numerator(rhs[i]) * (l / denominator(rhs[i]));
    }

    std::vector<std::size_t> col(n);
    for (std::size_t j = 0; j < n; ++j) col[j] = j;

    BigInt prev = 1;
    for (std::size_t k = 0; k < n; ++k) {
        // Full pivot: the candidate with the largest bitlength keeps the
        // fraction-free divisions from shrinking against large entries.
        std::size_t pr = n, pc = n;
        std::size_t best_bits = 0;
        for (std::size_t i = k; i < n; ++i)
            for (std::size_t j = k; j < n; ++j) {
                if (a[i][j] == 0) continue;
                std::size_t bits = msb(abs(a[i][j])) + 1;
                if (pr == n || bits > best_bits) {
                    pr = i, pc = j, best_bits = bits;
                }
            }
        if (pr == n) throw SingularSystem("rank deficiency at elimination step " +
                                          std::to_string(k));
        std::swap(a[k], a[pr]);
        if (pc != k) {
            for (std::size_t i = 0; i < n; ++i) std::swap(a[i][k], a[i][pc]);
            std::swap(col[k], col[pc]);
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            for (std::size_t j = k + 1; j <= n; ++j) {
                BigInt t = a[i][j] * a[k][k] - a[i][k] * a[k][j];
                a[i][j] = t / prev;  // exact by the Bareiss identity
            }
            a[i][k] = 0;
        }
        prev = a[k][k];
    }

    std::vector<BigRat> x(n);
    for (std::size_t k = n; k-- > 0;) {
        BigRat acc(a[k][n]);
        for (std::size_t j = k + 1; j < n; ++j) acc -= BigRat(a[k][j]) * x[col[j]];
        if (a[k][k] == 0) throw SingularSystem("zero pivot in back substitution");
        x[col[k]] = acc / BigRat(a[k][k]);
    }
    return x;
}

// ---------------------------------------------------------------------------
// Monic square root of Q/2: returns h with 2h^2 == Q exactly.

inline IntPoly poly_sqrt_half(const IntPoly& q) {
    if (q.empty() || q.back() != 2 || poly_degree(q) % 2 != 0)
        throw NotAPerfectSquare("input must have even degree and leading coefficient 2");
    const int m = poly_degree(q) / 2;
    RatPoly h(static_cast<std::size_t>(m) + 1);
    h[static_cast<std::size_t>(m)] = 1;
    for (int i = m - 1; i >= 0; --i) {
        // Coefficient of y^(m+i) in h^2 is 2*h[i] plus known cross terms.
        BigRat cross{0};
        for (int s = i + 1; s < m; ++s) {
            int t = m + i - s;
            if (t > i && t < m) cross += h[static_cast<std::size_t>(s)] * h[static_cast<std::size_t>(t)];
        }
        BigRat want = BigRat(q[static_cast<std::size_t>(m + i)]) / 2;
        BigRat hi = (want - cross) / 2;
        if (denominator(hi) != 1)
            throw NotAPerfectSquare("non-integer coefficient at degree " + std::to_string(i));
        h[static_cast<std::size_t>(i)] = hi;
    }
    IntPoly out(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) out[i] = numerator(h[i]);
    IntPoly check = poly_mul(out, out);
    for (auto& c : check) c *= 2;
    if (check != q) throw NotAPerfectSquare("verification 2h^2 == Q failed");
    return out;
}

// ---------------------------------------------------------------------------
// Integer polynomial gcd (primitive Euclidean), used for squarefreeness.

inline BigInt poly_content(const IntPoly& p) {
    BigInt g = 0;
    for (const auto& c : p) g = gcd(g, c);
    return g;
}

inline IntPoly poly_primitive_part(IntPoly p) {
    BigInt g = poly_content(p);
    if (g > 1)
        for (auto& c : p) c /= g;
    return p;
}

// Pseudo-remainder of a by b (b nonzero).
inline IntPoly poly_pseudo_rem(IntPoly a, const IntPoly& b) {
    const int db = poly_degree(b);
    while (poly_degree(a) >= db && !a.empty()) {
        const int da = poly_degree(a);
        BigInt lead_a = a.back();
        for (auto& c : a) c *= b.back();
        for (int i = 0; i <= db; ++i)
            a[static_cast<std::size_t>(da - db + i)] -= lead_a * b[static_cast<std::size_t>(i)];
        poly_trim(a);
        if (poly_degree(a) == da) throw Error("pseudo-division failed to reduce degree");
    }
    return a;
}

inline IntPoly poly_gcd(IntPoly a, IntPoly b) {
    poly_trim(a);
    poly_trim(b);
    if (a.empty()) return poly_primitive_part(std::move(b));
    if (b.empty()) return poly_primitive_part(std::move(a));
    a = poly_primitive_part(std::move(a));
    b = poly_primitive_part(std::move(b));
    while (!b.empty()) {
        IntPoly r = poly_primitive_part(poly_pseudo_rem(a, b));
        a = std::move(b);
        b = std::move(r);
    }
    if (!a.empty() && a.back() < 0)
        for (auto& c : a) c = -c;
    return a;
}

inline bool poly_is_squarefree(const IntPoly& p) {
    return poly_degree(poly_gcd(p, poly_derivative(p))) <= 0;
}

// ---------------------------------------------------------------------------
// Parsing helpers for exact decimal/rational strings.

inline BigInt parse_bigint(const std::string& s) {
    if (s.empty()) throw Error("empty integer literal");
    return BigInt(s);
}

inline BigRat parse_bigrat(const std::string& s) {
    auto slash = s.find('/');
    if (slash == std::string::npos) return BigRat(BigInt(s));
    return BigRat(BigInt(s.substr(0, slash)), BigInt(s.substr(slash + 1)));
}

inline std::string bigrat_to_string(const BigRat& r) {
    if (denominator(r) == 1) return numerator(r).str();
    return numerator(r).str() + "/" + denominator(r).str();
}

}  // namespace haupt
