// Arbitrary-precision floating point (MPFR-backed) reals and complexes, and a
// certified root finder for integer polynomials (Aberth-Ehrlich iteration with
// deterministic initialization and residual certification).
#pragma once

#include <cstdarg>
#include <cstdio>

#include <mpfr.h>

#include <algorithm>
#include <concepts>
#include <string>
#include <utility>
#include <vector>

#include "haupt/exact.hpp"

namespace haupt {

struct NoConvergence : Error {
    using Error::Error;
};
struct PrecisionExhausted : Error {
    using Error::Error;
};

class MpReal {
  public:
    explicit MpReal(mpfr_prec_t prec = 128) {
        mpfr_init2(v_, prec);
        mpfr_set_zero(v_, 1);
    }
    template <std::integral T>
    MpReal(T x, mpfr_prec_t prec) {
        mpfr_init2(v_, prec);
        mpfr_set_si(v_, static_cast<long>(x), MPFR_RNDN);
    }
    MpReal(double x, mpfr_prec_t prec) {
        mpfr_init2(v_, prec);
        mpfr_set_d(v_, x, MPFR_RNDN);
    }
    MpReal(const BigInt& x, mpfr_prec_t prec) {
        mpfr_init2(v_, prec);
        mpfr_set_z(v_, x.backend().data(), MPFR_RNDN);
    }
    MpReal(const BigRat& x, mpfr_prec_t prec) {
        mpfr_init2(v_, prec);
        mpfr_set_q(v_, x.backend().data(), MPFR_RNDN);
    }
    MpReal(const MpReal& o) {
        mpfr_init2(v_, mpfr_get_prec(o.v_));
        mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    MpReal(MpReal&& o) noexcept {
        mpfr_init2(v_, mpfr_get_prec(o.v_));
        mpfr_swap(v_, o.v_);
    }
    MpReal& operator=(const MpReal& o) {
        if (this != &o) {
            mpfr_set_prec(v_, mpfr_get_prec(o.v_));
            mpfr_set(v_, o.v_, MPFR_RNDN);
        }
        return *this;
    }
    MpReal& operator=(MpReal&& o) noexcept {
        if (this != &o) mpfr_swap(v_, o.v_);
        return *this;
    }
    ~MpReal() { mpfr_clear(v_); }

    static MpReal from_string(const std::string& s, mpfr_prec_t prec) {
        MpReal r(prec);
        if (mpfr_set_str(r.v_, s.c_str(), 10, MPFR_RNDN) != 0)
            throw Error("invalid decimal literal: " + s);
        return r;
    }
    static MpReal pi(mpfr_prec_t prec) {
        MpReal r(prec);
        mpfr_const_pi(r.v_, MPFR_RNDN);
        return r;
    }
    // 2^e, exact; the standard shape for tolerances and certificates.
    static MpReal pow2(long e, mpfr_prec_t prec = 64) {
        MpReal r(prec);
        mpfr_set_ui_2exp(r.v_, 1, e, MPFR_RNDN);
        return r;
    }

    mpfr_prec_t precision() const { return mpfr_get_prec(v_); }
    bool is_zero() const { return mpfr_zero_p(v_) != 0; }
    int sign() const { return mpfr_sgn(v_); }
    double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }

    std::string to_string(int digits = 0) const {
        if (digits <= 0)
            digits = static_cast<int>(static_cast<double>(precision()) * 0.30103) + 2;
        char* buf = nullptr;
        mpfr_asprintf(&buf, "%.*Rg", digits, v_);
        std::string out(buf);
        mpfr_free_str(buf);
        return out;
    }

    BigInt to_nearest_bigint() const {
        MpReal r(precision());
        mpfr_rint(r.v_, v_, MPFR_RNDN);
        BigInt out;
        mpfr_get_z(out.backend().data(), r.v_, MPFR_RNDN);
        return out;
    }

    friend MpReal operator+(const MpReal& a, const MpReal& b) {
        MpReal r(std::max(a.precision(), b.precision()));
        mpfr_add(r.v_, a.v_, b.v_, MPFR_RNDN);
        return r;
    }
    friend MpReal operator-(const MpReal& a, const MpReal& b) {
        MpReal r(std::max(a.precision(), b.precision()));
        mpfr_sub(r.v_, a.v_, b.v_, MPFR_RNDN);
        return r;
    }
    friend MpReal operator*(const MpReal& a, const MpReal& b) {
        MpReal r(std::max(a.precision(), b.precision()));
        mpfr_mul(r.v_, a.v_, b.v_, MPFR_RNDN);
        return r;
    }
    friend MpReal operator/(const MpReal& a, const MpReal& b) {
        MpReal r(std::max(a.precision(), b.precision()));
        mpfr_div(r.v_, a.v_, b.v_, MPFR_RNDN);
        return r;
    }
    MpReal operator-() const {
        MpReal r(precision());
        mpfr_neg(r.v_, v_, MPFR_RNDN);
        return r;
    }
    MpReal& operator+=(const MpReal& o) { return *this = *this + o; }
    MpReal& operator-=(const MpReal& o) { return *this = *this - o; }
    MpReal& operator*=(const MpReal& o) { return *this = *this * o; }
    MpReal& operator/=(const MpReal& o) { return *this = *this / o; }

    friend bool operator<(const MpReal& a, const MpReal& b) { return mpfr_cmp(a.v_, b.v_) < 0; }
    friend bool operator>(const MpReal& a, const MpReal& b) { return mpfr_cmp(a.v_, b.v_) > 0; }
    friend bool operator<=(const MpReal& a, const MpReal& b) { return mpfr_cmp(a.v_, b.v_) <= 0; }
    friend bool operator>=(const MpReal& a, const MpReal& b) { return mpfr_cmp(a.v_, b.v_) >= 0; }
    friend bool operator==(const MpReal& a, const MpReal& b) { return mpfr_cmp(a.v_, b.v_) == 0; }

    friend MpReal abs(const MpReal& a) {
        MpReal r(a.precision());
        mpfr_abs(r.v_, a.v_, MPFR_RNDN);
        return r;
    }
    friend MpReal sqrt(const MpReal& a) {
        MpReal r(a.precision());
        mpfr_sqrt(r.v_, a.v_, MPFR_RNDN);
        return r;
    }
    friend MpReal exp(const MpReal& a) {
        MpReal r(a.precision());
        mpfr_exp(r.v_, a.v_, MPFR_RNDN);
        return r;
    }
    friend MpReal log(const MpReal& a) {
        MpReal r(a.precision());
        mpfr_log(r.v_, a.v_, MPFR_RNDN);
        return r;
    }
    friend MpReal sin(const MpReal& a) {
        MpReal r(a.precision());
        mpfr_sin(r.v_, a.v_, MPFR_RNDN);
        return r;
    }
    friend MpReal cos(const MpReal& a) {
        MpReal r(a.precision());
        mpfr_cos(r.v_, a.v_, MPFR_RNDN);
        return r;
    }
    friend MpReal atan2(const MpReal& y, const MpReal& x) {
        MpReal r(std::max(y.precision(), x.precision()));
        mpfr_atan2(r.v_, y.v_, x.v_, MPFR_RNDN);
        return r;
    }
    friend MpReal hypot(const MpReal& x, const MpReal& y) {
        MpReal r(std::max(y.precision(), x.precision()));
        mpfr_hypot(r.v_, x.v_, y.v_, MPFR_RNDN);
        return r;
    }
    friend MpReal max(const MpReal& a, const MpReal& b) { return a < b ? b : a; }

  private:
    mpfr_t v_;
};

class MpComplex {
  public:
    MpComplex() = default;
    explicit MpComplex(mpfr_prec_t prec) : re_(prec), im_(prec) {}
    MpComplex(MpReal re, MpReal im) : re_(std::move(re)), im_(std::move(im)) {}

    const MpReal& real() const { return re_; }
    const MpReal& imag() const { return im_; }
    mpfr_prec_t precision() const { return std::max(re_.precision(), im_.precision()); }

    friend MpComplex operator+(const MpComplex& a, const MpComplex& b) {
        return {a.re_ + b.re_, a.im_ + b.im_};
    }
    friend MpComplex operator-(const MpComplex& a, const MpComplex& b) {
        return {a.re_ - b.re_, a.im_ - b.im_};
    }
    friend MpComplex operator*(const MpComplex& a, const MpComplex& b) {
        return {a.re_ * b.re_ - a.im_ * b.im_, a.re_ * b.im_ + a.im_ * b.re_};
    }
    friend MpComplex operator/(const MpComplex& a, const MpComplex& b) {
        MpReal d = b.re_ * b.re_ + b.im_ * b.im_;
        return {(a.re_ * b.re_ + a.im_ * b.im_) / d, (a.im_ * b.re_ - a.re_ * b.im_) / d};
    }
    MpComplex operator-() const { return {-re_, -im_}; }
    MpComplex& operator+=(const MpComplex& o) { return *this = *this + o; }
    MpComplex& operator-=(const MpComplex& o) { return *this = *this - o; }
    MpComplex& operator*=(const MpComplex& o) { return *this = *this * o; }

    friend MpComplex operator*(const MpReal& s, const MpComplex& z) {
        return {s * z.re_, s * z.im_};
    }

    friend MpReal abs(const MpComplex& z) { return hypot(z.re_, z.im_); }

    friend MpComplex exp(const MpComplex& z) {
        MpReal m = exp(z.re_);
        return {m * cos(z.im_), m * sin(z.im_)};
    }
    // Principal branch: imaginary part in (-pi, pi].
    friend MpComplex log(const MpComplex& z) {
        return {log(abs(z)), atan2(z.im_, z.re_)};
    }

    std::string to_string(int digits = 0) const {
        return re_.to_string(digits) + (im_.sign() < 0 ? " - " : " + ") +
               abs(im_).to_string(digits) + "i";
    }

  private:
    MpReal re_;
    MpReal im_;
};

template <typename Poly>
inline MpComplex mp_poly_eval(const Poly& p, const MpComplex& z, mpfr_prec_t prec) {
    MpComplex acc(prec);
    for (auto it = p.rbegin(); it != p.rend(); ++it)
        acc = acc * z + MpComplex(MpReal(*it, prec), MpReal(0L, prec));
    return acc;
}

struct RootSet {
    std::vector<MpComplex> roots;  // sorted by (real, imag), ascending
    MpReal worst_residual;         // max |p(root)|
    mpfr_prec_t precision_bits = 0;
};

// All complex roots of an integer polynomial via Aberth-Ehrlich iteration.
// Initialization is deterministic (roots of unity scaled by the Cauchy bound,
// fixed angular offset), so results are reproducible bit for bit.  Every
// returned root carries the certificate |p(root)| < 2^(-bits/2); failing that
// raises NoConvergence so callers can escalate precision.
inline RootSet roots_of_intpoly(IntPoly p, mpfr_prec_t bits) {
    poly_trim(p);
    const int n = poly_degree(p);
    if (n < 1) throw Error("root finding requires degree >= 1");
    const mpfr_prec_t w = bits + 64;  // guard bits for the iteration itself

    std::vector<MpReal> c;
    c.reserve(p.size());
    for (const auto& x : p) c.emplace_back(x, w);

    RootSet out;
    out.precision_bits = bits;
    if (n == 1) {
        out.roots.push_back({-(c[0] / c[1]), MpReal(0L, w)});
        out.worst_residual = abs(mp_poly_eval(p, out.roots[0], w));
        return out;
    }

    MpReal radius(1L, w);
    for (int i = 0; i < n; ++i) radius = max(radius, abs(c[i]) / abs(c[n]));
    radius = MpReal(1L, w) + radius;

    const MpReal two_pi = MpReal(2L, w) * MpReal::pi(w);
    std::vector<MpComplex> z;
    z.reserve(n);
    for (int k = 0; k < n; ++k) {
        // Fixed offset keeps the start set away from the real axis, where
        // conjugate-symmetric iterates can stall.
        MpReal theta = two_pi * MpReal(k, w) / MpReal(n, w) + MpReal(2L, w) / MpReal(5L, w);
        z.push_back({radius * cos(theta), radius * sin(theta)});
    }

    const MpReal step_tol = MpReal::pow2(-(bits + 16), w);
    bool converged = false;
    for (int iter = 0; iter < 600 && !converged; ++iter) {
        MpReal worst_step(0L, w);
        for (int k = 0; k < n; ++k) {
            // Horner for p and p' simultaneously.
            MpComplex v(c[static_cast<std::size_t>(n)], MpReal(0L, w));
            MpComplex d(w);
            for (int i = n - 1; i >= 0; --i) {
                d = d * z[k] + v;
                v = v * z[k] + MpComplex(c[i], MpReal(0L, w));
            }
            if (abs(v).is_zero()) continue;
            MpComplex ratio = v / d;
            MpComplex s(w);
            for (int j = 0; j < n; ++j)
                if (j != k) s += MpComplex(MpReal(1L, w), MpReal(0L, w)) / (z[k] - z[j]);
            MpComplex one(MpReal(1L, w), MpReal(0L, w));
            MpComplex corr = ratio / (one - ratio * s);
            z[k] = z[k] - corr;
            worst_step = max(worst_step, abs(corr) / max(MpReal(1L, w), abs(z[k])));
        }
        if (worst_step < step_tol) converged = true;
    }
    if (!converged) throw NoConvergence("root iteration did not settle at " +
                                        std::to_string(bits) + " bits");

    MpReal worst(0L, w);
    for (const auto& r : z) worst = max(worst, abs(mp_poly_eval(p, r, w)));
    if (!(worst < MpReal::pow2(-bits / 2, w)))
        throw NoConvergence("residual certificate failed at " + std::to_string(bits) +
                            " bits (worst |p(r)| = " + worst.to_string(8) + ")");

    std::sort(z.begin(), z.end(), [](const MpComplex& a, const MpComplex& b) {
        if (a.real() < b.real()) return true;
        if (b.real() < a.real()) return false;
        return a.imag() < b.imag();
    });
    out.roots = std::move(z);
    out.worst_residual = worst;
    return out;
}

}  // namespace haupt
