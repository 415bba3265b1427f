// Factorization of monic squarefree integer polynomials over Z, driven by
// certified complex roots: enumerate root subsets by cardinality, round the
// expanded monic candidate to integers, and accept the first candidate that
// divides exactly.  Escalates working precision when rounding is ambiguous.
#pragma once

#include <optional>
#include <vector>

#include "haupt/exact.hpp"
#include "haupt/mp.hpp"

namespace haupt {

struct NotSquarefree : Error {
    using Error::Error;
};

// Quotient of num by a monic divisor when the division is exact over Z.
inline std::optional<IntPoly> exact_divide(const IntPoly& num, const IntPoly& den) {
    if (den.empty() || den.back() != 1) throw Error("exact_divide requires a monic divisor");
    if (num.size() < den.size()) return std::nullopt;
    IntPoly rem = num;
    IntPoly quot(num.size() - den.size() + 1);
    for (std::size_t i = quot.size(); i-- > 0;) {
        BigInt c = rem[i + den.size() - 1];
        quot[i] = c;
        if (c == 0) continue;
        for (std::size_t k = 0; k < den.size(); ++k) rem[i + k] -= c * den[k];
    }
    for (const auto& c : rem)
        if (c != 0) return std::nullopt;
    return quot;
}

struct Factorization {
    std::vector<IntPoly> factors;  // sorted by (degree, coefficients ascending)
    mpfr_prec_t bits_used = 0;
};

// Canonical order used for reporting and for comparing factor lists that may
// come in display order.
inline bool factor_less(const IntPoly& a, const IntPoly& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] != b[i]) return a[i] < b[i];
    }
    return false;
}

inline std::vector<IntPoly> sorted_factors(std::vector<IntPoly> f) {
    std::sort(f.begin(), f.end(), factor_less);
    return f;
}

namespace detail {

// One pass at a fixed precision; NoConvergence signals the caller to retry
// with more bits.
inline std::vector<IntPoly> factor_pass(const IntPoly& h, mpfr_prec_t bits) {
    const RootSet rs = roots_of_intpoly(h, bits);
    const int n = static_cast<int>(rs.roots.size());
    if (n > 62) throw Error("degree too large for subset enumeration");
    const mpfr_prec_t w = bits + 64;
    const MpReal round_tol = MpReal::pow2(-32, w);

    std::vector<IntPoly> factors;
    IntPoly current = h;
    std::uint64_t remaining = (1ull << n) - 1;

    while (remaining != 0) {
        const int live = __builtin_popcountll(remaining);
        bool advanced = false;
        for (int card = 1; card <= live && !advanced; ++card) {
            for (std::uint64_t mask = 1; mask < (1ull << n) && !advanced; ++mask) {
                if ((mask & ~remaining) != 0) continue;
                if (__builtin_popcountll(mask) != card) continue;

                // Expand the monic polynomial over the masked roots by
                // repeated multiplication with (y - r).
                std::vector<MpComplex> c;
                c.emplace_back(MpReal(1L, w), MpReal(0L, w));
                for (int i = 0; i < n; ++i) {
                    if (!(mask >> i & 1)) continue;
                    const MpComplex& r = rs.roots[static_cast<std::size_t>(i)];
                    std::vector<MpComplex> next(c.size() + 1, MpComplex(w));
                    for (std::size_t k = 0; k < c.size(); ++k) {
                        next[k + 1] = next[k + 1] + c[k];
                        next[k] = next[k] - r * c[k];
                    }
                    c = std::move(next);
                }

                IntPoly cand(c.size());
                bool rounds = true;
                for (std::size_t k = 0; k < c.size() && rounds; ++k) {
                    BigInt z = c[k].real().to_nearest_bigint();
                    if (!(abs(c[k].real() - MpReal(z, w)) < round_tol) ||
                        !(abs(c[k].imag()) < round_tol))
                        rounds = false;
                    cand[k] = std::move(z);
                }
                if (!rounds || cand.back() != 1) continue;

                if (auto quot = exact_divide(current, cand)) {
                    factors.push_back(std::move(cand));
                    current = std::move(*quot);
                    remaining &= ~mask;
                    advanced = true;
                }
            }
        }
        if (!advanced)
            throw NoConvergence("no root subset rounded to an exact divisor at " +
                                std::to_string(bits) + " bits");
    }
    if (!(current == IntPoly{1}))
        throw Error("factor product does not exhaust the input");
    return sorted_factors(std::move(factors));
}

}  // namespace detail

inline Factorization factor_over_z(IntPoly h, mpfr_prec_t bits = 192) {
    poly_trim(h);
    if (poly_degree(h) < 1) throw Error("factorization requires degree >= 1");
    if (!poly_is_monic(h)) throw Error("factorization requires a monic polynomial");
    if (!poly_is_squarefree(h)) throw NotSquarefree("input has a repeated factor");

    mpfr_prec_t b = bits;
    for (int attempt = 0; attempt < 5; ++attempt, b *= 2) {
        try {
            Factorization out;
            out.factors = detail::factor_pass(h, b);
            out.bits_used = b;
            return out;
        } catch (const NoConvergence&) {
            continue;
        }
    }
    throw PrecisionExhausted("factorization failed up to " + std::to_string(b / 2) + " bits");
}

}  // namespace haupt
