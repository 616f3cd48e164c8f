#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <iosfwd>
#include <string>

#include "seqspace/errors.hpp"

namespace seqspace {

using BigInt = mpz_class;

// Always kept canonical: reduced, denominator >= 1.  Construction from a
// num/den pair must go through parse_rational or make_rational below (raw
// mpq_class(a, b) does not canonicalize on its own).
using Rational = mpq_class;

namespace numerics {

// bits needed for |v|; 0 for v = 0
uint64_t bit_length(const BigInt& v);

Rational make_rational(const BigInt& num, const BigInt& den);

/// Exact dyadic rational m * 2^e.
///
/// Canonical form invariant: either m = 0 and e = 0, or m is odd.  Every
/// constructor and operator re-establishes it, so equality is structural.
/// Arithmetic is exact — there is no hidden rounding anywhere in this type;
/// the only rounding entry points are round() and rat_approx() below.
class Dyadic {
public:
    Dyadic() : m_(0), e_(0) {}
    explicit Dyadic(long v) : m_(v), e_(0) { canonicalize(); }
    Dyadic(BigInt mantissa, int64_t exponent);

    const BigInt& mantissa() const { return m_; }
    int64_t exponent() const { return e_; }

    bool is_zero() const { return sgn(m_) == 0; }
    int sign() const { return sgn(m_); }
    Dyadic abs() const;

    Rational to_rational() const;
    std::string to_literal() const; // "m*2^e"

    friend Dyadic operator+(const Dyadic& a, const Dyadic& b);
    friend Dyadic operator-(const Dyadic& a, const Dyadic& b);
    friend Dyadic operator*(const Dyadic& a, const Dyadic& b);
    Dyadic operator-() const;

    bool operator==(const Dyadic& o) const { return e_ == o.e_ && m_ == o.m_; }
    bool operator!=(const Dyadic& o) const { return !(*this == o); }

private:
    BigInt m_;
    int64_t e_;
    void canonicalize();
};

std::ostream& operator<<(std::ostream& os, const Dyadic& d);

// exact three-way comparison of values; < 0, 0, > 0
int compare(const Dyadic& a, const Dyadic& b);
inline bool operator<(const Dyadic& a, const Dyadic& b) { return compare(a, b) < 0; }
inline bool operator<=(const Dyadic& a, const Dyadic& b) { return compare(a, b) <= 0; }
inline bool operator>(const Dyadic& a, const Dyadic& b) { return compare(a, b) > 0; }
inline bool operator>=(const Dyadic& a, const Dyadic& b) { return compare(a, b) >= 0; }

/// Round d to the grid of multiples of 2^-n.
/// Guarantees |result - d| <= 2^-(n+1); ties go to the even multiple.
Dyadic round(const Dyadic& d, uint64_t n);

/// alpha(q) = |q| / (1 + |q|), exactly.  Maps the reals onto [0, 1),
/// is monotone in |q| and 1-Lipschitz.
Rational alpha_transform(const Rational& q);

/// Dyadic approximation of q on the 2^-n grid with |result - q| <= 2^-n.
/// Canonically the truncation of q * 2^n toward zero (already within the
/// bound, so no correction step ever fires; the bound is still asserted).
Dyadic rat_approx(const Rational& q, uint64_t n);

/// |result - sqrt(v)| <= 2^-m for v >= 0.
Dyadic sqrt_approx(const Rational& v, uint64_t m);

/// |result - 2^-t| <= 2^-m for dyadic t >= 0.  Integer part shifts exactly;
/// the fractional part u/2^s multiplies out of a table of iterated square
/// roots q_i ~ 2^(-2^-i), so the result stays exact-rational throughout.
Dyadic pow2_neg_approx(const Dyadic& t, uint64_t m);

// ---- parsing / rendering --------------------------------------------------

Rational parse_rational(const std::string& text); // "p/q" | "p"
Dyadic parse_dyadic(const std::string& text);     // "m*2^e" | "m"
Rational parse_number(const std::string& text);   // any of the above

struct DecimalRender {
    std::string text; // sign + integer part + '.' + exactly 10 places
    bool exact;       // false when the tail was truncated
};
DecimalRender decimal_render(const Rational& q);
DecimalRender decimal_render(const Dyadic& d);

// ---- cost metering hook ----------------------------------------------------
// The oracle machine charges dyadic arithmetic by operand width.  While a
// meter is installed (thread-local), +, -, *, compare and round tick it with
// weight 1 + bits(a) + bits(b).  Rational arithmetic is not metered.
struct CostMeter {
    uint64_t ops = 0;
    uint64_t weighted = 0;
};
CostMeter* exchange_cost_meter(CostMeter* next);

} // namespace numerics
} // namespace seqspace
