#include "seqspace/numerics.hpp"

#include <cctype>
#include <ostream>

namespace seqspace {
namespace numerics {

namespace {

thread_local CostMeter* g_meter = nullptr;

inline void tick(uint64_t a_bits, uint64_t b_bits) {
    if (g_meter) {
        g_meter->ops += 1;
        g_meter->weighted += 1 + a_bits + b_bits;
    }
}

} // namespace

CostMeter* exchange_cost_meter(CostMeter* next) {
    CostMeter* prev = g_meter;
    g_meter = next;
    return prev;
}

uint64_t bit_length(const BigInt& v) {
    if (sgn(v) == 0) return 0;
    return mpz_sizeinbase(v.get_mpz_t(), 2);
}

Rational make_rational(const BigInt& num, const BigInt& den) {
    if (sgn(den) == 0) throw EvalError("rational with zero denominator");
    Rational r(num, den);
    r.canonicalize();
    return r;
}

Dyadic::Dyadic(BigInt mantissa, int64_t exponent) : m_(std::move(mantissa)), e_(exponent) {
    canonicalize();
}

void Dyadic::canonicalize() {
    if (sgn(m_) == 0) {
        e_ = 0;
        return;
    }
    // scan1 sees two's complement, whose trailing-zero run matches |m|'s
    mp_bitcnt_t tz = mpz_scan1(m_.get_mpz_t(), 0);
    if (tz > 0) {
        mpz_tdiv_q_2exp(m_.get_mpz_t(), m_.get_mpz_t(), tz); // exact: 2^tz divides m
        e_ += static_cast<int64_t>(tz);
    }
}

Dyadic Dyadic::abs() const {
    Dyadic r = *this;
    r.m_ = ::abs(r.m_);
    return r;
}

Rational Dyadic::to_rational() const {
    Rational r(m_);
    if (e_ >= 0) {
        mpz_mul_2exp(r.get_num_mpz_t(), r.get_num_mpz_t(), static_cast<mp_bitcnt_t>(e_));
    } else {
        mpz_mul_2exp(r.get_den_mpz_t(), r.get_den_mpz_t(), static_cast<mp_bitcnt_t>(-e_));
    }
    r.canonicalize();
    return r;
}

std::string Dyadic::to_literal() const {
    return m_.get_str() + "*2^" + std::to_string(e_);
}

std::ostream& operator<<(std::ostream& os, const Dyadic& d) {
    return os << d.to_literal();
}

Dyadic operator+(const Dyadic& a, const Dyadic& b) {
    tick(bit_length(a.m_), bit_length(b.m_));
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    int64_t e = std::min(a.e_, b.e_);
    BigInt la = a.m_, lb = b.m_;
    mpz_mul_2exp(la.get_mpz_t(), la.get_mpz_t(), static_cast<mp_bitcnt_t>(a.e_ - e));
    mpz_mul_2exp(lb.get_mpz_t(), lb.get_mpz_t(), static_cast<mp_bitcnt_t>(b.e_ - e));
    return Dyadic(la + lb, e);
}

Dyadic operator-(const Dyadic& a, const Dyadic& b) {
    return a + (-b);
}

Dyadic operator*(const Dyadic& a, const Dyadic& b) {
    tick(bit_length(a.m_), bit_length(b.m_));
    return Dyadic(a.m_ * b.m_, a.e_ + b.e_);
}

Dyadic Dyadic::operator-() const {
    Dyadic r = *this;
    r.m_ = -r.m_;
    return r;
}

int compare(const Dyadic& a, const Dyadic& b) {
    tick(bit_length(a.mantissa()), bit_length(b.mantissa()));
    int sa = a.sign(), sb = b.sign();
    if (sa != sb) return sa < sb ? -1 : 1;
    if (sa == 0) return 0;
    int64_t e = std::min(a.exponent(), b.exponent());
    BigInt la = a.mantissa(), lb = b.mantissa();
    mpz_mul_2exp(la.get_mpz_t(), la.get_mpz_t(), static_cast<mp_bitcnt_t>(a.exponent() - e));
    mpz_mul_2exp(lb.get_mpz_t(), lb.get_mpz_t(), static_cast<mp_bitcnt_t>(b.exponent() - e));
    return cmp(la, lb) < 0 ? -1 : (la == lb ? 0 : 1);
}

Dyadic round(const Dyadic& d, uint64_t n) {
    if (d.is_zero()) return d;
    int64_t grid = d.exponent() + static_cast<int64_t>(n);
    if (grid >= 0) return d; // already a multiple of 2^-n
    uint64_t shift = static_cast<uint64_t>(-grid);
    tick(bit_length(d.mantissa()), shift);
    // m = q*2^shift + r with 0 <= r < 2^shift (floor split, sign-safe)
    BigInt q, r;
    mpz_fdiv_q_2exp(q.get_mpz_t(), d.mantissa().get_mpz_t(), static_cast<mp_bitcnt_t>(shift));
    mpz_fdiv_r_2exp(r.get_mpz_t(), d.mantissa().get_mpz_t(), static_cast<mp_bitcnt_t>(shift));
    BigInt half;
    mpz_ui_pow_ui(half.get_mpz_t(), 2, shift - 1);
    int c = cmp(r, half);
    if (c > 0 || (c == 0 && mpz_odd_p(q.get_mpz_t()))) q += 1;
    return Dyadic(q, -static_cast<int64_t>(n));
}

Rational alpha_transform(const Rational& q) {
    Rational a = ::abs(q);
    return a / (1 + a);
}

Dyadic rat_approx(const Rational& q, uint64_t n) {
    // trunc(q * 2^n) / 2^n: the dropped fraction is < 1 ulp, so the 2^-n
    // bound holds with no correction step
    BigInt scaled = q.get_num();
    mpz_mul_2exp(scaled.get_mpz_t(), scaled.get_mpz_t(), static_cast<mp_bitcnt_t>(n));
    BigInt t;
    mpz_tdiv_q(t.get_mpz_t(), scaled.get_mpz_t(), q.get_den().get_mpz_t());
    return Dyadic(t, -static_cast<int64_t>(n));
}

Dyadic sqrt_approx(const Rational& v, uint64_t m) {
    if (sgn(v) < 0) throw EvalError("sqrt_approx of negative value");
    uint64_t s = m + 1;
    // N = floor(v * 4^s); |isqrt(N) - sqrt(v*4^s)| < 2, so scaling by 2^-s
    // bounds the error by 2^-m
    BigInt scaled = v.get_num();
    mpz_mul_2exp(scaled.get_mpz_t(), scaled.get_mpz_t(), static_cast<mp_bitcnt_t>(2 * s));
    BigInt n;
    mpz_fdiv_q(n.get_mpz_t(), scaled.get_mpz_t(), v.get_den().get_mpz_t());
    BigInt r;
    mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
    return Dyadic(r, -static_cast<int64_t>(s));
}

Dyadic pow2_neg_approx(const Dyadic& t, uint64_t m) {
    if (t.sign() < 0) throw EvalError("pow2_neg_approx wants t >= 0");
    if (t.is_zero()) return Dyadic(1L);

    // split t = w + u/2^s with integer w >= 0 and 0 <= u < 2^s
    BigInt w, u;
    uint64_t s = 0;
    if (t.exponent() >= 0) {
        // once w > m+2 the value is below the error allowance; avoid the shift
        if (bit_length(t.mantissa()) + static_cast<uint64_t>(t.exponent()) > 64)
            return Dyadic();
        w = t.mantissa();
        mpz_mul_2exp(w.get_mpz_t(), w.get_mpz_t(), static_cast<mp_bitcnt_t>(t.exponent()));
        u = 0;
    } else {
        s = static_cast<uint64_t>(-t.exponent());
        mpz_fdiv_q_2exp(w.get_mpz_t(), t.mantissa().get_mpz_t(), static_cast<mp_bitcnt_t>(s));
        mpz_fdiv_r_2exp(u.get_mpz_t(), t.mantissa().get_mpz_t(), static_cast<mp_bitcnt_t>(s));
    }
    if (cmp(w, static_cast<unsigned long>(m) + 2) > 0) return Dyadic(); // 2^-t <= 2^-(m+2)
    int64_t wi = static_cast<int64_t>(w.get_ui());

    // 2^(-u/2^s) = prod over set bits b of u of q_i, i = s-b, where
    // q_i = 2^(-2^-i) lives in [sqrt(1/2), 1).  Errors stay put: each sqrt
    // contracts the previous error by 1/(2 sqrt(q)) <= 0.72 before adding
    // its own 2^-prec, and every product factor is < 1.
    uint64_t prec = m + 6 + bit_length(BigInt(static_cast<unsigned long>(s) + 1));
    Dyadic r(1L);
    if (sgn(u) != 0) {
        Dyadic q = sqrt_approx(Rational(1, 2), prec);
        for (uint64_t i = 1; i <= s; ++i) {
            if (mpz_tstbit(u.get_mpz_t(), static_cast<mp_bitcnt_t>(s - i))) {
                r = rat_approx((r * q).to_rational(), prec);
            }
            if (i < s) q = sqrt_approx(q.to_rational(), prec);
        }
    }
    return Dyadic(r.mantissa(), r.exponent() - wi);
}

// ---- parsing / rendering ----------------------------------------------------

namespace {

std::string trimmed(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

BigInt parse_integer(const std::string& s) {
    std::string t = trimmed(s);
    if (t.empty()) throw ParseError("empty integer");
    size_t i = (t[0] == '-' || t[0] == '+') ? 1 : 0;
    if (i == t.size()) throw ParseError("bad integer: " + s);
    for (; i < t.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(t[i])))
            throw ParseError("bad integer: " + s);
    return BigInt(t);
}

} // namespace

Rational parse_rational(const std::string& text) {
    std::string t = trimmed(text);
    size_t slash = t.find('/');
    if (slash == std::string::npos) return Rational(parse_integer(t));
    BigInt num = parse_integer(t.substr(0, slash));
    BigInt den = parse_integer(t.substr(slash + 1));
    if (sgn(den) == 0) throw ParseError("zero denominator: " + text);
    return make_rational(num, den);
}

Dyadic parse_dyadic(const std::string& text) {
    std::string t = trimmed(text);
    size_t pos = t.find("*2^");
    if (pos == std::string::npos) return Dyadic(parse_integer(t), 0);
    BigInt m = parse_integer(t.substr(0, pos));
    BigInt e = parse_integer(t.substr(pos + 3));
    if (!e.fits_slong_p()) throw ParseError("exponent out of range: " + text);
    return Dyadic(m, e.get_si());
}

Rational parse_number(const std::string& text) {
    if (text.find("*2^") != std::string::npos) return parse_dyadic(text).to_rational();
    return parse_rational(text);
}

DecimalRender decimal_render(const Rational& q) {
    bool neg = sgn(q) < 0;
    Rational a = ::abs(q);
    BigInt ip;
    mpz_fdiv_q(ip.get_mpz_t(), a.get_num().get_mpz_t(), a.get_den().get_mpz_t());
    Rational rem = a - Rational(ip);
    BigInt scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, 10);
    Rational scaled = rem * Rational(scale);
    BigInt digits;
    mpz_fdiv_q(digits.get_mpz_t(), scaled.get_num().get_mpz_t(), scaled.get_den().get_mpz_t());
    bool exact = (scaled == Rational(digits));
    std::string frac = digits.get_str();
    frac.insert(0, 10 - frac.size(), '0');
    return DecimalRender{(neg ? "-" : "") + ip.get_str() + "." + frac, exact};
}

DecimalRender decimal_render(const Dyadic& d) {
    return decimal_render(d.to_rational());
}

} // namespace numerics
} // namespace seqspace
