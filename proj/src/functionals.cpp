#include "seqspace/functionals.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

#include "seqspace/errors.hpp"

namespace seqspace {
namespace functionals {

using machine::Functional;
using machine::OracleHandle;
using names::SequenceName;
using names::SequenceSpec;
using names::SpecKind;

using numerics::Dyadic;


namespace {

Rational pow2_rat_neg(uint64_t k) {
    BigInt den(1);
    mpz_mul_2exp(den.get_mpz_t(), den.get_mpz_t(), k);
    return numerics::make_rational(BigInt(1), den);
}

uint64_t ceil_abs(const Dyadic& d) {
    BigInt m = abs(d.mantissa());
    if (m == 0) return 0;
    BigInt v;
    if (d.exponent() >= 0) {
        mpz_mul_2exp(v.get_mpz_t(), m.get_mpz_t(), static_cast<mp_bitcnt_t>(d.exponent()));
    } else {
        mpz_cdiv_q_2exp(v.get_mpz_t(), m.get_mpz_t(), static_cast<mp_bitcnt_t>(-d.exponent()));
    }
    if (!v.fits_ulong_p()) throw EvalError("coordinate magnitude out of range");
    return v.get_ui();
}

uint64_t bits_for_count(uint64_t count) {
    // smallest b with count <= 2^b
    return count <= 1 ? 0 : numerics::bit_length(BigInt(static_cast<unsigned long>(count - 1)));
}

std::string coord_list_str(const std::vector<uint64_t>& coords) {
    std::ostringstream os;
    for (size_t i = 0; i < coords.size(); ++i) os << (i ? "," : "") << coords[i];
    return os.str();
}

} // namespace

Functional constant_zero() {
    Functional f;
    f.id = "const0";
    f.body = [](OracleHandle&, uint64_t) { return Dyadic(); };
    f.query_bound = 0;
    return f;
}

// error budget: alpha is 1-Lipschitz, so querying coordinate k at n+k+3 keeps
// the summed per-term error under (4/3)*2^-(n+3); the tail past n+1 is at most
// 2^-(n+1); the final truncation adds under 2^-(n+2).  Total < 2^-n.
Functional tail_sum() {
    Functional f;
    f.id = "tailsum";
    f.body = [](OracleHandle& h, uint64_t n) {
        Rational acc(0);
        for (uint64_t k = 0; k <= n + 1; ++k) {
            Dyadic a = h.query(k, n + k + 3);
            acc += numerics::alpha_transform(a.to_rational()) * pow2_rat_neg(k);
        }
        return numerics::rat_approx(acc, n + 2);
    };
    return f;
}

Functional tail_sum_alt() {
    Functional f;
    f.id = "tailsum#alt";
    f.body = [](OracleHandle& h, uint64_t n) {
        std::vector<Rational> terms(n + 2);
        for (uint64_t k = n + 2; k-- > 0;) {
            Dyadic a = h.query(k, n + k + 3);
            terms[k] = numerics::alpha_transform(a.to_rational()) * pow2_rat_neg(k);
        }
        Rational acc(0);
        for (const Rational& t : terms) acc += t;
        return numerics::rat_approx(acc, n + 2);
    };
    return f;
}

namespace {

// shared rule for both implementations: a precision-0 probe of x_0 picks the
// window K = max(0, n+2 - lambda) with lambda = max(0, ceil|probe| - 2), which
// is a sound lower bound on |x_0| since the probe sits within 1 of it
uint64_t shifted_window(const Dyadic& probe, uint64_t n) {
    uint64_t lam = ceil_abs(probe);
    lam = lam <= 2 ? 0 : lam - 2;
    return lam >= n + 2 ? 0 : n + 2 - lam;
}

Dyadic shifted_finish(const Dyadic& t_hat, const Rational& acc, uint64_t n) {
    Dyadic c = numerics::pow2_neg_approx(t_hat, n + 5);
    return numerics::rat_approx(c.to_rational() * acc, n + 2);
}

} // namespace

Functional shifted_tail_sum() {
    Functional f;
    f.id = "shifted-tailsum";
    f.body = [](OracleHandle& h, uint64_t n) {
        uint64_t K = shifted_window(h.query(0, 0), n);
        Rational acc(0);
        Dyadic t_hat;
        for (uint64_t k = 0; k <= K; ++k) {
            Dyadic a = h.query(k, n + k + 5);
            if (k == 0) t_hat = a.abs();
            acc += numerics::alpha_transform(a.to_rational()) * pow2_rat_neg(k);
        }
        return shifted_finish(t_hat, acc, n);
    };
    return f;
}

Functional shifted_tail_sum_alt() {
    Functional f;
    f.id = "shifted-tailsum#alt";
    f.body = [](OracleHandle& h, uint64_t n) {
        uint64_t K = shifted_window(h.query(0, 0), n);
        std::vector<Rational> terms(K + 1);
        Dyadic t_hat;
        for (uint64_t k = K + 1; k-- > 0;) {
            Dyadic a = h.query(k, n + k + 5);
            if (k == 0) t_hat = a.abs();
            terms[k] = numerics::alpha_transform(a.to_rational()) * pow2_rat_neg(k);
        }
        Rational acc(0);
        for (const Rational& t : terms) acc += t;
        return shifted_finish(t_hat, acc, n);
    };
    return f;
}

Functional projection(uint64_t i) {
    Functional f;
    f.id = "proj" + std::to_string(i);
    f.body = [i](OracleHandle& h, uint64_t n) { return h.query(i, n); };
    f.query_bound = 1;
    return f;
}

Functional projection_alt(uint64_t i) {
    Functional f;
    f.id = "proj" + std::to_string(i) + "#alt";
    f.body = [i](OracleHandle& h, uint64_t n) { return numerics::round(h.query(i, n + 1), n); };
    f.query_bound = 1;
    return f;
}

namespace {

Functional make_combo(std::vector<uint64_t> coords, ComboOp op, bool reversed) {
    if (coords.empty()) throw EvalError("finite combination needs at least one coordinate");
    Functional f;
    f.id = std::string(op == ComboOp::Sum ? "sum" : "avg") + coord_list_str(coords);
    if (reversed) f.id += "#alt";
    uint64_t extra = bits_for_count(coords.size()) + 1;
    uint64_t ell = coords.size();
    f.body = [coords, op, extra, ell, reversed](OracleHandle& h, uint64_t n) {
        uint64_t prec = n + extra;
        std::vector<Dyadic> answers(ell);
        if (reversed) {
            for (uint64_t t = ell; t-- > 0;) answers[t] = h.query(coords[t], prec);
        } else {
            for (uint64_t t = 0; t < ell; ++t) answers[t] = h.query(coords[t], prec);
        }
        if (op == ComboOp::Sum) {
            Dyadic acc;
            for (const Dyadic& a : answers) acc = acc + a;
            return numerics::round(acc, n + 1);
        }
        Rational acc(0);
        for (const Dyadic& a : answers) acc += a.to_rational();
        return numerics::rat_approx(acc / Rational(BigInt(static_cast<unsigned long>(ell))), n + 1);
    };
    f.query_bound = ell;
    return f;
}

} // namespace

Functional finite_combo(std::vector<uint64_t> coords, ComboOp op) {
    return make_combo(std::move(coords), op, false);
}

Functional finite_combo_alt(std::vector<uint64_t> coords, ComboOp op) {
    return make_combo(std::move(coords), op, true);
}

Functional fake_sup(uint64_t window_max) {
    Functional f;
    f.id = "fake-sup" + std::to_string(window_max);
    f.body = [window_max](OracleHandle& h, uint64_t n) {
        Dyadic best;
        for (uint64_t i = 0; i <= window_max; ++i) {
            Dyadic a = h.query(i, n + 1).abs();
            if (compare(a, best) > 0) best = a;
        }
        return best;
    };
    f.query_bound = window_max + 1;
    return f;
}

Functional fake_weighted_sum(uint64_t window_max) {
    Functional f;
    f.id = "fake-wsum" + std::to_string(window_max);
    f.body = [window_max](OracleHandle& h, uint64_t n) {
        Dyadic acc;
        for (uint64_t i = 0; i <= window_max; ++i) {
            Dyadic a = h.query(i, n + 2).abs();
            acc = acc + Dyadic(BigInt(1), -static_cast<int64_t>(i)) * a;
        }
        return numerics::round(acc, n + 1);
    };
    f.query_bound = window_max + 1;
    return f;
}

Functional fake_trunc_d1() {
    Functional f;
    f.id = "fake-truncd1";
    f.body = [](OracleHandle& h, uint64_t n) {
        uint64_t prec = n + 1 + numerics::bit_length(BigInt(static_cast<unsigned long>(n + 1)));
        Dyadic acc;
        for (uint64_t i = 0; i <= n; ++i) acc = acc + h.query(i, prec).abs();
        return numerics::round(acc, n + 1);
    };
    return f;
}

// ---------------------------------------------------------------------------

namespace {

// eventually-zero kinds report a bound past which every coordinate is 0
uint64_t zero_bound(const SequenceSpec& s) {
    switch (s.kind()) {
        case SpecKind::Zeros:
        case SpecKind::Spike:
        case SpecKind::FiniteList:
            return s.modulus_at(0);
        default:
            throw EvalError("exact norm needs an eventually-zero or geometric spec");
    }
}

} // namespace

Rational d1_norm(const SequenceSpec& s) {
    if (s.kind() == SpecKind::Geometric) {
        Rational a = abs(s.value_at(1));
        if (a >= 1) throw EvalError("norm diverges for |ratio| >= 1");
        return Rational(1) / (Rational(1) - a);
    }
    Rational acc(0);
    uint64_t b = zero_bound(s);
    for (uint64_t i = 0; i < b; ++i) acc += abs(s.value_at(i));
    return acc;
}

Rational sup_norm(const SequenceSpec& s) {
    if (s.kind() == SpecKind::Geometric) {
        Rational a = abs(s.value_at(1));
        if (a > 1) throw EvalError("norm diverges for |ratio| > 1");
        return Rational(1); // attained at index 0
    }
    Rational best(0);
    uint64_t b = zero_bound(s);
    for (uint64_t i = 0; i < b; ++i) best = std::max(best, Rational(abs(s.value_at(i))));
    return best;
}

Rational weighted_sum_norm(const SequenceSpec& s) {
    if (s.kind() == SpecKind::Geometric) {
        Rational a = abs(s.value_at(1));
        if (a >= 2) throw EvalError("norm diverges for |ratio| >= 2");
        return Rational(1) / (Rational(1) - a / 2);
    }
    Rational acc(0);
    uint64_t b = zero_bound(s);
    for (uint64_t i = 0; i < b; ++i) acc += abs(s.value_at(i)) * pow2_rat_neg(i);
    return acc;
}

namespace {

bool parse_nat(const std::string& s, uint64_t& out) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    errno = 0;
    char* end = nullptr;
    unsigned long long v = std::strtoull(s.c_str(), &end, 10);
    if (errno != 0 || end != s.c_str() + s.size()) return false;
    out = v;
    return true;
}

bool parse_nat_list(const std::string& s, std::vector<uint64_t>& out) {
    size_t at = 0;
    while (at <= s.size()) {
        size_t comma = s.find(',', at);
        std::string piece = s.substr(at, comma == std::string::npos ? std::string::npos : comma - at);
        uint64_t v;
        if (!parse_nat(piece, v)) return false;
        out.push_back(v);
        if (comma == std::string::npos) return true;
        at = comma + 1;
    }
    return false;
}

} // namespace

std::optional<RegistryEntry> lookup(const std::string& id) {
    RegistryEntry e;
    if (id == "const0") {
        e.ref = constant_zero();
        e.alt = constant_zero();
        e.alt.id += "#alt";
        return e;
    }
    if (id == "tailsum") {
        e.ref = tail_sum();
        e.alt = tail_sum_alt();
        return e;
    }
    if (id == "shifted-tailsum") {
        e.ref = shifted_tail_sum();
        e.alt = shifted_tail_sum_alt();
        return e;
    }
    if (id.rfind("proj", 0) == 0) {
        uint64_t i;
        if (!parse_nat(id.substr(4), i)) return std::nullopt;
        e.ref = projection(i);
        e.alt = projection_alt(i);
        return e;
    }
    if (id.rfind("avg", 0) == 0 || id.rfind("sum", 0) == 0) {
        ComboOp op = id.rfind("avg", 0) == 0 ? ComboOp::Average : ComboOp::Sum;
        std::vector<uint64_t> coords;
        if (!parse_nat_list(id.substr(3), coords)) return std::nullopt;
        e.ref = finite_combo(coords, op);
        e.alt = finite_combo_alt(coords, op);
        return e;
    }
    if (id.rfind("fake-sup", 0) == 0) {
        uint64_t k;
        if (!parse_nat(id.substr(8), k)) return std::nullopt;
        e.ref = fake_sup(k);
        e.alt = fake_sup(k);
        e.alt.id += "#alt";
        e.ideal_value = sup_norm;
        return e;
    }
    if (id.rfind("fake-wsum", 0) == 0) {
        uint64_t k;
        if (!parse_nat(id.substr(9), k)) return std::nullopt;
        e.ref = fake_weighted_sum(k);
        e.alt = fake_weighted_sum(k);
        e.alt.id += "#alt";
        e.ideal_value = weighted_sum_norm;
        return e;
    }
    if (id == "fake-truncd1") {
        e.ref = fake_trunc_d1();
        e.alt = fake_trunc_d1();
        e.alt.id += "#alt";
        e.claimed_norm = d1_norm;
        e.ideal_value = d1_norm;
        return e;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------

Rational metric_lower(const SequenceSpec& x, const SequenceSpec& y, MetricKind kind, uint64_t M) {
    Rational acc(0);
    for (uint64_t i = 0; i <= M; ++i) {
        Rational d = x.value_at(i) - y.value_at(i);
        acc += kind == MetricKind::D1 ? Rational(abs(d)) : Rational(d * d);
    }
    return acc;
}

Dyadic metric_full(const SequenceSpec& x, const SequenceSpec& y, MetricKind kind, uint64_t n) {
    if (!x.has_modulus()) throw MissingModulus("left sequence has no modulus");
    if (!y.has_modulus()) throw MissingModulus("right sequence has no modulus");
    // D1 truncates where both tails are under 2^-(n+2); D2 pushes the cut to
    // k with 2k >= n+3 so the squared tail stays under 2^-(n+1)
    uint64_t k = kind == MetricKind::D1 ? n + 2 : (n + 4) / 2;
    uint64_t N = std::max(x.modulus_at(k), y.modulus_at(k));
    Rational acc(0);
    for (uint64_t i = 0; i < N; ++i) {
        Rational d = x.value_at(i) - y.value_at(i);
        acc += kind == MetricKind::D1 ? Rational(abs(d)) : Rational(d * d);
    }
    return numerics::rat_approx(acc, n + 1);
}

Dyadic product_metric_d(const SequenceName& x, const SequenceName& y, uint64_t k) {
    if (k > 40) throw EvalError("product metric precision too large to scan");
    uint64_t window = uint64_t(1) << (k + 1);
    Rational best(0);
    for (uint64_t idx = 0; idx < window; ++idx) {
        Rational d = abs(x.decoded_answer(idx, k + 4).to_rational() -
                         y.decoded_answer(idx, k + 4).to_rational());
        if (d > 1) d = 1;
        d /= Rational(BigInt(static_cast<unsigned long>(idx + 1)));
        if (d > best) best = d;
    }
    return numerics::rat_approx(best, k + 3);
}

MetricResult evaluate(const MetricApproxRequest& req) {
    MetricResult out;
    if (req.metric == MetricApproxRequest::Metric::ProductD) {
        if (!req.full_n) throw ParseError("product metric needs an approximation precision");
        out.approx = product_metric_d(SequenceName::standard(req.x), SequenceName::standard(req.y),
                                      *req.full_n);
        return out;
    }
    MetricKind kind =
        req.metric == MetricApproxRequest::Metric::D1 ? MetricKind::D1 : MetricKind::D2;
    if (req.lower_M) {
        out.exact = metric_lower(req.x, req.y, kind, *req.lower_M);
        return out;
    }
    if (!req.full_n) throw ParseError("metric request needs --lower or --approx");
    if (req.sqrt_full) {
        if (kind != MetricKind::D2) throw ParseError("--sqrt applies to the quadratic metric only");
        Dyadic inner = metric_full(req.x, req.y, kind, 2 * (*req.full_n) + 2);
        out.approx = numerics::sqrt_approx(inner.to_rational(), *req.full_n + 1);
        return out;
    }
    out.approx = metric_full(req.x, req.y, kind, *req.full_n);
    return out;
}

} // namespace functionals
} // namespace seqspace
