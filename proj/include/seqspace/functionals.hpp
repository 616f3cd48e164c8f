#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "seqspace/machine.hpp"
#include "seqspace/names.hpp"
#include "seqspace/numerics.hpp"

namespace seqspace {
namespace functionals {

// F(x) = 0
machine::Functional constant_zero();

// F(x) = sum_k alpha(x_k) / 2^k with alpha(t) = |t|/(1+|t|)
machine::Functional tail_sum();
machine::Functional tail_sum_alt(); // same rule, reversed query order

// F(x) = sum_k alpha(x_k) / 2^(k+|x_0|); the queried window shrinks as |x_0| grows
machine::Functional shifted_tail_sum();
machine::Functional shifted_tail_sum_alt();

// F(x) = x_i
machine::Functional projection(uint64_t i);
machine::Functional projection_alt(uint64_t i);

enum class ComboOp { Average, Sum };
machine::Functional finite_combo(std::vector<uint64_t> coords, ComboOp op);
machine::Functional finite_combo_alt(std::vector<uint64_t> coords, ComboOp op);

// Norm impostors for the falsifier.  Each meets the 2^-n contract for the
// quantity it actually computes, but claims to approximate a norm it cannot.
machine::Functional fake_sup(uint64_t window_max);          // max_{i<=K} |x_i|
machine::Functional fake_weighted_sum(uint64_t window_max); // sum_{i<=K} 2^-i |x_i|
machine::Functional fake_trunc_d1();                        // sum_{i<=n} |x_i|

// exact norms of eventually-summable specs (throws EvalError otherwise)
Rational d1_norm(const names::SequenceSpec& s);
Rational sup_norm(const names::SequenceSpec& s);
Rational weighted_sum_norm(const names::SequenceSpec& s);

/// Registry entry: reference and alternate implementations plus, for norm
/// candidates, the exact value they claim (claimed_norm, set only when the
/// candidate declares an exact target) and the norm family they imitate
/// (ideal_value, used for counterexample arithmetic).
struct RegistryEntry {
    machine::Functional ref;
    machine::Functional alt;
    std::function<Rational(const names::SequenceSpec&)> claimed_norm;
    std::function<Rational(const names::SequenceSpec&)> ideal_value;
};

/// Id grammar: const0 | tailsum | shifted-tailsum | proj<N> |
///             avg<i,...> | sum<i,...> | fake-sup<K> | fake-wsum<K> | fake-truncd1
std::optional<RegistryEntry> lookup(const std::string& id);

enum class MetricKind { D1, D2 };

// exact partial: sum over i = 0..M of |x_i - y_i| (D1) or (x_i - y_i)^2 (D2)
Rational metric_lower(const names::SequenceSpec& x, const names::SequenceSpec& y,
                                MetricKind kind, uint64_t M);

// 2^-n approximant of the full sum; both specs need a modulus
numerics::Dyadic metric_full(const names::SequenceSpec& x, const names::SequenceSpec& y,
                             MetricKind kind, uint64_t n);

// 2^-k approximant of sup_n min(|x_n - y_n|, 1)/(n+1), scanning n < 2^(k+1)
numerics::Dyadic product_metric_d(const names::SequenceName& x, const names::SequenceName& y,
                                  uint64_t k);

struct MetricApproxRequest {
    names::SequenceSpec x, y;
    enum class Metric { D1, D2, ProductD };
    Metric metric = Metric::D1;
    std::optional<uint64_t> lower_M; // exact truncated sum mode
    std::optional<uint64_t> full_n;  // 2^-n approximant mode
    bool sqrt_full = false;          // D2 full mode: root of the sum instead
};

struct MetricResult {
    std::optional<Rational> exact;
    std::optional<numerics::Dyadic> approx;
};

MetricResult evaluate(const MetricApproxRequest& req);

} // namespace functionals
} // namespace seqspace
