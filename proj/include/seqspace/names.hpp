#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "seqspace/encoding.hpp"
#include "seqspace/numerics.hpp"
#include "seqspace/seqexpr.hpp"

namespace seqspace {
namespace names {

enum class SpecKind { Zeros, Spike, FiniteList, Geometric, PerIndex };

/// Exact description of a real sequence, with an optional modulus expression
/// bounding the absolute tail: sum_{i >= modulus(k)} |x_i| <= 2^-k.
///
/// Moduli are derived automatically for zeros, spikes, finite lists and
/// geometric sequences with |ratio| < 1.  An explicit modulus expression is
/// checked exactly against the tail at k = 0..64 before being accepted.
class SequenceSpec {
public:
    static SequenceSpec zeros();
    static SequenceSpec spike(uint64_t index, Rational value);
    static SequenceSpec finite_list(std::vector<Rational> values);
    static SequenceSpec geometric(Rational ratio);
    static SequenceSpec per_index(const std::string& expr); // throws ParseError

    SequenceSpec& with_modulus(const std::string& expr); // throws ParseError

    SpecKind kind() const { return kind_; }
    Rational value_at(uint64_t i) const;

    bool has_modulus() const;
    uint64_t modulus_at(uint64_t k) const; // throws MissingModulus

    std::string describe() const;
    nlohmann::json to_json() const;
    static SequenceSpec from_json(const nlohmann::json& j);

    bool operator==(const SequenceSpec& o) const { return describe() == o.describe(); }

    SequenceSpec() = default; // the zero sequence

private:
    Rational tail_after(uint64_t n) const; // sum_{i>=n} |x_i|, exact

    SpecKind kind_ = SpecKind::Zeros;
    uint64_t spike_index_ = 0;
    Rational spike_value_;
    std::vector<Rational> values_;
    Rational ratio_;
    std::optional<IndexExpr> expr_;
    std::optional<IndexExpr> modulus_;
};

enum class NameStyle { Standard, LeftApprox, Seeded, MaskedZeroPrefix };

/// A name of a sequence: the regular string function an oracle machine
/// queries.  The answer to the query word 0^i 1 0^j carries a dyadic within
/// 2^-j of x_i, prefixed by 0^i and padded out to a monotone length schedule
/// so the function is regular.
///
/// Styles vary the legal rounding of answers without changing the point named:
///   Standard          truncate toward zero
///   LeftApprox        round down (floor)
///   Seeded            per-query direction picked by a hash of (seed, i, j);
///                     seed 0 coincides with Standard
///   MaskedZeroPrefix  coordinates <= mask answer exactly 0 (only a valid
///                     name when those coordinates are 0)
///
/// Copies share one cache; all entry points are thread-safe.
class SequenceName {
public:
    static SequenceName standard(SequenceSpec spec);
    static SequenceName left_approx(SequenceSpec spec);
    static SequenceName seeded(SequenceSpec spec, uint64_t seed);
    static SequenceName masked_zero_prefix(SequenceSpec spec, uint64_t mask);

    const SequenceSpec& spec() const;
    NameStyle style() const;
    uint64_t seed() const; // seed or mask, by style
    std::string id() const;

    Rational value_at(uint64_t i) const;

    // decoded oracle answer: dyadic on the 2^-j grid with |answer - x_i| <= 2^-j
    numerics::Dyadic decoded_answer(uint64_t i, uint64_t j) const;

    // full answer word: 0^i, the dyadic code, padding to answer_length(i+j+1)
    encoding::Word answer(uint64_t i, uint64_t j) const;

    // the monotone schedule: |answer(u)| for any |u| = word_len
    uint64_t answer_length(uint64_t word_len) const;

    encoding::RegularFn regular_fn() const;

private:
    struct Impl;
    explicit SequenceName(std::shared_ptr<Impl> impl);
    std::shared_ptr<Impl> impl_;
};

// seed 0 reproduces the standard name
SequenceName perturb_representation(const SequenceName& base, uint64_t seed);

} // namespace names
} // namespace seqspace
