#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "seqspace/numerics.hpp"

namespace seqspace {
namespace encoding {

/// Finite binary word; renders as a plain 0/1 string in traces and JSON.
class Word {
public:
    Word() = default;
    explicit Word(std::string bits); // validates characters
    static Word zeros(uint64_t n);

    size_t size() const { return bits_.size(); }
    bool empty() const { return bits_.empty(); }
    bool bit(size_t idx) const { return bits_[idx] == '1'; }
    void push_back(bool one) { bits_.push_back(one ? '1' : '0'); }
    void append(const Word& w) { bits_ += w.bits_; }
    const std::string& str() const { return bits_; }

    bool operator==(const Word& o) const { return bits_ == o.bits_; }
    bool operator!=(const Word& o) const { return bits_ != o.bits_; }

private:
    std::string bits_;
};

std::ostream& operator<<(std::ostream& os, const Word& w);

// Cantor pairing <i,j> = (i+j)(i+j+1)/2 + j; bijective on naturals
uint64_t pair(uint64_t i, uint64_t j);
std::pair<uint64_t, uint64_t> unpair(uint64_t n);

// Query words travel in the two-argument unary form 0^i 1 0^j, so the word
// length is i+j+1 and answer-length schedules are indexed by it.
Word query_word(uint64_t i, uint64_t j);
// Total inverse: leading zeros before the first '1' give i, the remaining
// length gives j; a word with no '1' reads as (|u|, 0).
std::pair<uint64_t, uint64_t> split_query_word(const Word& u);

/// Self-delimiting dyadic code:
///   [sign m] [bits of |m| doubled] 01 [sign e] [bits of |e| doubled] 01
/// Payload bits go MSB-first, each sent twice; "01" ends a payload, "10" is
/// malformed.  Zero encodes with an empty mantissa payload.
Word encode_dyadic(const numerics::Dyadic& d);

struct DecodedPrefix {
    numerics::Dyadic value;
    size_t consumed;
};
// decodes the unique code prefix starting at `from`; trailing bits are left alone
DecodedPrefix decode_dyadic_prefix(const Word& w, size_t from = 0);
// whole-word decode: the code must consume the entire word
numerics::Dyadic decode_dyadic(const Word& w);

// |encode_dyadic(d)| without materializing the word
uint64_t code_length(const numerics::Dyadic& d);

// w followed by a '1' marker and zeros, total length exactly len
Word pad_to(const Word& w, uint64_t len); // throws PadOverflow if len < |w|+1
Word unpad(const Word& w);                // throws MalformedCode if no marker

/// String function paired with its declared size law |f(0^n)| = size(n).
struct RegularFn {
    std::function<Word(const Word&)> answer;
    std::function<uint64_t(uint64_t)> size;
};

// |f(0^n)|, materialized
uint64_t size_of(const RegularFn& f, uint64_t n);

struct RegularityViolation {
    Word u, v; // |u| <= |v| but |answer(u)| > |answer(v)|
};
// Checks |u| <= |v| => |f(u)| <= |f(v)| over all sample pairs (which forces
// the answer length to be constant per input length).
std::optional<RegularityViolation> audit_regularity(const RegularFn& f,
                                                    const std::vector<Word>& samples);

} // namespace encoding
} // namespace seqspace
