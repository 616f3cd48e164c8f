#include "seqspace/encoding.hpp"

#include <cmath>
#include <ostream>

#include "seqspace/errors.hpp"

namespace seqspace {
namespace encoding {


using numerics::Dyadic;

Word::Word(std::string bits) : bits_(std::move(bits)) {
    for (char c : bits_) {
        if (c != '0' && c != '1')
            throw MalformedCode("word contains a character other than 0/1");
    }
}

Word Word::zeros(uint64_t n) {
    Word w;
    w.bits_.assign(n, '0');
    return w;
}

std::ostream& operator<<(std::ostream& os, const Word& w) { return os << w.str(); }

uint64_t pair(uint64_t i, uint64_t j) {
    uint64_t s = i + j;
    return s * (s + 1) / 2 + j;
}

std::pair<uint64_t, uint64_t> unpair(uint64_t n) {
    // s = floor((sqrt(8n+1)-1)/2), then correct for rounding at the seam
    uint64_t s = static_cast<uint64_t>((std::sqrt(8.0 * static_cast<double>(n) + 1.0) - 1.0) / 2.0);
    while (s * (s + 1) / 2 > n) --s;
    while ((s + 1) * (s + 2) / 2 <= n) ++s;
    uint64_t j = n - s * (s + 1) / 2;
    return {s - j, j};
}

Word query_word(uint64_t i, uint64_t j) {
    Word w = Word::zeros(i);
    w.push_back(true);
    w.append(Word::zeros(j));
    return w;
}

std::pair<uint64_t, uint64_t> split_query_word(const Word& u) {
    size_t i = 0;
    while (i < u.size() && !u.bit(i)) ++i;
    if (i == u.size()) return {u.size(), 0}; // no separator: read as (|u|, 0)
    return {i, u.size() - i - 1};
}

namespace {

void emit_magnitude(Word& out, const BigInt& mag) {
    uint64_t bits = numerics::bit_length(mag);
    for (uint64_t k = bits; k-- > 0;) {
        bool b = mpz_tstbit(mag.get_mpz_t(), k) != 0;
        out.push_back(b);
        out.push_back(b);
    }
    out.push_back(false);
    out.push_back(true);
}

struct MagnitudeDecode {
    BigInt mag;
    bool negative;
    size_t next;
};

MagnitudeDecode read_magnitude(const Word& w, size_t at) {
    if (at >= w.size()) throw MalformedCode("truncated code: missing sign bit");
    MagnitudeDecode r;
    r.negative = w.bit(at);
    ++at;
    for (;;) {
        if (at + 1 >= w.size()) throw MalformedCode("truncated code: unterminated payload");
        bool a = w.bit(at), b = w.bit(at + 1);
        at += 2;
        if (a == b) {
            r.mag = r.mag * 2 + (a ? 1 : 0);
        } else if (!a && b) {
            break; // "01" terminator
        } else {
            throw MalformedCode("invalid bit pair 10 inside code payload");
        }
    }
    r.next = at;
    return r;
}

} // namespace

Word encode_dyadic(const Dyadic& d) {
    Word out;
    out.push_back(d.mantissa() < 0);
    emit_magnitude(out, abs(d.mantissa()));
    out.push_back(d.exponent() < 0);
    BigInt e = static_cast<long>(d.exponent() < 0 ? -d.exponent() : d.exponent());
    emit_magnitude(out, e);
    return out;
}

DecodedPrefix decode_dyadic_prefix(const Word& w, size_t from) {
    MagnitudeDecode m = read_magnitude(w, from);
    MagnitudeDecode e = read_magnitude(w, m.next);
    if (!e.mag.fits_slong_p()) throw MalformedCode("exponent magnitude out of range");
    BigInt mant = m.negative ? BigInt(-m.mag) : m.mag;
    int64_t exp = e.mag.get_si();
    if (e.negative) exp = -exp;
    return {Dyadic(mant, exp), e.next - from};
}

Dyadic decode_dyadic(const Word& w) {
    DecodedPrefix p = decode_dyadic_prefix(w, 0);
    if (p.consumed != w.size()) throw MalformedCode("trailing bits after code");
    return p.value;
}

uint64_t code_length(const Dyadic& d) {
    BigInt e = static_cast<long>(d.exponent() < 0 ? -d.exponent() : d.exponent());
    return 6 + 2 * numerics::bit_length(abs(d.mantissa())) + 2 * numerics::bit_length(e);
}

Word pad_to(const Word& w, uint64_t len) {
    if (len < w.size() + 1)
        throw PadOverflow("cannot pad word of length " + std::to_string(w.size()) +
                          " to length " + std::to_string(len));
    Word out = w;
    out.push_back(true);
    out.append(Word::zeros(len - w.size() - 1));
    return out;
}

Word unpad(const Word& w) {
    const std::string& s = w.str();
    size_t marker = s.rfind('1');
    if (marker == std::string::npos) throw MalformedCode("padded word has no marker bit");
    return Word(s.substr(0, marker));
}

uint64_t size_of(const RegularFn& f, uint64_t n) { return f.answer(Word::zeros(n)).size(); }

std::optional<RegularityViolation> audit_regularity(const RegularFn& f,
                                                    const std::vector<Word>& samples) {
    struct Seen {
        Word input;
        uint64_t out_len;
    };
    std::vector<Seen> seen;
    seen.reserve(samples.size());
    for (const Word& u : samples) seen.push_back({u, f.answer(u).size()});
    for (const Seen& a : seen) {
        for (const Seen& b : seen) {
            if (a.input.size() <= b.input.size() && a.out_len > b.out_len)
                return RegularityViolation{a.input, b.input};
        }
    }
    return std::nullopt;
}

} // namespace encoding
} // namespace seqspace
