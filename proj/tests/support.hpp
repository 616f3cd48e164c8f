#pragma once

#include <random>
#include <vector>

#include "seqspace/functionals.hpp"
#include "seqspace/names.hpp"
#include "seqspace/numerics.hpp"

namespace testsupport {

using seqspace::BigInt;
using seqspace::Rational;

inline std::mt19937_64 rng(uint64_t seed) { return std::mt19937_64(seed); }

inline Rational random_rational(std::mt19937_64& g, long num_range = 64,
                                unsigned long den_range = 16) {
    std::uniform_int_distribution<long> nd(-num_range, num_range);
    std::uniform_int_distribution<unsigned long> dd(1, den_range);
    return seqspace::numerics::make_rational(BigInt(nd(g)), BigInt(dd(g)));
}

inline seqspace::names::SequenceSpec random_finite_spec(std::mt19937_64& g, size_t max_len = 6,
                                                        long num_range = 64,
                                                        unsigned long den_range = 16) {
    std::uniform_int_distribution<size_t> ld(0, max_len);
    size_t len = ld(g);
    std::vector<Rational> vals;
    vals.reserve(len);
    for (size_t i = 0; i < len; ++i) vals.push_back(random_rational(g, num_range, den_range));
    return seqspace::names::SequenceSpec::finite_list(std::move(vals));
}

// zeros, spikes, finite lists and summable geometric sequences, all carrying moduli
inline seqspace::names::SequenceSpec random_spec(std::mt19937_64& g) {
    using seqspace::names::SequenceSpec;
    std::uniform_int_distribution<int> kd(0, 3);
    switch (kd(g)) {
        case 0:
            return SequenceSpec::zeros();
        case 1: {
            std::uniform_int_distribution<uint64_t> id(0, 9);
            return SequenceSpec::spike(id(g), random_rational(g));
        }
        case 2:
            return random_finite_spec(g);
        default: {
            std::uniform_int_distribution<long> pd(-7, 7);
            std::uniform_int_distribution<unsigned long> qd(8, 12);
            return SequenceSpec::geometric(
                seqspace::numerics::make_rational(BigInt(pd(g)), BigInt(qd(g))));
        }
    }
}

// F(x) = sum alpha(x_k)/2^k, exact, for sequences that are 0 past their modulus
inline Rational exact_tail_sum(const seqspace::names::SequenceSpec& s) {
    Rational acc(0);
    uint64_t b = s.modulus_at(0);
    Rational scale(1);
    for (uint64_t i = 0; i < b; ++i) {
        acc += seqspace::numerics::alpha_transform(s.value_at(i)) * scale;
        scale /= 2;
    }
    return acc;
}

inline Rational pow2_neg_rat(uint64_t k) {
    BigInt den(1);
    mpz_mul_2exp(den.get_mpz_t(), den.get_mpz_t(), k);
    return seqspace::numerics::make_rational(BigInt(1), den);
}

inline Rational brute_product_metric(const seqspace::names::SequenceSpec& x,
                                     const seqspace::names::SequenceSpec& y, uint64_t k) {
    uint64_t window = uint64_t(1) << (k + 4);
    Rational best(0);
    for (uint64_t n = 0; n < window; ++n) {
        Rational d = abs(x.value_at(n) - y.value_at(n));
        if (d > 1) d = 1;
        d /= Rational(BigInt(static_cast<unsigned long>(n + 1)));
        if (d > best) best = d;
    }
    return best;
}

// small-valued names whose answer schedules stay near-linear
inline std::vector<seqspace::names::SequenceName> unit_scale_names(size_t count) {
    using seqspace::names::SequenceName;
    using seqspace::names::SequenceSpec;
    std::vector<seqspace::names::SequenceName> out;
    out.push_back(SequenceName::standard(SequenceSpec::zeros()));
    out.push_back(SequenceName::standard(SequenceSpec::per_index("1")));
    out.push_back(SequenceName::standard(SequenceSpec::geometric(Rational(1, 2))));
    out.push_back(SequenceName::standard(SequenceSpec::per_index("1/3")));
    auto g = rng(0x5eed);
    while (out.size() < count) {
        std::uniform_int_distribution<size_t> ld(1, 6);
        size_t len = ld(g);
        std::vector<Rational> vals;
        for (size_t i = 0; i < len; ++i) vals.push_back(random_rational(g, 4, 4));
        out.push_back(SequenceName::standard(SequenceSpec::finite_list(std::move(vals))));
    }
    if (out.size() > count) out.erase(out.begin() + static_cast<long>(count), out.end());
    return out;
}

} // namespace testsupport
