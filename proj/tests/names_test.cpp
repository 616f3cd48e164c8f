#include <random>
#include <vector>

#include "doctest.h"
#include "seqspace/encoding.hpp"
#include "seqspace/errors.hpp"
#include "seqspace/names.hpp"
#include "support.hpp"

using namespace seqspace;
using namespace seqspace::names;
using encoding::Word;
using numerics::Dyadic;
using numerics::rat_approx;

namespace {

Rational rq(long num, long den) { return numerics::make_rational(BigInt(num), BigInt(den)); }

} // namespace

TEST_CASE("spec values and descriptions") {
    CHECK(SequenceSpec::zeros().describe() == "zeros");
    CHECK(SequenceSpec::zeros().value_at(17) == 0);

    SequenceSpec sp = SequenceSpec::spike(3, rq(5, 2));
    CHECK(sp.describe() == "spike(3,5/2)");
    CHECK(sp.value_at(3) == rq(5, 2));
    CHECK(sp.value_at(2) == 0);
    CHECK(sp.value_at(4) == 0);

    SequenceSpec fl = SequenceSpec::finite_list({Rational(0), Rational(0), Rational(1)});
    CHECK(fl.describe() == "finiteList[0,0,1]");
    CHECK(fl.value_at(2) == 1);
    CHECK(fl.value_at(3) == 0);

    SequenceSpec geo = SequenceSpec::geometric(rq(1, 2));
    CHECK(geo.describe() == "geometric(1/2)");
    CHECK(geo.value_at(0) == 1);
    CHECK(geo.value_at(3) == rq(1, 8));

    SequenceSpec pi = SequenceSpec::per_index("1/(k+1)");
    CHECK(pi.describe() == "perIndex(1/(k+1))");
    CHECK(pi.value_at(2) == rq(1, 3));

    SequenceSpec neg = SequenceSpec::geometric(rq(-2, 3));
    CHECK(neg.value_at(2) == rq(4, 9));
    CHECK(neg.value_at(1) == rq(-2, 3));
}

TEST_CASE("derived summability moduli") {
    CHECK(SequenceSpec::zeros().has_modulus());
    CHECK(SequenceSpec::zeros().modulus_at(12) == 0);

    CHECK(SequenceSpec::spike(3, Rational(7)).modulus_at(5) == 4);
    CHECK(SequenceSpec::spike(3, Rational(0)).modulus_at(5) == 0); // a zero spike is zeros

    CHECK(SequenceSpec::finite_list({Rational(1), Rational(2)}).modulus_at(0) == 2);

    SequenceSpec geo = SequenceSpec::geometric(rq(1, 2));
    CHECK(geo.has_modulus());
    // tail after N is 2^(1-N), so the minimal modulus is k+1
    CHECK(geo.modulus_at(0) == 1);
    CHECK(geo.modulus_at(4) == 5);

    CHECK_FALSE(SequenceSpec::geometric(Rational(2)).has_modulus());
    CHECK_THROWS_AS(SequenceSpec::geometric(Rational(2)).modulus_at(0), MissingModulus);
    CHECK_FALSE(SequenceSpec::per_index("1/(k+1)").has_modulus());
    CHECK_THROWS_AS(SequenceSpec::per_index("0").modulus_at(1), MissingModulus);
}

TEST_CASE("explicit moduli are checked against the tail") {
    // tail(N) = 2^(1-N) <= 2^-k needs N >= k+1, so "k" is too slack and "k+2" fine
    SequenceSpec geo = SequenceSpec::geometric(rq(1, 2));
    CHECK_THROWS_AS(SequenceSpec(geo).with_modulus("k"), ParseError);
    SequenceSpec ok = SequenceSpec(geo).with_modulus("k+2");
    CHECK(ok.modulus_at(3) == 5);
    CHECK(ok.describe() == "geometric(1/2)|mod(k+2)");

    CHECK_THROWS_AS(SequenceSpec::geometric(Rational(2)).with_modulus("k+1"), ParseError);

    // per-index specs accept a declared modulus as-is
    SequenceSpec pi = SequenceSpec::per_index("0").with_modulus("0");
    CHECK(pi.has_modulus());
    CHECK(pi.modulus_at(9) == 0);

    CHECK_THROWS_AS(SequenceSpec::per_index("2^k"), ParseError); // exponents are constants
    CHECK_THROWS_AS(SequenceSpec::per_index(""), ParseError);
    CHECK_THROWS_AS(SequenceSpec::per_index("k+"), ParseError);
}

TEST_CASE("index expressions evaluate exactly") {
    CHECK(IndexExpr::parse("(k+1)*(k+2)/2").eval(4) == 15);
    CHECK(IndexExpr::parse("-k^2+3").eval(2) == -1);
    CHECK(IndexExpr::parse("1/(k+1)").eval(0) == 1);
    CHECK(IndexExpr::parse("2*k+1").source() == "2*k+1");
    CHECK_THROWS_AS(IndexExpr::parse("1/k").eval(0), EvalError); // division by zero
    CHECK_THROWS_AS(IndexExpr::parse("k^k"), ParseError);
    CHECK_THROWS_AS(IndexExpr::parse("(k"), ParseError);
}

TEST_CASE("spec JSON round trips") {
    std::vector<SequenceSpec> specs = {
        SequenceSpec::zeros(),
        SequenceSpec::spike(3, rq(5, 2)),
        SequenceSpec::spike(0, rq(-7, 3)),
        SequenceSpec::finite_list({rq(1, 2), Rational(0), rq(-3, 4)}),
        SequenceSpec::finite_list({}),
        SequenceSpec::geometric(rq(1, 2)),
        SequenceSpec::geometric(rq(-5, 9)),
        SequenceSpec::per_index("1/(k+1)"),
        SequenceSpec(SequenceSpec::geometric(rq(1, 2))).with_modulus("k+2"),
        SequenceSpec::per_index("0").with_modulus("0"),
    };
    for (const auto& s : specs) {
        SequenceSpec back = SequenceSpec::from_json(s.to_json());
        CHECK(back == s);
        CHECK(back.describe() == s.describe());
        CHECK(back.value_at(0) == s.value_at(0));
        CHECK(back.value_at(5) == s.value_at(5));
        CHECK(back.has_modulus() == s.has_modulus());
    }

    CHECK_THROWS_AS(SequenceSpec::from_json(nlohmann::json{{"kind", "mystery"}}), ParseError);
    CHECK_THROWS_AS(SequenceSpec::from_json(nlohmann::json{{"kind", "spike"}}), ParseError);
    CHECK_THROWS_AS(
        SequenceSpec::from_json(nlohmann::json{{"kind", "geometric"}, {"ratio", "x"}}),
        ParseError);
    CHECK_THROWS_AS(SequenceSpec::from_json(nlohmann::json::array()), ParseError);
}

TEST_CASE("name ids") {
    SequenceSpec geo = SequenceSpec::geometric(rq(1, 2));
    CHECK(SequenceName::standard(SequenceSpec::zeros()).id() == "standard:zeros");
    CHECK(SequenceName::left_approx(geo).id() == "left:geometric(1/2)");
    CHECK(SequenceName::seeded(geo, 2).id() == "seeded(2):geometric(1/2)");
    CHECK(SequenceName::masked_zero_prefix(SequenceSpec::zeros(), 4).id() == "masked(4):zeros");
    CHECK(SequenceName::standard(geo).style() == NameStyle::Standard);
    CHECK(SequenceName::seeded(geo, 2).seed() == 2);
}

TEST_CASE("decoded answers meet the 2^-j contract in every style") {
    std::vector<SequenceSpec> specs = {
        SequenceSpec::geometric(rq(1, 2)),
        SequenceSpec::per_index("1/(k+1)"),
        SequenceSpec::finite_list({rq(1, 3), rq(-2, 3), Rational(2)}),
        SequenceSpec::zeros(),
    };
    for (const auto& spec : specs) {
        std::vector<SequenceName> styles = {
            SequenceName::standard(spec),
            SequenceName::left_approx(spec),
            SequenceName::seeded(spec, 1),
            SequenceName::seeded(spec, 77),
        };
        for (const auto& name : styles) {
            for (uint64_t i = 0; i < 12; ++i) {
                for (uint64_t j = 0; j < 12; ++j) {
                    Dyadic d = name.decoded_answer(i, j);
                    Rational x = spec.value_at(i);
                    CHECK(abs(d.to_rational() - x) <= testsupport::pow2_neg_rat(j));
                    CHECK(d.exponent() >= -static_cast<int64_t>(j)); // on the grid
                }
            }
        }
    }
}

TEST_CASE("standard truncates, left approximation floors") {
    SequenceSpec pi = SequenceSpec::per_index("1/(k+1)");
    SequenceName std_name = SequenceName::standard(pi);
    for (uint64_t i = 0; i < 8; ++i)
        for (uint64_t j = 0; j < 10; ++j)
            CHECK(std_name.decoded_answer(i, j) == rat_approx(pi.value_at(i), j));

    // on negatives the two disagree: floor(-1/3 on half grid) = -1/2, trunc = 0... at j=1
    SequenceSpec neg = SequenceSpec::spike(0, rq(-1, 3));
    CHECK(SequenceName::standard(neg).decoded_answer(0, 2) == Dyadic(BigInt(-1), -2));
    CHECK(SequenceName::left_approx(neg).decoded_answer(0, 2) == Dyadic(BigInt(-1), -1));
    // exact values pass through untouched in both styles
    SequenceSpec exact = SequenceSpec::spike(0, rq(3, 4));
    CHECK(SequenceName::left_approx(exact).decoded_answer(0, 5) == Dyadic(BigInt(3), -2));
}

TEST_CASE("seed zero reproduces the standard answers") {
    SequenceSpec pi = SequenceSpec::per_index("1/(k+1)");
    SequenceName a = SequenceName::standard(pi);
    SequenceName b = SequenceName::seeded(pi, 0);
    SequenceName c = perturb_representation(a, 0);
    bool some_seeded_diff = false;
    SequenceName d = perturb_representation(a, 3);
    for (uint64_t i = 0; i < 10; ++i)
        for (uint64_t j = 0; j < 10; ++j) {
            CHECK(a.answer(i, j) == b.answer(i, j));
            CHECK(a.answer(i, j) == c.answer(i, j));
            if (d.decoded_answer(i, j) != a.decoded_answer(i, j)) some_seeded_diff = true;
        }
    CHECK(some_seeded_diff); // a nonzero seed really does move some answers
}

TEST_CASE("masked names are only legal on zero prefixes") {
    SequenceSpec sp = SequenceSpec::spike(5, rq(1, 3));
    SequenceName masked = SequenceName::masked_zero_prefix(sp, 2);
    SequenceName plain = SequenceName::standard(sp);
    for (uint64_t i = 0; i <= 2; ++i) CHECK(masked.decoded_answer(i, 8) == Dyadic());
    CHECK(masked.decoded_answer(5, 8) == plain.decoded_answer(5, 8));

    SequenceName illegal = SequenceName::masked_zero_prefix(SequenceSpec::spike(1, Rational(2)), 3);
    CHECK(illegal.decoded_answer(0, 4) == Dyadic()); // fine until the lie is visible
    CHECK_THROWS_AS(illegal.decoded_answer(1, 4), EvalError);
}

TEST_CASE("answer words follow the frozen zero schedule") {
    SequenceName z = SequenceName::standard(SequenceSpec::zeros());
    for (uint64_t len = 0; len <= 6; ++len) CHECK(z.answer_length(len) == len + 7);
    CHECK(z.answer(2, 3).str() == "0000100110000");
    CHECK(z.answer(2, 3).size() == z.answer_length(6));
}

TEST_CASE("answer words are framed, prefixed and schedule-sized") {
    auto g = testsupport::rng(808);
    std::vector<SequenceSpec> specs = {
        SequenceSpec::geometric(rq(1, 2)),
        testsupport::random_finite_spec(g),
        SequenceSpec::spike(2, rq(-9, 7)),
    };
    for (const auto& spec : specs) {
        SequenceName name = SequenceName::standard(spec);
        uint64_t prev = 0;
        for (uint64_t len = 0; len <= 24; ++len) {
            uint64_t cur = name.answer_length(len);
            CHECK(cur >= prev); // monotone schedule
            prev = cur;
        }
        for (uint64_t i = 0; i < 6; ++i)
            for (uint64_t j = 0; j < 6; ++j) {
                Word w = name.answer(i, j);
                CHECK(w.size() == name.answer_length(i + j + 1));
                // leading 0^i, then the code for the decoded answer, then framing
                for (uint64_t b = 0; b < i; ++b) CHECK_FALSE(w.bit(b));
                auto dec = encoding::decode_dyadic_prefix(w, i);
                CHECK(dec.value == name.decoded_answer(i, j));
                Word core;
                for (size_t b = 0; b < i + dec.consumed; ++b) core.push_back(w.bit(b));
                CHECK(encoding::unpad(w) == core);
            }
    }
}

TEST_CASE("names expose genuinely regular string functions") {
    std::vector<Word> samples;
    for (uint64_t i = 0; i < 6; ++i)
        for (uint64_t j = 0; j < 6; ++j) samples.push_back(encoding::query_word(i, j));
    for (uint64_t l = 0; l <= 8; ++l) samples.push_back(Word::zeros(l)); // no separator
    samples.push_back(Word("0110"));
    samples.push_back(Word("111"));

    std::vector<SequenceName> names = {
        SequenceName::standard(SequenceSpec::geometric(rq(1, 2))),
        SequenceName::left_approx(SequenceSpec::per_index("1/(k+1)")),
        SequenceName::seeded(SequenceSpec::spike(1, rq(22, 7)), 5),
        SequenceName::masked_zero_prefix(SequenceSpec::zeros(), 3),
    };
    for (const auto& name : names) {
        auto fn = name.regular_fn();
        CHECK_FALSE(encoding::audit_regularity(fn, samples).has_value());
        for (uint64_t len = 0; len <= 10; ++len)
            CHECK(encoding::size_of(fn, len) == name.answer_length(len));
        // same-length words get same-length answers
        CHECK(fn.answer(Word("0110")).size() == fn.answer(Word("0001")).size());
    }
}

TEST_CASE("copies of a name share one answer cache") {
    SequenceName a = SequenceName::standard(SequenceSpec::geometric(rq(1, 2)));
    SequenceName b = a; // shares the Impl
    CHECK(a.answer(3, 4) == b.answer(3, 4));
    CHECK(a.id() == b.id());
    CHECK(a.value_at(2) == rq(1, 4));
}
