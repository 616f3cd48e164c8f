#include "seqspace/names.hpp"

#include <mutex>
#include <sstream>

#include "seqspace/errors.hpp"

namespace seqspace {
namespace names {

using encoding::Word;

using numerics::Dyadic;


namespace {

std::string rational_str(const Rational& r) { return r.get_str(); }

Rational pow_exact(const Rational& base, uint64_t e) {
    BigInt num = base.get_num(), den = base.get_den();
    mpz_pow_ui(num.get_mpz_t(), num.get_mpz_t(), e);
    mpz_pow_ui(den.get_mpz_t(), den.get_mpz_t(), e);
    return numerics::make_rational(num, den);
}

Rational pow2_neg(uint64_t k) {
    BigInt den(1);
    mpz_mul_2exp(den.get_mpz_t(), den.get_mpz_t(), k);
    return numerics::make_rational(BigInt(1), den);
}

uint64_t ceil_clamped(const Rational& v) {
    if (sgn(v) <= 0) return 0;
    BigInt q;
    mpz_cdiv_q(q.get_mpz_t(), v.get_num().get_mpz_t(), v.get_den().get_mpz_t());
    if (!q.fits_ulong_p()) throw EvalError("modulus value out of range");
    return q.get_ui();
}

} // namespace

SequenceSpec SequenceSpec::zeros() { return SequenceSpec(); }

SequenceSpec SequenceSpec::spike(uint64_t index, Rational value) {
    SequenceSpec s;
    s.kind_ = SpecKind::Spike;
    s.spike_index_ = index;
    s.spike_value_ = std::move(value);
    return s;
}

SequenceSpec SequenceSpec::finite_list(std::vector<Rational> values) {
    SequenceSpec s;
    s.kind_ = SpecKind::FiniteList;
    s.values_ = std::move(values);
    return s;
}

SequenceSpec SequenceSpec::geometric(Rational ratio) {
    SequenceSpec s;
    s.kind_ = SpecKind::Geometric;
    s.ratio_ = std::move(ratio);
    return s;
}

SequenceSpec SequenceSpec::per_index(const std::string& expr) {
    SequenceSpec s;
    s.kind_ = SpecKind::PerIndex;
    s.expr_ = IndexExpr::parse(expr);
    return s;
}

Rational SequenceSpec::value_at(uint64_t i) const {
    switch (kind_) {
        case SpecKind::Zeros:
            return Rational(0);
        case SpecKind::Spike:
            return i == spike_index_ ? spike_value_ : Rational(0);
        case SpecKind::FiniteList:
            return i < values_.size() ? values_[i] : Rational(0);
        case SpecKind::Geometric:
            return pow_exact(ratio_, i);
        case SpecKind::PerIndex:
            return expr_->eval(i);
    }
    throw EvalError("corrupt sequence spec");
}

Rational SequenceSpec::tail_after(uint64_t n) const {
    switch (kind_) {
        case SpecKind::Zeros:
            return Rational(0);
        case SpecKind::Spike:
            return n > spike_index_ ? Rational(0) : Rational(abs(spike_value_));
        case SpecKind::FiniteList: {
            Rational t(0);
            for (uint64_t i = n; i < values_.size(); ++i) t += abs(values_[i]);
            return t;
        }
        case SpecKind::Geometric: {
            Rational a = abs(ratio_);
            if (a >= 1) throw EvalError("tail does not vanish for |ratio| >= 1");
            return Rational(pow_exact(a, n) / (Rational(1) - a));
        }
        case SpecKind::PerIndex:
            throw EvalError("tail of a per-index sequence is not computable here");
    }
    throw EvalError("corrupt sequence spec");
}

bool SequenceSpec::has_modulus() const {
    if (modulus_) return true;
    switch (kind_) {
        case SpecKind::Zeros:
        case SpecKind::Spike:
        case SpecKind::FiniteList:
            return true;
        case SpecKind::Geometric:
            return abs(ratio_) < 1;
        case SpecKind::PerIndex:
            return false;
    }
    return false;
}

uint64_t SequenceSpec::modulus_at(uint64_t k) const {
    if (modulus_) return ceil_clamped(modulus_->eval(k));
    switch (kind_) {
        case SpecKind::Zeros:
            return 0;
        case SpecKind::Spike:
            return sgn(spike_value_) == 0 ? 0 : spike_index_ + 1;
        case SpecKind::FiniteList:
            return values_.size();
        case SpecKind::Geometric: {
            Rational a = abs(ratio_);
            if (a >= 1) throw MissingModulus("geometric sequence with |ratio| >= 1 has no modulus");
            if (sgn(a) == 0) return 0;
            Rational tail = Rational(1) / (Rational(1) - a); // tail after 0
            Rational target = pow2_neg(k);
            uint64_t n = 0;
            while (tail > target) {
                tail *= a;
                ++n;
            }
            return n;
        }
        case SpecKind::PerIndex:
            throw MissingModulus("per-index sequence needs an explicit modulus");
    }
    throw EvalError("corrupt sequence spec");
}

SequenceSpec& SequenceSpec::with_modulus(const std::string& expr) {
    IndexExpr parsed = IndexExpr::parse(expr);
    if (kind_ == SpecKind::Geometric && abs(ratio_) >= 1)
        throw ParseError("modulus rejected: tails of this sequence do not vanish");
    if (kind_ != SpecKind::PerIndex) {
        for (uint64_t k = 0; k <= 64; ++k) {
            uint64_t n = ceil_clamped(parsed.eval(k));
            if (tail_after(n) > pow2_neg(k))
                throw ParseError("modulus fails its tail bound at k=" + std::to_string(k));
        }
    }
    modulus_ = std::move(parsed);
    return *this;
}

std::string SequenceSpec::describe() const {
    std::ostringstream os;
    switch (kind_) {
        case SpecKind::Zeros:
            os << "zeros";
            break;
        case SpecKind::Spike:
            os << "spike(" << spike_index_ << "," << rational_str(spike_value_) << ")";
            break;
        case SpecKind::FiniteList: {
            os << "finiteList[";
            for (size_t i = 0; i < values_.size(); ++i)
                os << (i ? "," : "") << rational_str(values_[i]);
            os << "]";
            break;
        }
        case SpecKind::Geometric:
            os << "geometric(" << rational_str(ratio_) << ")";
            break;
        case SpecKind::PerIndex:
            os << "perIndex(" << expr_->source() << ")";
            break;
    }
    if (modulus_) os << "|mod(" << modulus_->source() << ")";
    return os.str();
}

nlohmann::json SequenceSpec::to_json() const {
    nlohmann::json j;
    switch (kind_) {
        case SpecKind::Zeros:
            j["kind"] = "zeros";
            break;
        case SpecKind::Spike:
            j["kind"] = "spike";
            j["index"] = spike_index_;
            j["value"] = rational_str(spike_value_);
            break;
        case SpecKind::FiniteList: {
            j["kind"] = "finiteList";
            std::vector<std::string> vals;
            vals.reserve(values_.size());
            for (const Rational& v : values_) vals.push_back(rational_str(v));
            j["values"] = vals;
            break;
        }
        case SpecKind::Geometric:
            j["kind"] = "geometric";
            j["ratio"] = rational_str(ratio_);
            break;
        case SpecKind::PerIndex:
            j["kind"] = "perIndex";
            j["expr"] = expr_->source();
            break;
    }
    if (modulus_) j["modulus"] = modulus_->source();
    return j;
}

SequenceSpec SequenceSpec::from_json(const nlohmann::json& j) {
    try {
        std::string kind = j.at("kind").get<std::string>();
        SequenceSpec s;
        if (kind == "zeros") {
            s = zeros();
        } else if (kind == "spike") {
            s = spike(j.at("index").get<uint64_t>(),
                      numerics::parse_rational(j.at("value").get<std::string>()));
        } else if (kind == "finiteList") {
            std::vector<Rational> vals;
            for (const auto& v : j.at("values")) vals.push_back(numerics::parse_rational(v.get<std::string>()));
            s = finite_list(std::move(vals));
        } else if (kind == "geometric") {
            s = geometric(numerics::parse_rational(j.at("ratio").get<std::string>()));
        } else if (kind == "perIndex") {
            s = per_index(j.at("expr").get<std::string>());
        } else {
            throw ParseError("unknown sequence kind '" + kind + "'");
        }
        if (j.contains("modulus")) s.with_modulus(j.at("modulus").get<std::string>());
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad sequence JSON: ") + e.what());
    }
}

// ---------------------------------------------------------------------------

namespace {

uint64_t splitmix64(uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

bool away_bit(uint64_t seed, uint64_t i, uint64_t j) {
    return (splitmix64(splitmix64(seed ^ splitmix64(i + 1)) ^ (j + 1)) & 1) != 0;
}

} // namespace

struct SequenceName::Impl {
    SequenceSpec spec;
    NameStyle style = NameStyle::Standard;
    uint64_t seed = 0; // seed (Seeded) or masked prefix bound (MaskedZeroPrefix)

    mutable std::recursive_mutex mu;
    mutable std::vector<std::optional<Rational>> values;
    mutable std::vector<uint64_t> schedule; // answer length per input length

    Rational value_at(uint64_t i) const {
        std::lock_guard<std::recursive_mutex> lock(mu);
        if (values.size() <= i) values.resize(i + 1);
        if (!values[i]) values[i] = spec.value_at(i);
        return *values[i];
    }

    Dyadic decoded(uint64_t i, uint64_t j) const {
        if (style == NameStyle::MaskedZeroPrefix && i <= seed) {
            if (sgn(value_at(i)) != 0)
                throw EvalError("masked name queried on a nonzero masked coordinate");
            return Dyadic();
        }
        Rational x = value_at(i);
        BigInt num = x.get_num();
        mpz_mul_2exp(num.get_mpz_t(), num.get_mpz_t(), j);
        BigInt den = x.get_den();
        BigInt q, r;
        mpz_tdiv_qr(q.get_mpz_t(), r.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
        bool exact = (r == 0);
        switch (style) {
            case NameStyle::Standard:
            case NameStyle::MaskedZeroPrefix:
                break; // truncate toward zero
            case NameStyle::LeftApprox:
                if (!exact && sgn(r) < 0) q -= 1; // floor
                break;
            case NameStyle::Seeded:
                if (seed != 0 && !exact && away_bit(seed, i, j)) q += sgn(x);
                break;
        }
        return Dyadic(q, -static_cast<int64_t>(j));
    }

    // schedule(L) = 1 + running max of every raw answer a length-L input can demand
    uint64_t answer_length(uint64_t word_len) const {
        std::lock_guard<std::recursive_mutex> lock(mu);
        while (schedule.size() <= word_len) {
            uint64_t len = schedule.size();
            uint64_t raw = raw_len(len, 0); // separator-free parse
            for (uint64_t i = 0; i < len; ++i) raw = std::max(raw, raw_len(i, len - 1 - i));
            uint64_t entry = 1 + raw;
            if (!schedule.empty()) entry = std::max(entry, schedule.back());
            schedule.push_back(entry);
        }
        return schedule[word_len];
    }

    uint64_t raw_len(uint64_t i, uint64_t j) const {
        return i + encoding::code_length(decoded(i, j));
    }

    Word answer_for_input_length(uint64_t i, uint64_t j, uint64_t input_len) const {
        Word raw = Word::zeros(i);
        raw.append(encoding::encode_dyadic(decoded(i, j)));
        return encoding::pad_to(raw, answer_length(input_len));
    }
};

SequenceName::SequenceName(std::shared_ptr<Impl> impl) : impl_(std::move(impl)) {}

SequenceName SequenceName::standard(SequenceSpec spec) {
    auto impl = std::make_shared<Impl>();
    impl->spec = std::move(spec);
    impl->style = NameStyle::Standard;
    return SequenceName(std::move(impl));
}

SequenceName SequenceName::left_approx(SequenceSpec spec) {
    auto impl = std::make_shared<Impl>();
    impl->spec = std::move(spec);
    impl->style = NameStyle::LeftApprox;
    return SequenceName(std::move(impl));
}

SequenceName SequenceName::seeded(SequenceSpec spec, uint64_t seed) {
    auto impl = std::make_shared<Impl>();
    impl->spec = std::move(spec);
    impl->style = NameStyle::Seeded;
    impl->seed = seed;
    return SequenceName(std::move(impl));
}

SequenceName SequenceName::masked_zero_prefix(SequenceSpec spec, uint64_t mask) {
    auto impl = std::make_shared<Impl>();
    impl->spec = std::move(spec);
    impl->style = NameStyle::MaskedZeroPrefix;
    impl->seed = mask;
    return SequenceName(std::move(impl));
}

const SequenceSpec& SequenceName::spec() const { return impl_->spec; }
NameStyle SequenceName::style() const { return impl_->style; }
uint64_t SequenceName::seed() const { return impl_->seed; }

std::string SequenceName::id() const {
    std::ostringstream os;
    switch (impl_->style) {
        case NameStyle::Standard:
            os << "standard";
            break;
        case NameStyle::LeftApprox:
            os << "left";
            break;
        case NameStyle::Seeded:
            os << "seeded(" << impl_->seed << ")";
            break;
        case NameStyle::MaskedZeroPrefix:
            os << "masked(" << impl_->seed << ")";
            break;
    }
    os << ":" << impl_->spec.describe();
    return os.str();
}

Rational SequenceName::value_at(uint64_t i) const { return impl_->value_at(i); }

Dyadic SequenceName::decoded_answer(uint64_t i, uint64_t j) const { return impl_->decoded(i, j); }

Word SequenceName::answer(uint64_t i, uint64_t j) const {
    return impl_->answer_for_input_length(i, j, i + j + 1);
}

uint64_t SequenceName::answer_length(uint64_t word_len) const {
    return impl_->answer_length(word_len);
}

encoding::RegularFn SequenceName::regular_fn() const {
    SequenceName self = *this;
    encoding::RegularFn fn;
    fn.answer = [self](const Word& u) {
        auto [i, j] = encoding::split_query_word(u);
        return self.impl_->answer_for_input_length(i, j, u.size());
    };
    fn.size = [self](uint64_t n) { return self.answer_length(n); };
    return fn;
}

SequenceName perturb_representation(const SequenceName& base, uint64_t seed) {
    return SequenceName::seeded(base.spec(), seed);
}

} // namespace names
} // namespace seqspace
