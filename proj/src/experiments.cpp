#include "seqspace/experiments.hpp"

#include <sstream>

#include "seqspace/errors.hpp"

namespace seqspace {
namespace experiments {

using functionals::RegistryEntry;
using machine::Functional;
using machine::QueryTrace;
using machine::RunResult;
using names::NameStyle;
using names::SequenceName;
using names::SequenceSpec;
using numerics::Dyadic;


namespace {

std::string cord_str(const std::set<uint64_t>& c) {
    std::ostringstream os;
    os << '{';
    bool first = true;
    for (uint64_t i : c) {
        if (!first) os << ',';
        os << i;
        first = false;
    }
    os << '}';
    return os.str();
}

std::vector<uint64_t> coordinate_tuple(const QueryTrace& t) {
    std::vector<uint64_t> out;
    out.reserve(t.queries.size());
    for (const machine::Query& q : t.queries) out.push_back(q.i);
    return out;
}

} // namespace

Dyadic FiniteFactorization::eval(const std::vector<Rational>& args, uint64_t n) const {
    if (args.size() != coords_.size())
        throw EvalError("expected " + std::to_string(coords_.size()) + " arguments, got " +
                        std::to_string(args.size()));
    RunResult r = machine::run_scripted(f_, args, n);
    if (coordinate_tuple(r.trace) != coords_)
        throw CordMismatch("replay of " + f_.id + " touched different coordinates");
    return r.value;
}

nlohmann::json FiniteFactorization::to_json() const {
    return {{"functional", f_.id}, {"coordinates", coords_}};
}

FiniteFactorization factor(const Functional& f, std::optional<uint64_t> declared_bound,
                           const std::vector<SequenceSpec>& samples, uint64_t n) {
    std::optional<uint64_t> bound = declared_bound ? declared_bound : f.query_bound;
    if (!bound) throw EvalError("functional " + f.id + " declares no query bound");
    if (samples.empty()) throw EvalError("factorization needs at least one sample");

    FiniteFactorization out;
    out.f_ = f;
    bool first = true;
    std::string first_desc;
    for (const SequenceSpec& s : samples) {
        RunResult r;
        try {
            r = machine::run(f, SequenceName::standard(s), n, *bound);
        } catch (const machine::BudgetExhausted&) {
            throw DeclaredBoundExceeded(f.id + " exceeded its declared bound of " +
                                        std::to_string(*bound) + " queries on " + s.describe());
        }
        std::vector<uint64_t> tuple = coordinate_tuple(r.trace);
        if (first) {
            out.coords_ = std::move(tuple);
            first_desc = s.describe();
            first = false;
        } else if (tuple != out.coords_) {
            throw CordMismatch(f.id + " touched different coordinates on " + first_desc +
                               " and " + s.describe());
        }
    }
    return out;
}

std::vector<StyleSpec> default_styles() {
    return {{NameStyle::Standard, 0},
            {NameStyle::LeftApprox, 0},
            {NameStyle::Seeded, 1},
            {NameStyle::Seeded, 2},
            {NameStyle::Seeded, 3}};
}

SequenceName make_name(const StyleSpec& s, const SequenceSpec& spec) {
    switch (s.style) {
        case NameStyle::Standard:
            return SequenceName::standard(spec);
        case NameStyle::LeftApprox:
            return SequenceName::left_approx(spec);
        case NameStyle::Seeded:
            return SequenceName::seeded(spec, s.param);
        case NameStyle::MaskedZeroPrefix:
            return SequenceName::masked_zero_prefix(spec, s.param);
    }
    throw EvalError("corrupt style spec");
}

namespace {

std::string style_label(const StyleSpec& s) {
    switch (s.style) {
        case NameStyle::Standard:
            return "standard";
        case NameStyle::LeftApprox:
            return "left";
        case NameStyle::Seeded:
            return "seeded(" + std::to_string(s.param) + ")";
        case NameStyle::MaskedZeroPrefix:
            return "masked(" + std::to_string(s.param) + ")";
    }
    return "?";
}

} // namespace

nlohmann::json InvarianceReport::to_json() const {
    nlohmann::json cj = nlohmann::json::array();
    for (const Cell& c : cells)
        cj.push_back({{"variant", c.variant},
                      {"n", c.n},
                      {"cord", c.cord},
                      {"value", c.value.to_literal()}});
    nlohmann::json dj = nlohmann::json::array();
    for (const Disagreement& d : disagreements)
        dj.push_back({{"n", d.n}, {"a", d.a}, {"b", d.b}, {"what", d.what}});
    return {{"functional", functional_id},
            {"spec", spec_desc},
            {"cells", std::move(cj)},
            {"disagreements", std::move(dj)},
            {"passed", passed()}};
}

InvarianceReport verify_cord_invariance(const RegistryEntry& entry, const SequenceSpec& spec,
                                        const std::vector<StyleSpec>& styles,
                                        const std::vector<uint64_t>& precisions) {
    InvarianceReport report;
    report.functional_id = entry.ref.id;
    report.spec_desc = spec.describe();

    for (uint64_t n : precisions) {
        std::vector<InvarianceReport::Cell> at_n;
        for (const StyleSpec& st : styles) {
            SequenceName name = make_name(st, spec);
            for (const Functional* f : {&entry.ref, &entry.alt}) {
                RunResult r = machine::run(*f, name, n);
                at_n.push_back({style_label(st) + (f == &entry.ref ? "/ref" : "/alt"), n,
                                r.trace.cord(), r.value});
            }
        }
        // shared tolerance band: every run promises 2^-n of the same value
        Rational band = numerics::make_rational(BigInt(2), BigInt(1));
        for (uint64_t s = 0; s < n; ++s) band /= 2;
        for (size_t a = 0; a + 1 < at_n.size(); ++a) {
            const auto& ca = at_n[a];
            const auto& cb = at_n[a + 1];
            if (ca.cord != cb.cord)
                report.disagreements.push_back({n, ca.variant, cb.variant, "cord"});
            if (abs(ca.value.to_rational() - cb.value.to_rational()) > band)
                report.disagreements.push_back({n, ca.variant, cb.variant, "value"});
        }
        for (auto& c : at_n) report.cells.push_back(std::move(c));
    }
    return report;
}

nlohmann::json FixedCordReport::to_json() const {
    nlohmann::json oj = nlohmann::json::array();
    for (const Observation& o : observations)
        oj.push_back({{"spec", o.spec_desc}, {"n", o.n}, {"cord", o.cord}});
    nlohmann::json vj = nlohmann::json::array();
    for (const Violation& v : violations) vj.push_back({{"kind", v.kind}, {"detail", v.detail}});
    nlohmann::json j = {{"functional", functional_id},
                        {"observations", std::move(oj)},
                        {"violations", std::move(vj)},
                        {"passed", passed()}};
    if (common_cord) j["commonCord"] = *common_cord;
    return j;
}

FixedCordReport verify_cord_fixed(const Functional& f, const std::vector<SequenceSpec>& specs,
                                  const std::vector<uint64_t>& precisions) {
    FixedCordReport report;
    report.functional_id = f.id;
    for (const SequenceSpec& s : specs) {
        SequenceName name = SequenceName::standard(s);
        std::optional<std::set<uint64_t>> per_spec;
        for (uint64_t n : precisions) {
            RunResult r = machine::run(f, name, n);
            std::set<uint64_t> cord = r.trace.cord();
            if (f.query_bound && cord.size() > *f.query_bound)
                report.violations.push_back(
                    {"exceeds-declared-bound",
                     f.id + " touched " + std::to_string(cord.size()) + " coordinates on " +
                         s.describe() + " at n=" + std::to_string(n)});
            if (per_spec && *per_spec != cord)
                report.violations.push_back(
                    {"varies-across-precisions",
                     s.describe() + ": " + cord_str(*per_spec) + " vs " + cord_str(cord) +
                         " at n=" + std::to_string(n)});
            per_spec = cord;
            report.observations.push_back({s.describe(), n, std::move(cord)});
        }
    }
    for (uint64_t n : precisions) {
        const std::set<uint64_t>* seen = nullptr;
        const std::string* seen_spec = nullptr;
        for (const auto& o : report.observations) {
            if (o.n != n) continue;
            if (seen && *seen != o.cord) {
                report.violations.push_back({"varies-across-inputs",
                                             *seen_spec + ": " + cord_str(*seen) + " vs " +
                                                 o.spec_desc + ": " + cord_str(o.cord) +
                                                 " at n=" + std::to_string(n)});
            }
            seen = &o.cord;
            seen_spec = &o.spec_desc;
        }
    }
    if (report.violations.empty() && !report.observations.empty())
        report.common_cord = report.observations.front().cord;
    return report;
}

nlohmann::json NormCounterexample::to_json() const {
    return {{"candidate", candidate_id},
            {"n", n},
            {"verdict", verdict},
            {"witnessIndex", witness_index},
            {"scale", scale},
            {"witnessUnit", witness_unit.to_json()},
            {"witnessScaled", witness_scaled.to_json()},
            {"zeroOutput", zero_output.to_literal()},
            {"unitOutput", unit_output.to_literal()},
            {"scaledOutput", scaled_output.to_literal()},
            {"zeroTrace", zero_trace.to_json()},
            {"unitTrace", unit_trace.to_json()},
            {"scaledTrace", scaled_trace.to_json()}};
}

namespace {

struct ValueTriple {
    uint64_t i, j;
    Dyadic value;
    bool operator==(const ValueTriple& o) const {
        return i == o.i && j == o.j && value == o.value;
    }
};

std::vector<ValueTriple> value_trace(const QueryTrace& t) {
    std::vector<ValueTriple> out;
    out.reserve(t.queries.size());
    for (const machine::Query& q : t.queries)
        out.push_back({q.i, q.j, machine::decode_answer_value(q.response, q.i)});
    return out;
}

} // namespace

NormCounterexample falsify_norm(const RegistryEntry& candidate, uint64_t n,
                                uint64_t query_budget) {
    if (n > 60) throw EvalError("precision too large for the scaling witness");
    NormCounterexample out;
    out.candidate_id = candidate.ref.id;
    out.n = n;

    RunResult zero_run;
    try {
        zero_run = machine::run(candidate.ref, SequenceName::standard(SequenceSpec::zeros()), n,
                                query_budget);
    } catch (const machine::BudgetExhausted& e) {
        out.verdict = "QueryBudgetExceeded";
        out.zero_trace = e.partial;
        return out;
    }
    out.zero_output = zero_run.value;
    out.zero_trace = zero_run.trace;

    // witness sits just past every coordinate the candidate probed
    std::set<uint64_t> cord = zero_run.trace.cord();
    bool probed = !cord.empty();
    uint64_t top = probed ? *cord.rbegin() : 0;
    out.witness_index = probed ? top + 1 : 0;
    out.scale = uint64_t(1) << (n + 2);

    out.witness_unit = SequenceSpec::spike(out.witness_index, Rational(1));
    out.witness_scaled =
        SequenceSpec::spike(out.witness_index, Rational(BigInt(
                                                   static_cast<unsigned long>(out.scale))));

    auto witness_name = [&](const SequenceSpec& s) {
        return probed ? SequenceName::masked_zero_prefix(s, top) : SequenceName::standard(s);
    };
    RunResult unit_run = machine::run(candidate.ref, witness_name(out.witness_unit), n,
                                      query_budget);
    RunResult scaled_run = machine::run(candidate.ref, witness_name(out.witness_scaled), n,
                                        query_budget);
    out.unit_output = unit_run.value;
    out.unit_trace = unit_run.trace;
    out.scaled_output = scaled_run.value;
    out.scaled_trace = scaled_run.trace;

    // Determinism check at the level that matters: the same decoded answers
    // must yield the same queries.  (Padded words may differ legitimately:
    // each name carries its own length schedule.)
    std::vector<ValueTriple> z = value_trace(zero_run.trace);
    if (value_trace(unit_run.trace) != z || value_trace(scaled_run.trace) != z)
        throw EvalError("witness runs diverged from the zero run");

    if (candidate.claimed_norm) {
        Rational band(1);
        for (uint64_t s = 0; s < n; ++s) band /= 2;
        Rational gap_unit =
            abs(out.unit_output.to_rational() - candidate.claimed_norm(out.witness_unit));
        Rational gap_scaled =
            abs(out.scaled_output.to_rational() - candidate.claimed_norm(out.witness_scaled));
        if (gap_unit > band || gap_scaled > band) {
            out.verdict = "ApproximationContractViolated";
            return out;
        }
    }
    out.verdict = "HomogeneityOrDefinitenessViolated";
    return out;
}

} // namespace experiments
} // namespace seqspace
