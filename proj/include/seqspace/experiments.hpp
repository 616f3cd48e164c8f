#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "seqspace/functionals.hpp"
#include "seqspace/machine.hpp"
#include "seqspace/names.hpp"

namespace seqspace {
namespace experiments {

/// Finite factorization extracted from probe runs: a query-bounded functional
/// reduces to the tuple of coordinates it reads, in a fixed order.
class FiniteFactorization {
public:
    const std::string& functional_id() const { return f_.id; }
    const std::vector<uint64_t>& coordinates() const { return coords_; }

    // Replays the functional with its t-th query answered from args[t]
    // (rounded to the requested grid exactly as a standard name would), so a
    // replay against the true coordinate values is bit-identical to a run.
    numerics::Dyadic eval(const std::vector<Rational>& args, uint64_t n) const;

    nlohmann::json to_json() const;

private:
    friend FiniteFactorization factor(const machine::Functional&, std::optional<uint64_t>,
                                      const std::vector<names::SequenceSpec>&, uint64_t);
    machine::Functional f_;
    std::vector<uint64_t> coords_;
};

/// Probes f on every sample at precision n and demands one coordinate tuple.
/// The declared bound (argument, or the functional's own) caps the query
/// count: more queries raise DeclaredBoundExceeded, differing tuples raise
/// CordMismatch.
FiniteFactorization factor(const machine::Functional& f, std::optional<uint64_t> declared_bound,
                           const std::vector<names::SequenceSpec>& samples, uint64_t n);

struct StyleSpec {
    names::NameStyle style = names::NameStyle::Standard;
    uint64_t param = 0; // seed (Seeded) or masked prefix (MaskedZeroPrefix)
};

// standard, left approximation, and three seeded variants
std::vector<StyleSpec> default_styles();

names::SequenceName make_name(const StyleSpec& s, const names::SequenceSpec& spec);

/// Runs reference and alternate implementations across representation styles
/// and checks that the touched coordinates agree exactly and the outputs stay
/// within the shared tolerance band 2^-(n-1).
struct InvarianceReport {
    std::string functional_id;
    std::string spec_desc;

    struct Cell {
        std::string variant; // e.g. "seeded(2)/alt"
        uint64_t n = 0;
        std::set<uint64_t> cord;
        numerics::Dyadic value;
    };
    std::vector<Cell> cells;

    struct Disagreement {
        uint64_t n = 0;
        std::string a, b;
        std::string what; // "cord" or "value"
    };
    std::vector<Disagreement> disagreements;

    bool passed() const { return disagreements.empty(); }
    nlohmann::json to_json() const;
};

InvarianceReport verify_cord_invariance(const functionals::RegistryEntry& entry,
                                        const names::SequenceSpec& spec,
                                        const std::vector<StyleSpec>& styles,
                                        const std::vector<uint64_t>& precisions);

/// Checks whether the functional reads one fixed coordinate set: per input
/// across precisions, and across inputs at each precision.  A declared query
/// bound is also enforced on the observed cord size.
struct FixedCordReport {
    std::string functional_id;

    struct Observation {
        std::string spec_desc;
        uint64_t n = 0;
        std::set<uint64_t> cord;
    };
    std::vector<Observation> observations;

    struct Violation {
        std::string kind; // varies-across-precisions | varies-across-inputs | exceeds-declared-bound
        std::string detail;
    };
    std::vector<Violation> violations;

    std::optional<std::set<uint64_t>> common_cord; // set when no violations

    bool passed() const { return violations.empty(); }
    nlohmann::json to_json() const;
};

FixedCordReport verify_cord_fixed(const machine::Functional& f,
                                  const std::vector<names::SequenceSpec>& specs,
                                  const std::vector<uint64_t>& precisions);

/// Adversary run against a claimed norm approximator.
///
/// The candidate first runs on the zero sequence under a query budget; the
/// coordinates it reads bound the witness index.  Two spikes just past that
/// bound — height 1 and height 2^(n+2) — are then presented through names
/// whose answers on the probed prefix are identical to the zero name's, so by
/// determinism the candidate repeats its run and returns the same value for
/// 0, y, and 2^(n+2)·y.  No approximator of a norm can do that.
struct NormCounterexample {
    std::string candidate_id;
    uint64_t n = 0;
    // HomogeneityOrDefinitenessViolated | ApproximationContractViolated | QueryBudgetExceeded
    std::string verdict;

    uint64_t witness_index = 0;
    uint64_t scale = 0; // height of the tall witness
    names::SequenceSpec witness_unit = names::SequenceSpec::zeros();
    names::SequenceSpec witness_scaled = names::SequenceSpec::zeros();

    numerics::Dyadic zero_output, unit_output, scaled_output;
    machine::QueryTrace zero_trace, unit_trace, scaled_trace;

    nlohmann::json to_json() const;
};

NormCounterexample falsify_norm(const functionals::RegistryEntry& candidate, uint64_t n,
                                uint64_t query_budget);

} // namespace experiments
} // namespace seqspace
