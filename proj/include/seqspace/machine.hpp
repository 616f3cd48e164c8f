#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "seqspace/encoding.hpp"
#include "seqspace/errors.hpp"
#include "seqspace/names.hpp"
#include "seqspace/numerics.hpp"

namespace seqspace {
namespace machine {

struct Query {
    uint64_t i = 0, j = 0;
    encoding::Word response;

    bool operator==(const Query& o) const { return i == o.i && j == o.j && response == o.response; }
    bool operator!=(const Query& o) const { return !(*this == o); }
};

// decoded dyadic carried by a response word for coordinate i (prefix + code)
numerics::Dyadic decode_answer_value(const encoding::Word& response, uint64_t i);

struct QueryTrace {
    std::string functional_id;
    std::string name_id;
    uint64_t n = 0;
    std::vector<Query> queries;
    uint64_t total_cost = 0;

    std::set<uint64_t> cord() const; // coordinates touched

    nlohmann::json to_json() const;
    static QueryTrace from_json(const nlohmann::json& j);

    bool operator==(const QueryTrace& o) const;
    bool operator!=(const QueryTrace& o) const { return !(*this == o); }
};

/// The oracle side of a run.  query(i, j) sends 0^i 1 0^j, logs the padded
/// response word, charges 1 + |query| + |response|, and hands back the decoded
/// dyadic.  Exceeding the query budget raises QueryBudgetExceeded before the
/// offending query executes.
class OracleHandle {
public:
    numerics::Dyadic query(uint64_t i, uint64_t j);
    uint64_t queries_made() const;

    OracleHandle(const OracleHandle&) = delete;
    OracleHandle& operator=(const OracleHandle&) = delete;

private:
    friend struct Runner;
    using Provider = std::function<encoding::Word(uint64_t, uint64_t)>;
    OracleHandle(Provider provider, QueryTrace& trace, std::optional<uint64_t> budget);
    Provider provider_;
    QueryTrace& trace_;
    std::optional<uint64_t> budget_;
};

using Body = std::function<numerics::Dyadic(OracleHandle&, uint64_t)>;

struct Functional {
    std::string id;
    Body body;
    // declared worst-case query count, when one exists independent of n
    std::optional<uint64_t> query_bound;
};

struct RunResult {
    numerics::Dyadic value; // |value - F(x)| <= 2^-n
    QueryTrace trace;
};

/// A body failure wrapped with the queries made so far.
struct FunctionalFailure : Error {
    FunctionalFailure(const std::string& what, QueryTrace partial_trace);
    QueryTrace partial;
};

/// QueryBudgetExceeded as rethrown by run(), carrying the queries that fit.
struct BudgetExhausted : QueryBudgetExceeded {
    BudgetExhausted(const std::string& what, QueryTrace partial_trace);
    QueryTrace partial;
};

/// Deterministic run of f against one name at precision n.  Cost totals the
/// query traffic plus the dyadic arithmetic performed by the body (each op
/// weighted 1 + operand bits; see numerics::CostMeter).
/// QueryBudgetExceeded propagates as itself; other body errors arrive as
/// FunctionalFailure carrying the partial trace.
RunResult run(const Functional& f, const names::SequenceName& name, uint64_t n,
              std::optional<uint64_t> query_budget = std::nullopt);

/// Runs the body against a scripted oracle: the t-th query (i, j) is answered
/// with args[t] truncated to the 2^-j grid, exactly as a standard name would
/// answer.  Exhausting args raises FunctionalFailure.
RunResult run_scripted(const Functional& f, const std::vector<Rational>& args,
                       uint64_t n);

/// Second-order polynomial in one number variable x and one function
/// variable f, closed under +, *, and application f(...).
class SecondOrderPoly {
public:
    struct Node;

    static SecondOrderPoly constant(uint64_t c);
    static SecondOrderPoly variable();
    static SecondOrderPoly add(SecondOrderPoly a, SecondOrderPoly b);
    static SecondOrderPoly mul(SecondOrderPoly a, SecondOrderPoly b);
    static SecondOrderPoly apply(SecondOrderPoly arg);

    /// Grammar:  expr := term ('+' term)* ; term := atom ('*' atom)* ;
    ///           atom := nat | 'x' | 'f' '(' expr ')' | '(' expr ')'
    static SecondOrderPoly parse(const std::string& src); // throws ParseError

    // exact over uint64; overflow raises EvalError
    uint64_t eval(const std::function<uint64_t(uint64_t)>& f, uint64_t x) const;

    std::string to_string() const;

private:
    explicit SecondOrderPoly(std::shared_ptr<const Node> root);
    std::shared_ptr<const Node> root_;
};

struct BoundEntry {
    std::string name_id;
    uint64_t n = 0;
    uint64_t cost = 0;
    uint64_t bound = 0;
    bool ok = false;
};

struct BoundReport {
    std::string functional_id;
    std::string poly;
    std::vector<BoundEntry> entries;

    bool passed() const;
    std::vector<BoundEntry> violations() const;
    nlohmann::json to_json() const;
};

/// Runs f on every (name, n) pair and compares the measured cost against
/// P(size-of-name, n), where the size function is the name's answer-length
/// schedule.
BoundReport check_bound(const Functional& f, const SecondOrderPoly& poly,
                        const std::vector<names::SequenceName>& names,
                        const std::vector<uint64_t>& precisions);

} // namespace machine
} // namespace seqspace
