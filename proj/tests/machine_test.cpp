#include <set>

#include "doctest.h"
#include "seqspace/errors.hpp"
#include "seqspace/functionals.hpp"
#include "seqspace/machine.hpp"
#include "seqspace/names.hpp"
#include "support.hpp"

using namespace seqspace;
using namespace seqspace::machine;
using functionals::tail_sum;
using names::SequenceName;
using names::SequenceSpec;
using numerics::Dyadic;

namespace {

Rational rq(long num, long den) { return numerics::make_rational(BigInt(num), BigInt(den)); }

std::set<uint64_t> upto(uint64_t n) {
    std::set<uint64_t> s;
    for (uint64_t i = 0; i <= n; ++i) s.insert(i);
    return s;
}

} // namespace

TEST_CASE("a run records the full query transcript") {
    SequenceName zeros = SequenceName::standard(SequenceSpec::zeros());
    RunResult r = run(tail_sum(), zeros, 5);
    CHECK(r.value == Dyadic());
    CHECK(r.trace.functional_id == "tailsum");
    CHECK(r.trace.name_id == "standard:zeros");
    CHECK(r.trace.n == 5);
    CHECK(r.trace.queries.size() == 7); // coordinates 0..n+1
    CHECK(r.trace.cord() == upto(6));
    CHECK(r.trace.total_cost > 0);

    // each logged response is the name's actual answer word
    for (const Query& q : r.trace.queries) {
        CHECK(q.response == zeros.answer(q.i, q.j));
        CHECK(decode_answer_value(q.response, q.i) == zeros.decoded_answer(q.i, q.j));
    }

    // deterministic: run again, get the identical transcript
    RunResult again = run(tail_sum(), zeros, 5);
    CHECK(again.value == r.value);
    CHECK(again.trace == r.trace);
}

TEST_CASE("traces round trip through JSON") {
    SequenceName geo = SequenceName::standard(SequenceSpec::geometric(rq(1, 2)));
    QueryTrace t = run(tail_sum(), geo, 4).trace;
    nlohmann::json j = t.to_json();
    CHECK(j.at("functional") == "tailsum");
    CHECK(j.at("name") == "standard:geometric(1/2)");
    CHECK(j.at("n") == 4);
    CHECK(j.at("cost") == t.total_cost);
    CHECK(j.at("queries").size() == t.queries.size());
    CHECK(j.contains("cord"));
    QueryTrace back = QueryTrace::from_json(j);
    CHECK(back == t);
}

TEST_CASE("query budgets stop a run before the offending query") {
    SequenceName zeros = SequenceName::standard(SequenceSpec::zeros());
    CHECK_THROWS_AS(run(tail_sum(), zeros, 5, 3), QueryBudgetExceeded); // base class catch
    try {
        run(tail_sum(), zeros, 5, 3);
        FAIL("budget should have tripped");
    } catch (const BudgetExhausted& e) {
        CHECK(e.partial.queries.size() == 3);
        CHECK(e.partial.functional_id == "tailsum");
    }
    // a generous budget changes nothing
    RunResult r = run(tail_sum(), zeros, 5, 100);
    CHECK(r.trace.queries.size() == 7);
}

TEST_CASE("body failures carry the partial trace") {
    // x_0 = 1/0 explodes inside the first oracle query
    SequenceName bad = SequenceName::standard(SequenceSpec::per_index("1/k"));
    CHECK_THROWS_AS(run(functionals::projection(0), bad, 4), FunctionalFailure);
    try {
        run(functionals::projection(0), bad, 4);
    } catch (const FunctionalFailure& e) {
        CHECK(e.partial.queries.empty());
        CHECK(e.partial.functional_id == "proj0");
    }
}

TEST_CASE("scripted runs mirror standard-name runs bit for bit") {
    auto proj2 = functionals::projection(2);
    RunResult direct = run(proj2, SequenceName::standard(SequenceSpec::spike(2, rq(5, 3))), 6);
    RunResult scripted = run_scripted(proj2, {rq(5, 3)}, 6);
    CHECK(scripted.value == direct.value);
    CHECK(scripted.value == Dyadic(BigInt(53), -5)); // trunc(5/3 * 64) / 64
    CHECK(scripted.trace.name_id == "scripted");

    // running out of scripted answers is a body failure
    CHECK_THROWS_AS(run_scripted(tail_sum(), {}, 3), FunctionalFailure);
}

TEST_CASE("second-order polynomials evaluate exactly") {
    auto p = SecondOrderPoly::parse("f(x+2)+f(f(x)*f(x))+x*x+4");
    auto cube = [](uint64_t v) { return v * v * v; };
    auto ident = [](uint64_t v) { return v; };
    CHECK(p.eval(cube, 0) == 12);
    CHECK(p.eval(cube, 1) == 33);
    CHECK(p.eval(cube, 2) == 262216);
    CHECK(p.eval(ident, 0) == 6);
    CHECK(p.to_string() == "f(x+2)+f(f(x)*f(x))+x*x+4");
    // parse(to_string()) is stable
    CHECK(SecondOrderPoly::parse(p.to_string()).eval(cube, 2) == 262216);

    CHECK(SecondOrderPoly::parse("2+3*4").eval(ident, 0) == 14);
    CHECK(SecondOrderPoly::parse("(2+3)*4").eval(ident, 0) == 20);
    CHECK(SecondOrderPoly::parse("x").eval(ident, 9) == 9);

    auto built = SecondOrderPoly::add(
        SecondOrderPoly::mul(SecondOrderPoly::variable(), SecondOrderPoly::variable()),
        SecondOrderPoly::apply(SecondOrderPoly::constant(3)));
    CHECK(built.eval(cube, 5) == 25 + 27);
    CHECK(built.to_string() == "x*x+f(3)");

    CHECK_THROWS_AS(SecondOrderPoly::parse("f(x"), ParseError);
    CHECK_THROWS_AS(SecondOrderPoly::parse("x+"), ParseError);
    CHECK_THROWS_AS(SecondOrderPoly::parse("2^3"), ParseError);
    CHECK_THROWS_AS(SecondOrderPoly::parse("y"), ParseError);
    CHECK_THROWS_AS(SecondOrderPoly::parse(""), ParseError);

    // uint64 overflow is an evaluation error, not a wraparound
    auto sq = SecondOrderPoly::parse("x*x");
    CHECK_THROWS_AS(sq.eval(ident, uint64_t(1) << 33), EvalError);
}

TEST_CASE("cost bounds: the measured run cost sits under the declared polynomial") {
    SequenceName zeros = SequenceName::standard(SequenceSpec::zeros());
    SequenceName ones = SequenceName::standard(SequenceSpec::per_index("1"));
    auto poly = SecondOrderPoly::parse("(f(x+2)+x+2)*(f(x+2)+x+2)");
    BoundReport rep = check_bound(tail_sum(), poly, {zeros, ones}, {4, 8, 12, 16});
    CHECK(rep.passed());
    CHECK(rep.violations().empty());
    REQUIRE(rep.entries.size() == 8);

    const uint64_t zero_cost[] = {204, 500, 924, 1476};
    const uint64_t zero_bound[] = {361, 729, 1225, 1849};
    const uint64_t ones_cost[] = {216, 520, 952, 1512};
    const uint64_t ones_bound[] = {441, 841, 1369, 2025};
    for (int k = 0; k < 4; ++k) {
        CHECK(rep.entries[k].name_id == "standard:zeros");
        CHECK(rep.entries[k].cost == zero_cost[k]);
        CHECK(rep.entries[k].bound == zero_bound[k]);
        CHECK(rep.entries[k].ok);
        CHECK(rep.entries[4 + k].cost == ones_cost[k]);
        CHECK(rep.entries[4 + k].bound == ones_bound[k]);
        CHECK(rep.entries[4 + k].ok);
    }
    CHECK(rep.to_json().at("passed") == true);

    // a linear claim is refuted with a concrete witness
    BoundReport bad = check_bound(tail_sum(), SecondOrderPoly::parse("x+1"), {zeros}, {4});
    CHECK_FALSE(bad.passed());
    REQUIRE(bad.violations().size() == 1);
    CHECK(bad.violations()[0].cost == 204);
    CHECK(bad.violations()[0].bound == 5);
    CHECK(bad.to_json().at("passed") == false);
}
