// seqspace — command-line front end for the sequence-space engine.
//
// Exit codes: 0 success, 2 parse error or unknown id, 3 missing modulus,
// 4 factorization failure (cord mismatch / declared bound exceeded),
// 5 query budget exceeded, 1 anything else.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "seqspace/errors.hpp"
#include "seqspace/experiments.hpp"
#include "seqspace/functionals.hpp"
#include "seqspace/machine.hpp"
#include "seqspace/names.hpp"
#include "seqspace/numerics.hpp"

using namespace seqspace;
using names::SequenceName;
using names::SequenceSpec;
using numerics::Dyadic;

namespace {

struct Globals {
    bool json = false;
    uint64_t seed = 0;
    uint64_t budget = 1000000;
};

// --spec accepts a file path or an inline JSON object
SequenceSpec load_spec(const std::string& arg) {
    std::string text = arg;
    if (!arg.empty() && arg[0] != '{' && arg[0] != '[') {
        std::ifstream in(arg);
        if (!in) throw ParseError("cannot open spec file '" + arg + "'");
        std::ostringstream buf;
        buf << in.rdbuf();
        text = buf.str();
    }
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("spec is not valid JSON: ") + e.what());
    }
    return SequenceSpec::from_json(j);
}

functionals::RegistryEntry must_lookup(const std::string& id) {
    auto entry = functionals::lookup(id);
    if (!entry) throw ParseError("unknown functional id '" + id + "'");
    return *entry;
}

SequenceName name_for(const Globals& g, const SequenceSpec& spec) {
    return g.seed ? SequenceName::seeded(spec, g.seed) : SequenceName::standard(spec);
}

std::string render_value(const Dyadic& d) {
    auto dec = numerics::decimal_render(d);
    return d.to_literal() + (dec.exact ? " = " : " ~ ") + dec.text;
}

std::string render_value(const Rational& q) {
    auto dec = numerics::decimal_render(q);
    return q.get_str() + (dec.exact ? " = " : " ~ ") + dec.text;
}

std::string render_cord(const std::set<uint64_t>& cord) {
    std::ostringstream os;
    os << '{';
    bool first = true;
    for (uint64_t c : cord) {
        os << (first ? "" : ",") << c;
        first = false;
    }
    os << '}';
    return os.str();
}

void emit(const Globals& g, const nlohmann::json& j, const std::string& text) {
    if (g.json)
        std::cout << j.dump(2) << '\n';
    else
        std::cout << text;
}

int cmd_eval(const Globals& g, const std::string& id, const std::string& spec_arg, uint64_t n,
             bool use_alt) {
    auto entry = must_lookup(id);
    const machine::Functional& f = use_alt ? entry.alt : entry.ref;
    SequenceSpec spec = load_spec(spec_arg);
    SequenceName name = name_for(g, spec);
    machine::RunResult r = machine::run(f, name, n, g.budget);

    nlohmann::json j = r.trace.to_json();
    j["value"] = r.value.to_literal();
    auto dec = numerics::decimal_render(r.value);
    j["decimal"] = dec.text;
    j["exact"] = dec.exact;

    std::ostringstream os;
    os << f.id << "(" << name.id() << ") @ n=" << n << "\n"
       << "  value " << render_value(r.value) << "\n"
       << "  cord " << render_cord(r.trace.cord()) << " | queries " << r.trace.queries.size()
       << " | cost " << r.trace.total_cost << "\n";
    emit(g, j, os.str());
    return 0;
}

int cmd_metric(const Globals& g, const std::string& kind, const std::string& x_arg,
               const std::string& y_arg, std::optional<uint64_t> lower_m,
               std::optional<uint64_t> approx_n, bool sqrt_full) {
    functionals::MetricApproxRequest req;
    req.x = load_spec(x_arg);
    req.y = load_spec(y_arg);
    if (kind == "d1")
        req.metric = functionals::MetricApproxRequest::Metric::D1;
    else if (kind == "d2")
        req.metric = functionals::MetricApproxRequest::Metric::D2;
    else if (kind == "productd")
        req.metric = functionals::MetricApproxRequest::Metric::ProductD;
    else
        throw ParseError("unknown metric kind '" + kind + "' (want d1, d2 or productd)");
    req.lower_M = lower_m;
    req.full_n = approx_n;
    req.sqrt_full = sqrt_full;

    functionals::MetricResult res = functionals::evaluate(req);

    nlohmann::json j{{"metric", kind}, {"x", req.x.describe()}, {"y", req.y.describe()}};
    std::ostringstream os;
    os << kind << "(" << req.x.describe() << ", " << req.y.describe() << ")\n";
    if (res.exact) {
        j["mode"] = "lower";
        j["M"] = *lower_m;
        j["exact"] = res.exact->get_str();
        os << "  truncated at " << *lower_m << ": " << render_value(*res.exact) << "\n";
    }
    if (res.approx) {
        j["mode"] = sqrt_full ? "approx-sqrt" : "approx";
        j["n"] = *approx_n;
        j["value"] = res.approx->to_literal();
        auto dec = numerics::decimal_render(*res.approx);
        j["decimal"] = dec.text;
        j["exact"] = dec.exact;
        os << "  within 2^-" << *approx_n << ": " << render_value(*res.approx) << "\n";
    }
    emit(g, j, os.str());
    return 0;
}

int cmd_factor(const Globals& g, const std::string& id, uint64_t n,
               std::optional<uint64_t> bound, const std::vector<std::string>& probe_args,
               const std::string& replay_arg) {
    auto entry = must_lookup(id);
    std::vector<SequenceSpec> probes;
    if (probe_args.empty()) {
        probes = {SequenceSpec::zeros(), SequenceSpec::spike(0, Rational(1)),
                  SequenceSpec::geometric(Rational(1, 2))};
    } else {
        for (const auto& a : probe_args) probes.push_back(load_spec(a));
    }
    auto fac = experiments::factor(entry.ref, bound, probes, n);

    nlohmann::json j = fac.to_json();
    std::ostringstream os;
    os << id << " @ n=" << n << " factors through coordinates ";
    os << render_cord(std::set<uint64_t>(fac.coordinates().begin(), fac.coordinates().end()));
    os << "\n";

    if (!replay_arg.empty()) {
        std::vector<Rational> args;
        std::stringstream ss(replay_arg);
        std::string tok;
        while (std::getline(ss, tok, ',')) args.push_back(numerics::parse_number(tok));
        Dyadic v = fac.eval(args, n);
        j["replay"] = v.to_literal();
        auto dec = numerics::decimal_render(v);
        j["replayDecimal"] = dec.text;
        os << "  replay(" << replay_arg << ") " << render_value(v) << "\n";
    }
    emit(g, j, os.str());
    return 0;
}

int cmd_falsify(const Globals& g, const std::string& id, uint64_t n) {
    auto rep = experiments::falsify_norm(must_lookup(id), n, g.budget);
    std::ostringstream os;
    os << id << " @ n=" << n << ": " << rep.verdict << "\n"
       << "  witness index " << rep.witness_index << ", scale " << rep.scale << "\n"
       << "  F(0) " << render_value(rep.zero_output) << "\n"
       << "  F(unit spike) " << render_value(rep.unit_output) << "\n"
       << "  F(scaled spike) " << render_value(rep.scaled_output) << "\n";
    emit(g, rep.to_json(), os.str());
    return 0;
}

int cmd_cord(const Globals& g, const std::string& id, const std::vector<std::string>& spec_args,
             std::vector<uint64_t> precisions, bool invariance) {
    auto entry = must_lookup(id);
    std::vector<SequenceSpec> specs;
    if (spec_args.empty()) {
        specs = {SequenceSpec::zeros(), SequenceSpec::spike(0, Rational(1)),
                 SequenceSpec::geometric(Rational(1, 2))};
    } else {
        for (const auto& a : spec_args) specs.push_back(load_spec(a));
    }
    if (precisions.empty()) precisions = {2, 5, 8};

    if (invariance) {
        bool all_ok = true;
        nlohmann::json out = nlohmann::json::array();
        std::ostringstream os;
        for (const auto& spec : specs) {
            auto rep = experiments::verify_cord_invariance(entry, spec,
                                                           experiments::default_styles(),
                                                           precisions);
            out.push_back(rep.to_json());
            os << id << " on " << spec.describe() << ": "
               << (rep.passed() ? "invariant" : "DISAGREES") << "\n";
            for (const auto& d : rep.disagreements)
                os << "  n=" << d.n << " " << d.a << " vs " << d.b << ": " << d.what << "\n";
            all_ok = all_ok && rep.passed();
        }
        emit(g, out, os.str());
        return all_ok ? 0 : 1;
    }

    auto rep = experiments::verify_cord_fixed(entry.ref, specs, precisions);
    std::ostringstream os;
    os << id << ": " << (rep.passed() ? "fixed cord" : "NOT a fixed cord") << "\n";
    if (rep.common_cord) os << "  cord " << render_cord(*rep.common_cord) << "\n";
    for (const auto& v : rep.violations) os << "  " << v.kind << ": " << v.detail << "\n";
    emit(g, rep.to_json(), os.str());
    return rep.passed() ? 0 : 1;
}

int cmd_sop(const Globals& g, const std::string& poly_src, const std::string& functional_id,
            const std::vector<std::string>& spec_args, const std::vector<uint64_t>& precisions) {
    auto poly = machine::SecondOrderPoly::parse(poly_src);
    if (functional_id.empty()) {
        nlohmann::json j{{"poly", poly.to_string()}};
        emit(g, j, poly.to_string() + "\n");
        return 0;
    }
    auto entry = must_lookup(functional_id);
    std::vector<SequenceName> names;
    if (spec_args.empty()) {
        names.push_back(name_for(g, SequenceSpec::zeros()));
        names.push_back(name_for(g, SequenceSpec::per_index("1")));
    } else {
        for (const auto& a : spec_args) names.push_back(name_for(g, load_spec(a)));
    }
    std::vector<uint64_t> ns = precisions.empty() ? std::vector<uint64_t>{4, 8, 12} : precisions;

    auto rep = machine::check_bound(entry.ref, poly, names, ns);
    std::ostringstream os;
    os << functional_id << " vs " << poly.to_string() << ": "
       << (rep.passed() ? "within bound" : "EXCEEDS bound") << "\n";
    for (const auto& e : rep.entries)
        os << "  " << e.name_id << " n=" << e.n << ": cost " << e.cost << " vs " << e.bound
           << (e.ok ? "" : "  <-- violation") << "\n";
    emit(g, rep.to_json(), os.str());
    return rep.passed() ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    Globals g;
    CLI::App app{"exact computation over infinite real sequences"};
    app.require_subcommand(1);
    app.fallthrough(); // global flags may follow the subcommand
    app.add_flag("--json", g.json, "machine-readable output");
    app.add_option("--seed", g.seed, "answer-perturbation seed (0 = standard names)");
    app.add_option("--budget", g.budget, "oracle query budget per run")->default_val(1000000);

    std::string id, spec_arg, x_arg, y_arg, kind = "d1", poly_src, replay_arg;
    std::vector<std::string> spec_args;
    std::vector<uint64_t> precisions;
    uint64_t n = 0;
    bool use_alt = false, sqrt_full = false, invariance = false;
    std::optional<uint64_t> lower_m, approx_n, declared_bound;

    CLI::App* eval = app.add_subcommand("eval", "run a functional against a named sequence");
    eval->add_option("--functional", id, "registry id")->required();
    eval->add_option("--spec", spec_arg, "sequence spec (JSON file or inline)")->required();
    eval->add_option("--n", n, "output precision 2^-n")->required();
    eval->add_flag("--alt", use_alt, "use the alternate implementation");

    CLI::App* metric = app.add_subcommand("metric", "distance between two sequences");
    metric->add_option("--kind", kind, "d1 | d2 | productd");
    metric->add_option("--x", x_arg, "left sequence")->required();
    metric->add_option("--y", y_arg, "right sequence")->required();
    metric->add_option("--lower", lower_m, "exact truncated sum through this index");
    metric->add_option("--approx", approx_n, "approximate the full value within 2^-n");
    metric->add_flag("--sqrt", sqrt_full, "root of the d2 sum instead of the sum");

    CLI::App* factor = app.add_subcommand("factor", "reduce a query-bounded functional to "
                                                    "finitely many coordinates");
    factor->add_option("--functional", id, "registry id")->required();
    factor->add_option("--n", n, "probe precision")->required();
    factor->add_option("--bound", declared_bound, "declared query bound (default: the "
                                                  "functional's own)");
    factor->add_option("--probe", spec_args, "probe specs (repeatable)");
    factor->add_option("--replay", replay_arg, "comma-separated coordinate values to evaluate");

    CLI::App* falsify = app.add_subcommand("falsify", "counterexample run against a claimed "
                                                      "norm approximator");
    falsify->add_option("--candidate", id, "registry id")->required();
    falsify->add_option("--n", n, "claimed precision 2^-n")->required();

    CLI::App* cord = app.add_subcommand("cord", "check which coordinates a functional reads");
    cord->add_option("--functional", id, "registry id")->required();
    cord->add_option("--spec", spec_args, "input specs (repeatable)");
    cord->add_option("--n", precisions, "precisions (repeatable)");
    cord->add_flag("--invariance", invariance,
                   "compare styles and implementations instead of cord fixedness");

    CLI::App* sop = app.add_subcommand("sop", "parse a runtime bound polynomial; optionally "
                                              "check a functional against it");
    sop->add_option("--poly", poly_src, "second-order polynomial in x and f")->required();
    sop->add_option("--functional", id, "registry id to bound-check");
    sop->add_option("--spec", spec_args, "input specs (repeatable)");
    sop->add_option("--n", precisions, "precisions (repeatable)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*eval) return cmd_eval(g, id, spec_arg, n, use_alt);
        if (*metric) return cmd_metric(g, kind, x_arg, y_arg, lower_m, approx_n, sqrt_full);
        if (*factor) return cmd_factor(g, id, n, declared_bound, spec_args, replay_arg);
        if (*falsify) return cmd_falsify(g, id, n);
        if (*cord) return cmd_cord(g, id, spec_args, precisions, invariance);
        if (*sop) return cmd_sop(g, poly_src, id, spec_args, precisions);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const MissingModulus& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const CordMismatch& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (const DeclaredBoundExceeded& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (const QueryBudgetExceeded& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 5;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
