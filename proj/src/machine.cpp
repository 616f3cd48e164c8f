#include "seqspace/machine.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace seqspace {
namespace machine {

using encoding::Word;
using numerics::Dyadic;

Dyadic decode_answer_value(const Word& response, uint64_t i) {
    return encoding::decode_dyadic_prefix(response, i).value;
}

std::set<uint64_t> QueryTrace::cord() const {
    std::set<uint64_t> c;
    for (const Query& q : queries) c.insert(q.i);
    return c;
}

nlohmann::json QueryTrace::to_json() const {
    nlohmann::json j;
    j["functional"] = functional_id;
    j["name"] = name_id;
    j["n"] = n;
    nlohmann::json qs = nlohmann::json::array();
    for (const Query& q : queries) qs.push_back({{"i", q.i}, {"j", q.j}, {"response", q.response.str()}});
    j["queries"] = std::move(qs);
    j["cord"] = cord();
    j["cost"] = total_cost;
    return j;
}

QueryTrace QueryTrace::from_json(const nlohmann::json& j) {
    try {
        QueryTrace t;
        t.functional_id = j.at("functional").get<std::string>();
        t.name_id = j.at("name").get<std::string>();
        t.n = j.at("n").get<uint64_t>();
        for (const auto& q : j.at("queries")) {
            t.queries.push_back({q.at("i").get<uint64_t>(), q.at("j").get<uint64_t>(),
                                 Word(q.at("response").get<std::string>())});
        }
        t.total_cost = j.at("cost").get<uint64_t>();
        return t;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad trace JSON: ") + e.what());
    }
}

bool QueryTrace::operator==(const QueryTrace& o) const {
    return functional_id == o.functional_id && name_id == o.name_id && n == o.n &&
           queries == o.queries && total_cost == o.total_cost;
}

OracleHandle::OracleHandle(Provider provider, QueryTrace& trace, std::optional<uint64_t> budget)
    : provider_(std::move(provider)), trace_(trace), budget_(budget) {}

uint64_t OracleHandle::queries_made() const { return trace_.queries.size(); }

Dyadic OracleHandle::query(uint64_t i, uint64_t j) {
    if (budget_ && trace_.queries.size() >= *budget_)
        throw QueryBudgetExceeded("query budget of " + std::to_string(*budget_) + " exhausted");
    Word response = provider_(i, j);
    trace_.queries.push_back({i, j, response});
    trace_.total_cost += 1 + (i + j + 1) + response.size();
    return decode_answer_value(response, i);
}

FunctionalFailure::FunctionalFailure(const std::string& what, QueryTrace partial_trace)
    : Error(what), partial(std::move(partial_trace)) {}

BudgetExhausted::BudgetExhausted(const std::string& what, QueryTrace partial_trace)
    : QueryBudgetExceeded(what), partial(std::move(partial_trace)) {}

namespace {

struct MeterScope {
    numerics::CostMeter meter;
    numerics::CostMeter* prev;
    MeterScope() : prev(numerics::exchange_cost_meter(&meter)) {}
    ~MeterScope() { numerics::exchange_cost_meter(prev); }
};

} // namespace

struct Runner {
    static RunResult go(const Functional& f, const std::string& name_id,
                        OracleHandle::Provider provider, uint64_t n,
                        std::optional<uint64_t> budget) {
        RunResult out;
        out.trace.functional_id = f.id;
        out.trace.name_id = name_id;
        out.trace.n = n;
        OracleHandle handle(std::move(provider), out.trace, budget);
        MeterScope scope;
        try {
            out.value = f.body(handle, n);
        } catch (const QueryBudgetExceeded& e) {
            out.trace.total_cost += scope.meter.weighted;
            throw BudgetExhausted(e.what(), std::move(out.trace));
        } catch (const std::exception& e) {
            out.trace.total_cost += scope.meter.weighted;
            throw FunctionalFailure(e.what(), std::move(out.trace));
        }
        out.trace.total_cost += scope.meter.weighted;
        return out;
    }
};

RunResult run(const Functional& f, const names::SequenceName& name, uint64_t n,
              std::optional<uint64_t> query_budget) {
    return Runner::go(
        f, name.id(), [name](uint64_t i, uint64_t j) { return name.answer(i, j); }, n,
        query_budget);
}

RunResult run_scripted(const Functional& f, const std::vector<Rational>& args,
                       uint64_t n) {
    auto provider = [args, t = size_t(0)](uint64_t i, uint64_t j) mutable {
        if (t >= args.size()) throw EvalError("scripted oracle ran out of answers");
        Dyadic v = numerics::rat_approx(args[t++], j);
        Word raw = Word::zeros(i);
        raw.append(encoding::encode_dyadic(v));
        return encoding::pad_to(raw, raw.size() + 1);
    };
    return Runner::go(f, "scripted", provider, n, std::nullopt);
}

// ---------------------------------------------------------------------------

struct SecondOrderPoly::Node {
    enum class Op { Const, Var, Add, Mul, Apply };
    Op op;
    uint64_t value = 0;
    std::shared_ptr<const Node> lhs, rhs;
};

namespace {

using PolyNode = SecondOrderPoly::Node;
using PolyPtr = std::shared_ptr<const PolyNode>;

PolyPtr poly_node(PolyNode n) { return std::make_shared<const PolyNode>(std::move(n)); }

uint64_t checked_add(uint64_t a, uint64_t b) {
    uint64_t out;
    if (__builtin_add_overflow(a, b, &out)) throw EvalError("bound arithmetic overflow");
    return out;
}

uint64_t checked_mul(uint64_t a, uint64_t b) {
    uint64_t out;
    if (__builtin_mul_overflow(a, b, &out)) throw EvalError("bound arithmetic overflow");
    return out;
}

uint64_t eval_poly(const PolyNode& n, const std::function<uint64_t(uint64_t)>& f, uint64_t x) {
    switch (n.op) {
        case PolyNode::Op::Const:
            return n.value;
        case PolyNode::Op::Var:
            return x;
        case PolyNode::Op::Add:
            return checked_add(eval_poly(*n.lhs, f, x), eval_poly(*n.rhs, f, x));
        case PolyNode::Op::Mul:
            return checked_mul(eval_poly(*n.lhs, f, x), eval_poly(*n.rhs, f, x));
        case PolyNode::Op::Apply:
            return f(eval_poly(*n.lhs, f, x));
    }
    throw EvalError("corrupt polynomial node");
}

void print_poly(std::ostringstream& os, const PolyNode& n) {
    switch (n.op) {
        case PolyNode::Op::Const:
            os << n.value;
            return;
        case PolyNode::Op::Var:
            os << 'x';
            return;
        case PolyNode::Op::Add:
            print_poly(os, *n.lhs);
            os << '+';
            print_poly(os, *n.rhs);
            return;
        case PolyNode::Op::Mul: {
            auto factor = [&os](const PolyNode& m) {
                bool parens = m.op == PolyNode::Op::Add;
                if (parens) os << '(';
                print_poly(os, m);
                if (parens) os << ')';
            };
            factor(*n.lhs);
            os << '*';
            factor(*n.rhs);
            return;
        }
        case PolyNode::Op::Apply:
            os << "f(";
            print_poly(os, *n.lhs);
            os << ')';
            return;
    }
}

class PolyParser {
public:
    explicit PolyParser(const std::string& src) : src_(src) {}

    PolyPtr parse() {
        PolyPtr e = expr();
        skip_ws();
        if (pos_ != src_.size())
            throw ParseError("unexpected character '" + std::string(1, src_[pos_]) +
                             "' at offset " + std::to_string(pos_));
        return e;
    }

private:
    const std::string& src_;
    size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    PolyPtr expr() {
        PolyPtr lhs = term();
        while (eat('+')) lhs = poly_node({PolyNode::Op::Add, 0, lhs, term()});
        return lhs;
    }

    PolyPtr term() {
        PolyPtr lhs = atom();
        while (eat('*')) lhs = poly_node({PolyNode::Op::Mul, 0, lhs, atom()});
        return lhs;
    }

    PolyPtr atom() {
        skip_ws();
        if (pos_ >= src_.size()) throw ParseError("unexpected end of polynomial");
        char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            PolyPtr e = expr();
            if (!eat(')')) throw ParseError("missing ')' at offset " + std::to_string(pos_));
            return e;
        }
        if (c == 'x') {
            ++pos_;
            return poly_node({PolyNode::Op::Var, 0, nullptr, nullptr});
        }
        if (c == 'f') {
            ++pos_;
            if (!eat('(')) throw ParseError("expected '(' after f");
            PolyPtr arg = expr();
            if (!eat(')')) throw ParseError("missing ')' after f argument");
            return poly_node({PolyNode::Op::Apply, 0, arg, nullptr});
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            uint64_t v = 0;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                v = checked_add(checked_mul(v, 10), static_cast<uint64_t>(src_[pos_] - '0'));
                ++pos_;
            }
            return poly_node({PolyNode::Op::Const, v, nullptr, nullptr});
        }
        throw ParseError("unexpected character '" + std::string(1, c) + "' at offset " +
                         std::to_string(pos_));
    }
};

} // namespace

SecondOrderPoly::SecondOrderPoly(std::shared_ptr<const Node> root) : root_(std::move(root)) {}

SecondOrderPoly SecondOrderPoly::constant(uint64_t c) {
    return SecondOrderPoly(poly_node({Node::Op::Const, c, nullptr, nullptr}));
}

SecondOrderPoly SecondOrderPoly::variable() {
    return SecondOrderPoly(poly_node({Node::Op::Var, 0, nullptr, nullptr}));
}

SecondOrderPoly SecondOrderPoly::add(SecondOrderPoly a, SecondOrderPoly b) {
    return SecondOrderPoly(poly_node({Node::Op::Add, 0, a.root_, b.root_}));
}

SecondOrderPoly SecondOrderPoly::mul(SecondOrderPoly a, SecondOrderPoly b) {
    return SecondOrderPoly(poly_node({Node::Op::Mul, 0, a.root_, b.root_}));
}

SecondOrderPoly SecondOrderPoly::apply(SecondOrderPoly arg) {
    return SecondOrderPoly(poly_node({Node::Op::Apply, 0, arg.root_, nullptr}));
}

SecondOrderPoly SecondOrderPoly::parse(const std::string& src) {
    return SecondOrderPoly(PolyParser(src).parse());
}

uint64_t SecondOrderPoly::eval(const std::function<uint64_t(uint64_t)>& f, uint64_t x) const {
    return eval_poly(*root_, f, x);
}

std::string SecondOrderPoly::to_string() const {
    std::ostringstream os;
    print_poly(os, *root_);
    return os.str();
}

bool BoundReport::passed() const {
    return std::all_of(entries.begin(), entries.end(), [](const BoundEntry& e) { return e.ok; });
}

std::vector<BoundEntry> BoundReport::violations() const {
    std::vector<BoundEntry> out;
    for (const BoundEntry& e : entries)
        if (!e.ok) out.push_back(e);
    return out;
}

nlohmann::json BoundReport::to_json() const {
    nlohmann::json j;
    j["functional"] = functional_id;
    j["poly"] = poly;
    nlohmann::json es = nlohmann::json::array();
    for (const BoundEntry& e : entries)
        es.push_back({{"name", e.name_id}, {"n", e.n}, {"cost", e.cost}, {"bound", e.bound}, {"ok", e.ok}});
    j["entries"] = std::move(es);
    j["passed"] = passed();
    return j;
}

BoundReport check_bound(const Functional& f, const SecondOrderPoly& poly,
                        const std::vector<names::SequenceName>& names,
                        const std::vector<uint64_t>& precisions) {
    BoundReport report;
    report.functional_id = f.id;
    report.poly = poly.to_string();
    for (const names::SequenceName& name : names) {
        auto size_fn = [&name](uint64_t m) { return name.answer_length(m); };
        for (uint64_t n : precisions) {
            RunResult r = run(f, name, n);
            uint64_t bound = poly.eval(size_fn, n);
            report.entries.push_back(
                {name.id(), n, r.trace.total_cost, bound, r.trace.total_cost <= bound});
        }
    }
    return report;
}

} // namespace machine
} // namespace seqspace
