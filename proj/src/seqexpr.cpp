#include "seqspace/seqexpr.hpp"

#include <cctype>
#include <vector>

#include "seqspace/errors.hpp"

namespace seqspace {
namespace names {




struct IndexExpr::Node {
    enum class Op { Const, Var, Neg, Add, Sub, Mul, Div, Pow };
    Op op;
    Rational value;                  // Const
    std::shared_ptr<const Node> lhs; // unary operand lives here
    std::shared_ptr<const Node> rhs;
    uint64_t exponent = 0; // Pow
};

namespace {

using Node = IndexExpr::Node;
using NodePtr = std::shared_ptr<const Node>;

NodePtr make_node(Node n) { return std::make_shared<const Node>(std::move(n)); }

class Parser {
public:
    explicit Parser(const std::string& src) : src_(src) {}

    NodePtr parse() {
        NodePtr e = expr();
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

    char peek() {
        skip_ws();
        return pos_ < src_.size() ? src_[pos_] : '\0';
    }

    NodePtr expr() {
        NodePtr lhs = term();
        for (;;) {
            if (eat('+'))
                lhs = make_node({Node::Op::Add, {}, lhs, term(), 0});
            else if (eat('-'))
                lhs = make_node({Node::Op::Sub, {}, lhs, term(), 0});
            else
                return lhs;
        }
    }

    NodePtr term() {
        NodePtr lhs = factor();
        for (;;) {
            if (eat('*'))
                lhs = make_node({Node::Op::Mul, {}, lhs, factor(), 0});
            else if (eat('/'))
                lhs = make_node({Node::Op::Div, {}, lhs, factor(), 0});
            else
                return lhs;
        }
    }

    NodePtr factor() {
        if (eat('-')) return make_node({Node::Op::Neg, {}, factor(), nullptr, 0});
        NodePtr base = primary();
        if (eat('^')) {
            uint64_t e = natural();
            return make_node({Node::Op::Pow, {}, base, nullptr, e});
        }
        return base;
    }

    NodePtr primary() {
        skip_ws();
        if (pos_ >= src_.size()) throw ParseError("unexpected end of expression");
        char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr e = expr();
            if (!eat(')')) throw ParseError("missing ')' at offset " + std::to_string(pos_));
            return e;
        }
        if (c == 'k') {
            ++pos_;
            return make_node({Node::Op::Var, {}, nullptr, nullptr, 0});
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            BigInt v = digits();
            return make_node({Node::Op::Const, Rational(v), nullptr, nullptr, 0});
        }
        throw ParseError("unexpected character '" + std::string(1, c) + "' at offset " +
                         std::to_string(pos_));
    }

    BigInt digits() {
        skip_ws();
        size_t start = pos_;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        if (start == pos_) throw ParseError("expected a number at offset " + std::to_string(pos_));
        return BigInt(src_.substr(start, pos_ - start));
    }

    uint64_t natural() {
        BigInt v = digits();
        if (!v.fits_ulong_p()) throw ParseError("exponent too large");
        return v.get_ui();
    }
};

Rational eval_node(const Node& n, uint64_t k) {
    switch (n.op) {
        case Node::Op::Const:
            return n.value;
        case Node::Op::Var:
            return Rational(BigInt(static_cast<unsigned long>(k)));
        case Node::Op::Neg:
            return -eval_node(*n.lhs, k);
        case Node::Op::Add:
            return eval_node(*n.lhs, k) + eval_node(*n.rhs, k);
        case Node::Op::Sub:
            return eval_node(*n.lhs, k) - eval_node(*n.rhs, k);
        case Node::Op::Mul:
            return eval_node(*n.lhs, k) * eval_node(*n.rhs, k);
        case Node::Op::Div: {
            Rational d = eval_node(*n.rhs, k);
            if (d == 0) throw EvalError("division by zero at k=" + std::to_string(k));
            return eval_node(*n.lhs, k) / d;
        }
        case Node::Op::Pow: {
            Rational b = eval_node(*n.lhs, k);
            Rational out(1);
            BigInt num = b.get_num(), den = b.get_den();
            mpz_pow_ui(num.get_mpz_t(), num.get_mpz_t(), n.exponent);
            mpz_pow_ui(den.get_mpz_t(), den.get_mpz_t(), n.exponent);
            out = numerics::make_rational(num, den);
            return out;
        }
    }
    throw EvalError("corrupt expression node");
}

} // namespace

IndexExpr::IndexExpr(std::shared_ptr<const Node> root, std::string src)
    : root_(std::move(root)), src_(std::move(src)) {}

IndexExpr IndexExpr::parse(const std::string& src) { return IndexExpr(Parser(src).parse(), src); }

Rational IndexExpr::eval(uint64_t k) const { return eval_node(*root_, k); }

} // namespace names
} // namespace seqspace
