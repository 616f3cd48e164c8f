#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "seqspace/numerics.hpp"

namespace seqspace {
namespace names {

/// Arithmetic expression over one natural variable k, evaluated exactly.
///
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := '-' factor | primary ('^' nat)?
///   primary:= nat | 'k' | '(' expr ')'
///
/// Whitespace is ignored.  Division is exact rational division; dividing by
/// an expression that evaluates to zero raises EvalError at eval time.
class IndexExpr {
public:
    struct Node;

    static IndexExpr parse(const std::string& src); // throws ParseError

    Rational eval(uint64_t k) const;
    const std::string& source() const { return src_; }

private:
    IndexExpr(std::shared_ptr<const Node> root, std::string src);
    std::shared_ptr<const Node> root_;
    std::string src_;
};

} // namespace names
} // namespace seqspace
