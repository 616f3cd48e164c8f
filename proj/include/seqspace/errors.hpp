#pragma once

#include <stdexcept>
#include <string>

namespace seqspace {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// malformed self-delimiting code, bad pad framing, or truncated word
struct MalformedCode : Error {
    using Error::Error;
};

// requested pad length cannot hold payload + marker
struct PadOverflow : Error {
    using Error::Error;
};

// full metric approximation requested on a spec without a summability modulus
struct MissingModulus : Error {
    using Error::Error;
};

// query coordinates disagree across samples during factorization
struct CordMismatch : Error {
    using Error::Error;
};

// a run observed more queries than the declared finite bound
struct DeclaredBoundExceeded : Error {
    using Error::Error;
};

// oracle handle refused a query past the configured budget
struct QueryBudgetExceeded : Error {
    using Error::Error;
};

// unparsable number, spec document, or expression
struct ParseError : Error {
    using Error::Error;
};

// runtime evaluation failure (division by zero in an index expression,
// overflow in natural-number polynomial evaluation, ...)
struct EvalError : Error {
    using Error::Error;
};

} // namespace seqspace
