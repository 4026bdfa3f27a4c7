#pragma once

#include <stdexcept>
#include <string>

namespace fairlevel {

// Base for everything the library throws.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed input document (bad JSON, missing fields, wrong types).
struct ParseError : Error {
    using Error::Error;
};

// A population invariant is violated; the message names the invariant
// ("mass sum", "negative mass", "degenerate group-label pair", "duplicate triple").
struct ValidationError : Error {
    using Error::Error;
};

// A classifier does not cover a positive-mass decision unit.
struct CoverageError : Error {
    using Error::Error;
};

// The fair solver could not produce a feasible candidate. Accept-all is always
// feasible, so this indicates an internal defect, not a property of the input.
struct SolverError : Error {
    using Error::Error;
};

// Caller misuse: out-of-range argument, wrong regime, alpha off the boundary.
struct UsageError : Error {
    using Error::Error;
};

} // namespace fairlevel
