#pragma once

#include <stdexcept>
#include <string>

namespace treefree {

// Base class for all library errors.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input (bad letters, non-bijective permutations,
// missing moments, insufficient truncation depth, ...).  CLI exit code 2.
struct validation_error : error {
    using error::error;
};

// Depth of a truncation is too small for the requested computation.  A
// subclass of validation_error so generic handlers treat it as bad input,
// but distinguishable where callers want to retry with a deeper ball.
struct depth_error : validation_error {
    using validation_error::validation_error;
};

// Numerical failure: fixed-point non-convergence, inconsistent quadrature
// refinement, indefinite Hankel matrix.  CLI exit code 3.
struct numeric_error : error {
    using error::error;
};

// Explicit resource guard tripped (partition ground set too large, product
// space dimension above the cap).  CLI exit code 4.
struct size_limit_error : error {
    using error::error;
};

} // namespace treefree
