#pragma once

#include <stdexcept>
#include <string>

namespace ske {

// Base for all library errors. The CLI maps invalid_input to exit code 1
// and everything else to exit code 2.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Input validation failures (bad flags, malformed files, broken invariants
// of user-supplied data).
struct invalid_input : error {
    using error::error;
};

// Ideal is not m-primary (missing pure power on some axis).
struct not_primary : invalid_input {
    using invalid_input::invalid_input;
};

// Discrete convexity check failed for a radial function.
struct not_convex : invalid_input {
    using invalid_input::invalid_input;
};

// Two radial objects live on different grids.
struct grid_mismatch : invalid_input {
    using invalid_input::invalid_input;
};

// A measure that must be (close to) a probability measure is not.
struct not_probability : invalid_input {
    using invalid_input::invalid_input;
};

// exp-integral diverged where a finite value was required.
struct divergent_integral : error {
    using error::error;
};

// Length-oracle leading-coefficient fit drifted across windows.
struct fit_unstable : error {
    using error::error;
};

// Regression r^2 below the documented threshold.
struct poor_fit : error {
    using error::error;
};

// Iterative search hit its cap before reaching the requested tolerance.
struct tolerance_not_reached : error {
    using error::error;
};

// Bisection bracket never produced a supercritical observable.
struct bracket_failure : error {
    using error::error;
};

// Profile bound chain came out lower > upper.
struct inconsistent_profile : error {
    using error::error;
};

// Valuation weight with non-positive log discrepancy.
struct non_log_terminal_weight : invalid_input {
    using invalid_input::invalid_input;
};

} // namespace ske
