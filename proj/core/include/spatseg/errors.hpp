#pragma once

#include <stdexcept>
#include <string>

namespace spatseg {

// Base class for library-specific failures. Precondition violations use
// std::invalid_argument / std::domain_error directly.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed or unusable input data (CSV parse failures, missing files,
// integrity-check mismatches). Maps to CLI exit code 3.
struct data_error : error {
    using error::error;
};

// Numerical breakdown: non-SPD matrices after the jitter ladder, overflow,
// ill-conditioned systems. Carries a human-readable condition report.
// Maps to CLI exit code 4.
struct numerical_error : error {
    using error::error;
};

// Iterative scheme stopped before reaching its tolerance; the message
// carries the final residuals / best value seen.
struct convergence_error : numerical_error {
    using numerical_error::numerical_error;
};

// Geometry that admits no valid answer (e.g. all sites collinear when a
// 2-D tessellation is required).
struct degenerate_geometry : error {
    using error::error;
};

} // namespace spatseg
