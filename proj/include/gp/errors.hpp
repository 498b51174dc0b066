#pragma once

#include <stdexcept>
#include <string>

namespace gp {

/// Bad experiment configuration: unknown fields, invalid values, unknown
/// primitive ids. Maps to CLI exit code 1.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Problem loading a data file (non-numeric cell, ragged row, missing label
/// column). Carries row/column context in the message. Exit code 1.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A structurally invalid tree reached an operation that requires a valid
/// one. This is a construction-time bug, never a runtime data condition.
struct MalformedTreeError : std::logic_error {
    using std::logic_error::logic_error;
};

/// API misuse by a caller (empty batch, mismatched repetition counts).
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace gp
