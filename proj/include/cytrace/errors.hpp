#pragma once

#include <stdexcept>

namespace cytrace {

// Incompatible shapes: frames of different sizes, feature/weight length mismatch.
struct DimensionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Domain invariant violated: bad config values, inconsistent lineage data.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed file content; the message names the offending field.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace cytrace
