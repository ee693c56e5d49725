#pragma once

#include <stdexcept>
#include <string>

namespace prcnn {

// Error taxonomy used across the library. The CLI maps usage/data/shape/
// parameter/format failures to exit code 2 and numeric failures to 3.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Incompatible tensor or layer dimensions.
struct shape_error : error {
    using error::error;
};

// Invalid argument value (p >= 1, T == 0, lo >= hi, ...).
struct parameter_error : error {
    using error::error;
};

// Bad input data: out-of-range labels, empty classes, empty datasets.
struct data_error : error {
    using error::error;
};

// Malformed or truncated files (bad magic, short read, unparseable CSV).
struct format_error : error {
    using error::error;
};

// Non-finite values where finite ones are required.
struct numeric_error : error {
    using error::error;
};

// API misuse: stale caches, calls out of contract.
struct usage_error : error {
    using error::error;
};

}  // namespace prcnn
