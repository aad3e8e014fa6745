#pragma once

#include <stdexcept>
#include <string>

namespace okselect {

// Error taxonomy used across the library. All errors carry a message that
// names the offending quantity; callers catch by category.

struct InvalidInput : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct Unsupported : std::logic_error {
    using std::logic_error::logic_error;
};

struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct StateCorruption : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace okselect
