#pragma once

#include <stdexcept>
#include <string>

namespace eyeaffect {

/// Bad caller-supplied argument (out-of-range parameter, mismatched lengths).
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed or inconsistent input data: parse, range, sequencing, alignment,
/// catalog and shape failures all land here.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Training diverged or a metric was undefined for the given data.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace eyeaffect
