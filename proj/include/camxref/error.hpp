#pragma once

#include <stdexcept>
#include <string>

namespace camxref {

// Bad input content: malformed rows, invariant violations, infeasible specs.
// CLI maps this to exit code 1.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Missing/unreadable/unwritable files. CLI maps this to exit code 2.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace camxref
