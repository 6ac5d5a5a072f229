#pragma once

#include <stdexcept>
#include <string>

namespace boxrel {

// Requested parameters fall outside the regime the theory covers
// (delta <= 1/2, below the recovery threshold of the relaxation).
class unsupported_regime : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// An iterative routine failed to produce a certified result
// (bracket growth exhausted, no sign change, aggregate failure).
class numerical_failure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace boxrel
