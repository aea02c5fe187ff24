#ifndef ADDBO_ERRORS_HPP
#define ADDBO_ERRORS_HPP
#pragma once

#include <stdexcept>
#include <string>

namespace addbo {

/// Operand dimensions disagree with what an operation requires.
class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Cholesky factorization failed even at the largest jitter in the schedule.
class SingularityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A documented precondition (e.g. a nonempty dataset) does not hold.
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class InitializationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace addbo

#endif  // ADDBO_ERRORS_HPP
