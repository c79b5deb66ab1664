#pragma once

#include <stdexcept>
#include <string>

namespace oretile {

/// An input violates an operation's precondition or hypothesis.
struct PreconditionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A search ran out of its node budget before reaching a verdict.
struct BudgetExhausted : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A proved inequality or structural property failed on a concrete instance.
struct LemmaViolation : std::logic_error {
    using std::logic_error::logic_error;
};

} // namespace oretile
