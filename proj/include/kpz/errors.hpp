#pragma once

#include <stdexcept>
#include <string>

namespace kpz {

// Invalid input: bad probe data, out-of-range times, mismatched sizes.
class DomainError : public std::invalid_argument {
public:
    explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

// Numerical failure: non-convergence, non-finite values, log of a
// non-positive field value.  Messages carry enough context to locate
// the failing quantity.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// Query lands on a shock line where the characteristic foot is not
// unique.  Carries both candidate feet so callers can report them.
class OnShockError : public NumericError {
public:
    OnShockError(const std::string& what, double foot_left, double foot_right)
        : NumericError(what), foot_left(foot_left), foot_right(foot_right) {}
    double foot_left;
    double foot_right;
};

// Corridor ensemble violates the merge discipline (overlapping atoms
// with distinct velocities away from an event time).
class MalformedEnsembleError : public DomainError {
public:
    explicit MalformedEnsembleError(const std::string& what) : DomainError(what) {}
};

} // namespace kpz
