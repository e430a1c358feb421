#pragma once

#include <stdexcept>
#include <string>

namespace impdiff {

// Base class for everything thrown by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Two multi-indices (or a grid and a tensor) disagree about the dimension q.
class DimensionError : public Error {
public:
    using Error::Error;
};

// A precondition on an argument was violated (k out of range, |n| >= 1, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

// Text could not be parsed; `position` is a 0-based offset into the input.
class ParseError : public Error {
public:
    ParseError(const std::string& msg, std::size_t position)
        : Error(msg + " (at position " + std::to_string(position) + ")"),
          position(position) {}
    std::size_t position;
};

// Evaluation left the domain of an expression (log of a nonpositive value,
// division by zero, ...).
class EvalDomainError : public Error {
public:
    using Error::Error;
};

// Grid nodes on one axis are closer than the coincidence tolerance.
class CoincidentNodesError : public Error {
public:
    using Error::Error;
};

// Two y-values inside one bar-form divided difference coincide. This signals
// a confluent configuration, which is unsupported.
class DuplicateYError : public Error {
public:
    using Error::Error;
};

// A quotient denominator fell below the singularity guard; the message
// carries the offending bracket.
class SingularError : public Error {
public:
    using Error::Error;
};

// Root finding failed (no bracket sign change and Newton did not converge).
class SolveError : public Error {
public:
    using Error::Error;
};

// A supplied (x, y) pair does not satisfy g(x, y) ~= 0.
class InconsistentPointError : public Error {
public:
    using Error::Error;
};

} // namespace impdiff
