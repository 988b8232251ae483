#pragma once

#include <stdexcept>
#include <string>

namespace timflow {

/// Malformed input document (bad syntax, missing keys, wrong types).
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

/// Structurally valid input that violates a domain invariant.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// Flow relaxation failed to converge within the iteration budget.
class FlowError : public std::runtime_error {
public:
    explicit FlowError(const std::string& what) : std::runtime_error(what) {}
};

/// An optimization trial aborted (objective failure, bad state).
class TrialError : public std::runtime_error {
public:
    explicit TrialError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace timflow
