#pragma once

#include <stdexcept>
#include <string>

namespace estavg {

/// Inputs outside an operation's domain (bad sizes, parameters, probabilities).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical procedure could not produce a trustworthy answer
/// (singular matrix, ill-conditioned system, exhausted iterations).
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An estimator could not be evaluated on a particular sample (non-convergent
/// fit, degenerate data). Bootstrap loops catch this and drop the replicate.
class FitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid experiment configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace estavg
