#pragma once

#include <stdexcept>
#include <string>

namespace memesim {

/// Invalid parameters or configuration (CLI exit code 1).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or empty input data (CLI exit code 1).
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Correlation undefined because one variable is constant.
class UndefinedCorrelation : public DomainError {
public:
    using DomainError::DomainError;
};

/// Not enough tail data to report a power-law fit (CLI exit code 3).
class FitUnavailable : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A simulation failed to reach steady state within its step cap.
class SteadyStateNotReached : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace memesim
