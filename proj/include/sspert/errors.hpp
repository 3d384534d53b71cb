#pragma once

#include <stdexcept>
#include <string>

namespace sspert {

/// Broad failure class; the CLI maps each kind onto its exit code.
enum class ErrorKind { validation, numerical };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Bad input: parameters, states, orders, config files.
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& what)
        : Error(ErrorKind::validation, what) {}
};

/// A computation produced a non-finite or otherwise unusable value.
class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& what)
        : Error(ErrorKind::numerical, what) {}
};

/// A nonzero exponential rate so close to zero that 1/rate is meaningless.
class DegenerateRateError : public NumericalError {
public:
    explicit DegenerateRateError(const std::string& what) : NumericalError(what) {}
};

/// The linear coefficient of the order-by-order solve vanished.
class SingularBracketError : public NumericalError {
public:
    explicit SingularBracketError(const std::string& what) : NumericalError(what) {}
};

class RootNotBracketedError : public NumericalError {
public:
    explicit RootNotBracketedError(const std::string& what) : NumericalError(what) {}
};

}  // namespace sspert
