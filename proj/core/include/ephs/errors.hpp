#pragma once

#include <stdexcept>
#include <string>

namespace ephs {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A referenced symbol has no binding during expression evaluation.
class UnboundSymbolError : public Error {
public:
    explicit UnboundSymbolError(const std::string& symbol)
        : Error("unbound symbol '" + symbol + "'"), symbol(symbol)
    {
    }
    std::string symbol;
};

/// Evaluation left the domain of a partial operation (division by zero,
/// log of a non-positive value, zero temperature, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A model cannot be lowered to an explicit vector field.
class NotSimulableError : public Error {
public:
    using Error::Error;
};

} // namespace ephs
