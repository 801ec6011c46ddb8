#pragma once

#include <stdexcept>
#include <string>

namespace bscap {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Caller handed in a value outside the operation's domain.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

// Gamma = 1: the open-circuit load has no finite normalized impedance.
class OpenCircuit : public InvalidArgument {
public:
    OpenCircuit() : InvalidArgument("reflection coefficient 1 is an open circuit (infinite impedance)") {}
};

// A numerical procedure failed even though its inputs were valid.
class NumericalError : public Error {
public:
    using Error::Error;
};

class IntegrationError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

inline void require(bool condition, const std::string& message) {
    if (!condition) throw InvalidArgument(message);
}

} // namespace bscap
