#pragma once

#include <stdexcept>
#include <string>

namespace npc {

// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input: bad shapes, out-of-range parameters, invalid names.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

// Well-formed input outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

}  // namespace npc
