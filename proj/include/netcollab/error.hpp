#pragma once

#include <stdexcept>
#include <string>

namespace netcollab {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed text input; the message names the offending line.
class ParseError : public Error {
public:
    using Error::Error;
};

/// A parameter lies outside its mathematical domain (p > 1, odd ring degree, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class RangeError : public Error {
public:
    using Error::Error;
};

/// Budgets or settings that cannot produce a valid run.
class ConfigError : public Error {
public:
    using Error::Error;
};

class StateError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace netcollab
