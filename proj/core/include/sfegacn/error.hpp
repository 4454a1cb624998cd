#pragma once

#include <stdexcept>
#include <string>

namespace sfegacn {

// Base of every error the library throws. The CLI maps each subclass to a
// distinct exit code (see tools/).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid parameter values, missing labels, unreadable config files.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Matrix / network dimension mismatches.
class ShapeError : public Error {
public:
    using Error::Error;
};

// Malformed input data: CSV cells, schema mismatches, model containers.
class DataError : public Error {
public:
    using Error::Error;
};

// Non-finite losses or divergent training.
class NumericError : public Error {
public:
    using Error::Error;
};

// Filesystem failures.
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace sfegacn
