#pragma once

#include <stdexcept>
#include <string>

namespace tripmode {

// Failure categories map one-to-one onto CLI exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input layout: missing columns, unknown tags, bad JSON shape.
class SchemaError : public Error {
public:
    using Error::Error;
};

/// Parameters that violate a documented constraint.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Input content that cannot be processed (degenerate trips, empty series, ...).
class DataError : public Error {
public:
    using Error::Error;
};

}  // namespace tripmode
