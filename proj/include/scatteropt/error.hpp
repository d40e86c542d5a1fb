#pragma once

#include <stdexcept>
#include <string>

namespace scatteropt {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input data could not be ingested (bad file, column, or values).
class DataError : public Error {
public:
    using Error::Error;
};

class DuplicateError : public Error {
public:
    using Error::Error;
};

class NotFoundError : public Error {
public:
    using Error::Error;
};

/// A caller-supplied argument (range, grid value, shape) is invalid.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

}  // namespace scatteropt
