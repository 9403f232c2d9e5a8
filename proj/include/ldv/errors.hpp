#pragma once

#include <stdexcept>
#include <string>

namespace ldv {

/// Base class for all errors thrown by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A configuration value violates its documented range or relation.
class InvalidConfigError : public Error {
public:
    using Error::Error;
};

/// An input series or parameter is unusable for the requested operation.
class InvalidInputError : public Error {
public:
    using Error::Error;
};

/// A motion profile fails validation (empty, negative amplitude, ...).
class InvalidProfileError : public Error {
public:
    using Error::Error;
};

/// A sample rate is too low for the signal content it must carry.
class SamplingViolationError : public Error {
public:
    using Error::Error;
};

/// A filter specification cannot be met at a reasonable tap count.
class DesignFailureError : public Error {
public:
    using Error::Error;
};

/// File I/O failed; message carries the offending path.
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace ldv
