#pragma once

#include <stdexcept>
#include <string>

namespace ubr {

/// Base class for everything thrown by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid parameter values or violated preconditions (CLI exit code 1).
class ParameterError : public Error {
public:
    using Error::Error;
};

/// Malformed input: config files, WAV headers, CSV (CLI exit code 1).
class ParseError : public Error {
public:
    using Error::Error;
};

/// Structurally valid input the library chooses not to handle,
/// e.g. compressed WAV codecs or unusual bit depths.
class UnsupportedFormatError : public ParseError {
public:
    using ParseError::ParseError;
};

/// Filesystem trouble: missing files, failed writes (CLI exit code 2).
class IoError : public Error {
public:
    using Error::Error;
};

/// Analysis could not produce a result, e.g. an empty fit band (CLI exit code 3).
class AnalysisError : public Error {
public:
    using Error::Error;
};

} // namespace ubr
