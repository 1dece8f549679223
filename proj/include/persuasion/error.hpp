#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace persuasion {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid run configuration or command-line usage.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Unreadable, malformed or inconsistent input data.
class DataError : public Error {
 public:
  using Error::Error;

  /// Formats "<source>:<line>: <message>".
  static DataError at(const std::string& source, std::size_t line,
                      const std::string& message) {
    return DataError(source + ":" + std::to_string(line) + ": " + message);
  }
};

/// Training produced a non-finite loss.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

/// Two artifacts disagree on the technique vocabulary.
class VocabularyMismatch : public Error {
 public:
  using Error::Error;
};

}  // namespace persuasion
