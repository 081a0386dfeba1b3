#pragma once

#include <stdexcept>
#include <string>

namespace bws {

/// Root of every error thrown by the library. The CLI maps the concrete
/// subclass onto its exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad or inconsistent configuration (dimension mismatches, unknown keys,
/// missing model or palette files).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A caller broke a documented precondition.
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Input data that cannot be processed: unreadable images, empty bags,
/// single-class training sets.
class DataError : public Error {
 public:
  using Error::Error;
};

class IoError : public DataError {
 public:
  using DataError::DataError;
};

class EmptyLesionError : public DataError {
 public:
  using DataError::DataError;
};

class EmptyBagError : public DataError {
 public:
  using DataError::DataError;
};

/// Every cardinality combination is forbidden for the requested bag label.
class InfeasibleError : public DataError {
 public:
  using DataError::DataError;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ContractError(message);
}

}  // namespace bws
