#pragma once

#include <stdexcept>
#include <string>

namespace cascade_guard {

/// Out-of-range or inconsistent argument to an operation.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed dataset or config file.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Labels do not fit the query kind (e.g. multiclass labels on a PT query).
class InvalidTaskError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Misuse of a stateful object (stepping a finite-population test past N).
class StateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Experiment config that cannot be executed as written.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace cascade_guard
