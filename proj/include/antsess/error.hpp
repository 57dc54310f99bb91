#pragma once

#include <stdexcept>
#include <string>

namespace antsess {

// Bad input data or an unreadable source. The CLI maps this to exit code 3.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration value. The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnreadableSource : public InputError {
 public:
  using InputError::InputError;
};

class EmptyInput : public InputError {
 public:
  using InputError::InputError;
};

class EmptyCatalog : public InputError {
 public:
  using InputError::InputError;
};

class CatalogMismatch : public InputError {
 public:
  using InputError::InputError;
};

class InfeasibleModel : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

}  // namespace antsess
