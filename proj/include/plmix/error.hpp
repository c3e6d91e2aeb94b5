#pragma once

#include <stdexcept>
#include <string>

namespace plmix {

// Base of every error raised by the library. The CLI maps each subclass to a
// distinct exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input data, parameters, or hyperparameters.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Non-finite likelihoods, degenerate conditionals, empty components.
class NumericalError : public Error {
 public:
  using Error::Error;
};

namespace detail {

template <class E = ValidationError>
inline void require(bool cond, const std::string& message) {
  if (!cond) throw E(message);
}

}  // namespace detail
}  // namespace plmix
