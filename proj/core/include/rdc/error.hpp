#pragma once

#include <stdexcept>
#include <string>

namespace rdc {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Negative probabilities or mass that does not sum to one.
class InvalidDistribution : public Error {
 public:
  using Error::Error;
};

class UnknownAxis : public Error {
 public:
  using Error::Error;
};

/// Malformed scenario, strategy, or solver input.
class InputError : public Error {
 public:
  using Error::Error;
};

}  // namespace rdc
