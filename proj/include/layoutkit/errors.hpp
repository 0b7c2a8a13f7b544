#pragma once

#include <stdexcept>
#include <string>

namespace layoutkit {

// Root of the toolkit error hierarchy. The CLI maps ValidationError to
// exit code 2 and NetworkError to exit code 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class NetworkError : public Error {
 public:
  using Error::Error;
};

}  // namespace layoutkit
