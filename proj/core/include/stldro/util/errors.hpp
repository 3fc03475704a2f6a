#pragma once

#include <stdexcept>
#include <string>

namespace stldro {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid argument values (dimensions, ranges, missing data).
class InvalidArgumentError : public Error {
 public:
  using Error::Error;
};

}  // namespace stldro
