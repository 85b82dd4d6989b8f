#pragma once

#include <stdexcept>

namespace trajmine {

/// Precondition or argument violation on an API call.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed or unreadable input data. The message carries file/line context
/// where available.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Lookup of an author or paper id that is not present.
class NotFoundError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace trajmine
