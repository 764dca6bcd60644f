#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace shoutcomp {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid data or a broken invariant (bad dimensions, duplicate ids, ...).
struct ValidationError : Error {
  using Error::Error;
};

/// File and serialization problems.
struct IoError : Error {
  using Error::Error;
};

/// Numerical failure (non-finite result, singular system, ...).
struct NumericError : Error {
  using Error::Error;
};

inline void warn(const std::string& message) {
  std::fprintf(stderr, "warning: %s\n", message.c_str());
}

namespace detail {

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ValidationError(message);
}

}  // namespace detail
}  // namespace shoutcomp
