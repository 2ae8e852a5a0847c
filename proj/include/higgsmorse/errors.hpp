#pragma once

#include <stdexcept>
#include <string>

namespace higgsmorse {

/// Bad input: violated precondition or unparseable argument. CLI exit 2.
struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Flow failure: step underflow or loss of positive definiteness. CLI exit 3.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Two independent computations disagree. CLI exit 4.
struct ConsistencyError : std::logic_error {
  using std::logic_error::logic_error;
};

inline void require(bool ok, const std::string &what) {
  if (!ok) throw ValidationError(what);
}

} // namespace higgsmorse
