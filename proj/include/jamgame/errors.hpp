#pragma once

#include <stdexcept>
#include <string>

namespace jamgame {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A precondition on an argument was violated.
class DomainError : public Error {
 public:
  using Error::Error;
};

// A monotone root search has no sign change on its bracket.
class NoRootError : public Error {
 public:
  using Error::Error;
};

// Covariance failed the positive-definiteness floor during whitening.
class NotSpdError : public Error {
 public:
  using Error::Error;
};

class UnsupportedError : public Error {
 public:
  using Error::Error;
};

namespace detail {

inline void require(bool ok, const std::string& what) {
  if (!ok) throw DomainError(what);
}

}  // namespace detail
}  // namespace jamgame
