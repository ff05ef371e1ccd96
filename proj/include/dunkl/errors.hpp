#pragma once

#include <stdexcept>
#include <string>

namespace dunkl {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Invalid input: unknown family, bad multiplicities, empty cone, etc.
class DomainError : public Error {
public:
  using Error::Error;
};

/// A numerical procedure failed: non-convergence, step underflow, NaN, overflow.
class NumericError : public Error {
public:
  using Error::Error;
};

/// Reading or writing a file failed.
class IoError : public Error {
public:
  using Error::Error;
};

} // namespace dunkl
