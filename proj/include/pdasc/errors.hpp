#pragma once

#include <stdexcept>
#include <string>

namespace pdasc {

// Base class of every error thrown by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Argument sizes or values violate an operation's contract.
class DimensionError : public Error {
  using Error::Error;
};

// A restricted Gram matrix Psi_A^t Psi_A lost positive definiteness.
// column() is the operator column whose pivot failed (-1 if unknown).
class RankDeficientError : public Error {
 public:
  RankDeficientError(const std::string& what, int column)
      : Error(what), column_(column) {}
  int column() const noexcept { return column_; }

 private:
  int column_;
};

// The requested computation exceeds a hard resource budget.
class UnsupportedError : public Error {
  using Error::Error;
};

// No continuation step satisfied the configured selection rule.
class SelectionFailedError : public Error {
  using Error::Error;
};

// Malformed configuration file or command line.
class ConfigError : public Error {
  using Error::Error;
};

}  // namespace pdasc
