#pragma once

#include <stdexcept>
#include <string>

namespace modcd {

// Malformed or inconsistent input data (files, shapes, labels).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite values or a collapsed geometry during optimization.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace modcd
