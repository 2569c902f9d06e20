#pragma once

#include <stdexcept>
#include <string>

namespace mrplan {

// Malformed input: parse failures, broken tree invariants, bad parameters.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The mission or a genotype cannot be executed (unservable action,
// cross-schedule deadlock).
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A configured resource bound was exceeded (decomposition hard cap).
class ResourceCapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mrplan
