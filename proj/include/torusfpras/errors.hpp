#pragma once

#include <stdexcept>
#include <string>

namespace torusfpras {

// A precondition or input-data violation: malformed instances, non-unitary
// gates, inconsistent tensor shapes, out-of-range configuration values.
class validation_error : public std::invalid_argument {
 public:
  explicit validation_error(const std::string& what) : std::invalid_argument(what) {}
};

// A resource limit was hit: the per-point shot budget exceeded its cap, or a
// problem dimension exceeded a hard size guard.
class resource_limit_error : public std::runtime_error {
 public:
  explicit resource_limit_error(const std::string& what) : std::runtime_error(what) {}
};

// A numerical stage failed to deliver its contract: the SDP did not converge
// within its iteration cap, or minimizer extraction produced off-torus atoms.
class numerical_error : public std::runtime_error {
 public:
  explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace torusfpras
