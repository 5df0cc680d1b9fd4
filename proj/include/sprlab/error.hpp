#pragma once

#include <stdexcept>
#include <string>

namespace sprlab {

// Malformed input: bad schema, violated case invariant, dimension mismatch.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The LP has no feasible point for the given load vector.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnboundedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Optimal partition or duals are not uniquely determined.
class DegenerateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Square system that should be invertible is not (disconnected network,
// invalid system pattern).
class SingularError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sprlab
