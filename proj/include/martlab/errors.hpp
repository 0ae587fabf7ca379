// errors.hpp - error categories shared across modules.
#pragma once

#include <stdexcept>
#include <string>

namespace martlab {

// Requested operation is outside a model's exact capabilities (caller should
// fall back to Monte Carlo or a smaller parameter).
class CapabilityError : public std::runtime_error {
 public:
  explicit CapabilityError(const std::string& what) : std::runtime_error(what) {}
};

// A checker precondition failed (e.g. a sequence is not subadditive).
class PreconditionError : public std::runtime_error {
 public:
  explicit PreconditionError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace martlab
