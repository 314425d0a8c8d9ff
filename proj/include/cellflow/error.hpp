#pragma once

#include <stdexcept>
#include <string>

namespace cellflow {

enum class ErrorCode {
  InvalidInput,      // malformed files, bad parameters
  InsufficientData,  // MSD filters left nothing to fit
  BoundaryContact,   // Dirichlet square touching the outer domain boundary
  NonConvergence,    // Laplace relaxation hit its sweep cap
  Numerical,         // non-finite values during curve evolution
  Degenerate,        // curve or ledger collapsed (all segments disappeared, ...)
  Internal,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace cellflow
