#pragma once

#include <stdexcept>
#include <string>

namespace greenmass {

// Two families, mirrored by the CLI exit codes: bad input (2) and numerical failure (3).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct InvalidSpec : ValidationError {
  explicit InvalidSpec(const std::string& m) : ValidationError("InvalidSpec: " + m) {}
};
struct NonPositiveDefinite : ValidationError {
  explicit NonPositiveDefinite(const std::string& m) : ValidationError("NonPositiveDefinite: " + m) {}
};
struct UnsupportedModel : ValidationError {
  explicit UnsupportedModel(const std::string& m) : ValidationError("UnsupportedModel: " + m) {}
};
struct OutOfRange : ValidationError {
  explicit OutOfRange(const std::string& m) : ValidationError("OutOfRange: " + m) {}
};
struct PreconditionError : ValidationError {
  explicit PreconditionError(const std::string& m) : ValidationError("PreconditionError: " + m) {}
};
struct UnboundedInput : ValidationError {
  explicit UnboundedInput(const std::string& m) : ValidationError("UnboundedInput: " + m) {}
};

struct NoConvergence : NumericalError {
  NoConvergence(const std::string& m, double res)
      : NumericalError("NoConvergence: " + m), residual(res) {}
  double residual;
};
struct ShellUnresolved : NumericalError {
  explicit ShellUnresolved(const std::string& m) : NumericalError("ShellUnresolved: " + m) {}
};
struct DegenerateGradient : NumericalError {
  explicit DegenerateGradient(const std::string& m) : NumericalError("DegenerateGradient: " + m) {}
};
struct InconsistentForms : NumericalError {
  explicit InconsistentForms(const std::string& m) : NumericalError("InconsistentForms: " + m) {}
};
struct IllConditionedFit : NumericalError {
  explicit IllConditionedFit(const std::string& m) : NumericalError("IllConditionedFit: " + m) {}
};

}  // namespace greenmass
