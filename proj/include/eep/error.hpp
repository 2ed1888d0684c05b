#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace eep {

enum class ErrorCode {
  invalid_parameter,
  classification_undefined,
  integration_failure,
  no_orbit_found,
  blowup,
  no_solution,
  not_a_branch,
  resonance,
  undefined_ratio,
  singular_amplitude,
  no_stationary_state,
  degenerate_parameters,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_parameter: return "invalid-parameter";
    case ErrorCode::classification_undefined: return "classification-undefined";
    case ErrorCode::integration_failure: return "integration-failure";
    case ErrorCode::no_orbit_found: return "no-orbit-found";
    case ErrorCode::blowup: return "blowup";
    case ErrorCode::no_solution: return "no-solution";
    case ErrorCode::not_a_branch: return "not-a-branch";
    case ErrorCode::resonance: return "resonance";
    case ErrorCode::undefined_ratio: return "undefined-ratio";
    case ErrorCode::singular_amplitude: return "singular-amplitude";
    case ErrorCode::no_stationary_state: return "no-stationary-state";
    case ErrorCode::degenerate_parameters: return "degenerate-parameters";
  }
  return "unknown";
}

/// Domain error raised by every module. The code is stable and is what the
/// CLI reports in its machine-readable error output.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace eep
