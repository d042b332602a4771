#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mixsing {

enum class ErrorKind {
  invalid_subdivision,
  unsupported_domain,
  invalid_sample,
  hypothesis_violation,
  invalid_order,
  grid_mismatch,
  degenerate_input,
  capacity_exceeded,
  outside_theory,
  nonconvergence,
  monotonicity_violation,
  scheme_fidelity,
  empty_input,
  measure_mismatch,
  increasing_profile,
  out_of_case,
  invalid_argument,
  config_error,
  io_error,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries a kind so the CLI can map it
/// onto an exit code without string matching.
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_subdivision: return "invalid-subdivision";
    case ErrorKind::unsupported_domain: return "unsupported-domain";
    case ErrorKind::invalid_sample: return "invalid-sample";
    case ErrorKind::hypothesis_violation: return "hypothesis-violation";
    case ErrorKind::invalid_order: return "invalid-order";
    case ErrorKind::grid_mismatch: return "grid-mismatch";
    case ErrorKind::degenerate_input: return "degenerate-input";
    case ErrorKind::capacity_exceeded: return "capacity-exceeded";
    case ErrorKind::outside_theory: return "outside-theory";
    case ErrorKind::nonconvergence: return "nonconvergence";
    case ErrorKind::monotonicity_violation: return "monotonicity-violation";
    case ErrorKind::scheme_fidelity: return "scheme-fidelity";
    case ErrorKind::empty_input: return "empty-input";
    case ErrorKind::measure_mismatch: return "measure-mismatch";
    case ErrorKind::increasing_profile: return "increasing-profile";
    case ErrorKind::out_of_case: return "out-of-case";
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::config_error: return "config-error";
    case ErrorKind::io_error: return "io-error";
  }
  return "unknown";
}

}  // namespace mixsing
