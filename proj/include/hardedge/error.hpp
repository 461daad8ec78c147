#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hardedge {

enum class ErrorCode {
  // potential
  EmptyPotential,
  NotUniformlyConvex,
  OutOfDomain,
  QuadratureFailure,
  // hamiltonian
  NonPositiveEntry,
  NoMinimizer,
  LineSearchStall,
  NonConvergence,
  Overflow,
  TooLarge,
  IndexOutOfBulk,
  InvalidParameters,
  // sampler
  NonPositiveParameter,
  WrongPotential,
  AdaptationFailure,
  FormatError,
  // spectra
  NonFinite,
  NoConvergence,
  GridTooCoarse,
  DoubleRescale,
  // harness
  Empty,
  InsufficientReplicas,
  ConfigError,
};

std::string_view to_string(ErrorCode code);

/// Failure category used by the CLI to pick an exit status.
enum class ErrorCategory { Config, Numerical };

ErrorCategory category_of(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  ErrorCategory category() const noexcept { return category_of(code_); }

 private:
  ErrorCode code_;
};

}  // namespace hardedge
