#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace scatterlab {

enum class ErrorKind {
  InvalidBox,
  TooCoarse,
  DomainError,
  OrderOutOfRange,
  SupportNotContained,
  InsufficientSamples,
  InvalidLame,
  CoincidentPoints,
  QuadratureNoConvergence,
  ShapeMismatch,
  PointSourceOnGridNode,
  SolverDiverged,
  NonContractive,
  ProblemTooLarge,
  SingularMatrix,
  RadiiInsideSupport,
  BandTooNarrow,
  OrderOutOfWindow,
  ConfigInvalid,
  FormatError,
  IoError,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Library-wide exception. Every failure carries a machine-checkable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace scatterlab
