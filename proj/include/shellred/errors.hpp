#pragma once

#include <stdexcept>
#include <string>

namespace shellred {

enum class ErrorKind {
  DegenerateChart,
  GridTooSmall,
  OrientationViolation,
  NonPositiveDeterminant,
  StepCollapsed,
  InadmissibleThickness,
  InadmissibleInitialState,
  Config,
};

const char* error_kind_name(ErrorKind k);

class ShellError : public std::runtime_error {
 public:
  ShellError(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// Carries the offending grid node (and through-thickness coordinate when known).
class OrientationViolation : public ShellError {
 public:
  OrientationViolation(int i, int j, double x1, double x2, double x3, const std::string& what)
      : ShellError(ErrorKind::OrientationViolation, what), i(i), j(j), x1(x1), x2(x2), x3(x3) {}
  int i, j;
  double x1, x2, x3;
};

}  // namespace shellred
