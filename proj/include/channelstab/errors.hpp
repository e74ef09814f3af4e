#pragma once

#include <stdexcept>
#include <string>

namespace cstab {

enum class ErrorKind {
  InvalidArgument,
  Config,
  Convergence,
  UnsupportedMode,
  Numeric,
  Defective,
  LemmaViolation,
  Invertibility,
  GammaSelection,
  WellPosedness,
  ScanExhausted,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what, double value = 0.0)
      : std::runtime_error(what), kind_(kind), value_(value) {}
  ErrorKind kind() const { return kind_; }
  // residual, abscissa or condition number attached by the raising site
  double value() const { return value_; }

 private:
  ErrorKind kind_;
  double value_;
};

const char* to_string(ErrorKind kind);

}  // namespace cstab
