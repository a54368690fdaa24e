#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace garma {

// Extended precision for implementation forms and recursion state. High-order
// partial fractions carry residues far above unity and cancel heavily.
using Real = long double;
using Complex = std::complex<Real>;

/// Base for errors surfaced to callers. `exit_code` follows the CLI contract:
/// 2 input/config error, 3 stability refusal, 1 internal error.
class Error : public std::runtime_error {
 public:
  Error(const std::string& what, int exit_code) : std::runtime_error(what), exit_code_(exit_code) {}
  int exit_code() const noexcept { return exit_code_; }

 private:
  int exit_code_;
};

class InputError : public Error {
 public:
  explicit InputError(const std::string& what) : Error(what, 2) {}
};

class DesignError : public Error {
 public:
  DesignError(const std::string& stage, const std::string& what)
      : Error("design failed at " + stage + ": " + what, 2), stage_(stage) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

class StabilityError : public Error {
 public:
  explicit StabilityError(const std::string& what) : Error(what, 3) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error(what, 1) {}
};

}  // namespace garma
