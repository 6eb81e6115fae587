#pragma once

#include <stdexcept>
#include <string>

namespace attrition {

// Exit-code families used by the command line front end.
enum class ErrorKind { validation = 2, regime = 3, numerical = 4 };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

class InvalidGame : public Error {
 public:
  explicit InvalidGame(const std::string& reason) : Error(ErrorKind::validation, "invalid game: " + reason) {}
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& reason) : Error(ErrorKind::validation, "parse error: " + reason) {}
};

class AtomOutOfRange : public Error {
 public:
  explicit AtomOutOfRange(const std::string& reason) : Error(ErrorKind::validation, "atom out of range: " + reason) {}
};

class EmptyInput : public Error {
 public:
  explicit EmptyInput(const std::string& reason) : Error(ErrorKind::validation, "empty input: " + reason) {}
};

class RegimeMismatch : public Error {
 public:
  explicit RegimeMismatch(const std::string& reason) : Error(ErrorKind::regime, "regime mismatch: " + reason) {}
};

class NoBenefitRegion : public Error {
 public:
  explicit NoBenefitRegion(const std::string& reason) : Error(ErrorKind::regime, "no benefit region: " + reason) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error(ErrorKind::numerical, what) {}
};

// Finite-time escape of a reputation ODE; when() is the escape time.
class Blowup : public NumericalError {
 public:
  explicit Blowup(double t_star)
      : NumericalError("trajectory escapes at t = " + std::to_string(t_star)), t_star_(t_star) {}
  double when() const { return t_star_; }

 private:
  double t_star_;
};

// Trajectory leaves (0,1] without a finite-time escape.
class ReputationExit : public NumericalError {
 public:
  ReputationExit(double t_exit, double value)
      : NumericalError("reputation leaves (0,1] (value " + std::to_string(value) + ")"), t_exit_(t_exit) {}
  double when() const { return t_exit_; }

 private:
  double t_exit_;
};

class Unreachable : public NumericalError {
 public:
  explicit Unreachable(const std::string& why) : NumericalError("unreachable: " + why) {}
};

class DomainError : public NumericalError {
 public:
  explicit DomainError(const std::string& why) : NumericalError("outside domain: " + why) {}
};

class QuadratureFailure : public NumericalError {
 public:
  explicit QuadratureFailure(const std::string& why) : NumericalError("quadrature failed: " + why) {}
};

class BracketingFailure : public NumericalError {
 public:
  explicit BracketingFailure(const std::string& why) : NumericalError("bracketing failed: " + why) {}
};

class ConvergenceFailure : public NumericalError {
 public:
  explicit ConvergenceFailure(const std::string& why) : NumericalError("no convergence: " + why) {}
};

}  // namespace attrition
