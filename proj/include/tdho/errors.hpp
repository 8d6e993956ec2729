#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace tdho {

/// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the region where a function or profile is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A frequency profile was sampled exactly on one of its delta impulses.
class EvalAtImpulse : public Error {
 public:
  explicit EvalAtImpulse(double t)
      : Error("omega^2 evaluated on an impulse at t=" + std::to_string(t)), time(t) {}
  double time;
};

class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t pos, std::vector<std::string> expected_tokens, const std::string& detail);
  std::size_t position;
  std::vector<std::string> expected;
};

class UnknownIdentifier : public Error {
 public:
  UnknownIdentifier(std::string ident, std::size_t pos)
      : Error("unknown identifier '" + ident + "' at offset " + std::to_string(pos)),
        name(std::move(ident)),
        position(pos) {}
  std::string name;
  std::size_t position;
};

/// Expression evaluation produced inf or NaN.
class NonFinite : public Error {
 public:
  NonFinite(double t_value, std::string subexpr)
      : Error("non-finite value of '" + subexpr + "' at t=" + std::to_string(t_value)),
        t(t_value),
        subexpression(std::move(subexpr)) {}
  double t;
  std::string subexpression;
};

/// The ODE integrator could not meet its tolerance.
class StepFailure : public Error {
 public:
  using Error::Error;
};

/// The classical solution f vanishes inside the requested window.
class CausticInWindow : public Error {
 public:
  explicit CausticInWindow(double t_zero_estimate)
      : Error("classical solution vanishes inside the window near t=" +
              std::to_string(t_zero_estimate)),
        t_zero(t_zero_estimate) {}
  double t_zero;
};

/// v(t_b) is numerically zero: the endpoints are conjugate points.
class CausticAtEndpoint : public Error {
 public:
  explicit CausticAtEndpoint(double v_b)
      : Error("endpoint caustic, v(t_b)=" + std::to_string(v_b)), v_end(v_b) {}
  double v_end;
};

class SolutionMismatch : public Error {
 public:
  using Error::Error;
};

class DegenerateSolution : public Error {
 public:
  using Error::Error;
};

class GridTooNarrow : public Error {
 public:
  using Error::Error;
};

class GridMismatch : public Error {
 public:
  using Error::Error;
};

/// Invalid experiment configuration; `path` is a JSON path such as "$.profile".
class ConfigError : public Error {
 public:
  ConfigError(std::string json_path, const std::string& what)
      : Error(json_path + ": " + what), path(std::move(json_path)) {}
  std::string path;
};

}  // namespace tdho
