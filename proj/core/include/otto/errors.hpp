#pragma once

#include <stdexcept>
#include <string>

namespace otto {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A value outside its documented domain (nonpositive frequency, s outside [0,1], ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Thermal population left in the highest retained Fock level is too large.
class TruncationError : public Error {
 public:
  TruncationError(const std::string& what, double tail)
      : Error(what), tail_(tail) {}
  double tail() const noexcept { return tail_; }

 private:
  double tail_;
};

/// Input that should be a positive-semidefinite operator is not.
class NotPositiveSemidefinite : public Error {
 public:
  NotPositiveSemidefinite(const std::string& what, double min_eigenvalue)
      : Error(what), min_eigenvalue_(min_eigenvalue) {}
  double min_eigenvalue() const noexcept { return min_eigenvalue_; }

 private:
  double min_eigenvalue_;
};

/// The counter-diabatic effective frequency became imaginary (omega_dot^2 >= 4 omega^4).
class TrapInversion : public Error {
 public:
  TrapInversion(double t, double omega, double omega_dot);
  double time() const noexcept { return t_; }
  double omega() const noexcept { return omega_; }
  double omega_dot() const noexcept { return omega_dot_; }

 private:
  double t_;
  double omega_;
  double omega_dot_;
};

/// The shortcut-to-equilibrium schedule diverges (Boltzmann factor too close to 1).
class ParameterBlowUp : public Error {
 public:
  using Error::Error;
};

/// Numerical diagnostics of a propagation exceeded their tolerance.
class PropagationError : public Error {
 public:
  PropagationError(const std::string& what, double time)
      : Error(what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

/// Wraps a failure inside one stroke of an engine cycle.
class StrokeError : public Error {
 public:
  StrokeError(const std::string& stroke, const std::string& cause)
      : Error("stroke " + stroke + ": " + cause), stroke_(stroke) {}
  const std::string& stroke() const noexcept { return stroke_; }

 private:
  std::string stroke_;
};

/// Malformed or out-of-domain run configuration.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, int line = 0, std::string key = {})
      : Error(what), line_(line), key_(std::move(key)) {}
  int line() const noexcept { return line_; }
  const std::string& key() const noexcept { return key_; }

 private:
  int line_;
  std::string key_;
};

}  // namespace otto
