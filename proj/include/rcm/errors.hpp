#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace rcm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A value was requested outside the region a field is defined on.
class RegionError : public Error {
 public:
  using Error::Error;
};

/// Invalid parameters or configuration (bad law, inadmissible exponents, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// An iterative solve stopped at its iteration cap.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, int iterations, double residual)
      : Error(what), iterations_(iterations), residual_(residual) {}

  int iterations() const { return iterations_; }
  double residual() const { return residual_; }

 private:
  int iterations_;
  double residual_;
};

/// A function handed to an estimate check is not harmonic where it must be.
class PreconditionError : public Error {
 public:
  PreconditionError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}

  double residual() const { return residual_; }

 private:
  double residual_;
};

/// Random walk exceeded its event budget.
class SimulationError : public Error {
 public:
  SimulationError(const std::string& what, std::uint64_t events)
      : Error(what), events_(events) {}

  std::uint64_t events() const { return events_; }

 private:
  std::uint64_t events_;
};

}  // namespace rcm
