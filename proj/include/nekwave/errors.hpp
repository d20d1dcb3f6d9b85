#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nekwave {

/// Base class for every typed failure raised by the solver suite.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class GridTooSmall : public Error {
 public:
  GridTooSmall(std::size_t grid, std::size_t modes);
  std::size_t grid_size;
  std::size_t mode_count;
};

class ModeCountTooLarge : public Error {
 public:
  ModeCountTooLarge(std::size_t modes, std::size_t grid);
  std::size_t mode_count;
  std::size_t grid_size;
};

class DomainViolation : public Error {
 public:
  DomainViolation(const std::string& what, std::size_t index);
  std::size_t index;
};

class SingularPoint : public Error {
 public:
  SingularPoint(double eps, double theta);
};

/// w(ε) = 1 + μ∫₀^ε sin Φ dropped below the guard on the working grid.
class DenominatorVanished : public Error {
 public:
  DenominatorVanished(double min_w, std::size_t index);
  double min_denominator;
  std::size_t index;
};

class OverflowGuard : public Error {
 public:
  explicit OverflowGuard(double max_exponent);
  double max_exponent;
};

class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, int iteration_budget);
  int iteration_budget;
};

class IncompatibleSingularSystem : public Error {
 public:
  IncompatibleSingularSystem(double mu, double projection);
  double mu;
  double projection;
};

class SolvabilityFailure : public Error {
 public:
  SolvabilityFailure(int order, const std::string& detail);
  int order;
};

class OrderTooHigh : public Error {
 public:
  OrderTooHigh(int order, int mode, std::size_t modes);
};

class ComplementNewtonDiverged : public Error {
 public:
  ComplementNewtonDiverged(int iterations, double residual);
  int iterations;
  double residual;
};

class FitIllConditioned : public Error {
 public:
  explicit FitIllConditioned(double condition);
  double condition;
};

class NewtonDiverged : public Error {
 public:
  NewtonDiverged(int iterations, double residual);
  int iterations;
  double residual;
};

class PreconditionViolated : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace nekwave
