#include "nekwave/errors.hpp"

#include <sstream>

namespace nekwave {
namespace {

template <typename... Args>
std::string cat(const Args&... args) {
  std::ostringstream os;
  os.precision(17);
  (os << ... << args);
  return os.str();
}

}  // namespace

GridTooSmall::GridTooSmall(std::size_t grid, std::size_t modes)
    : Error(cat("grid of ", grid, " points cannot carry ", modes,
                " sine modes (need at least 2N+2)")),
      grid_size(grid),
      mode_count(modes) {}

ModeCountTooLarge::ModeCountTooLarge(std::size_t modes, std::size_t grid)
    : Error(cat(modes, " sine modes requested from a grid of ", grid,
                " points (at most M/2-1)")),
      mode_count(modes),
      grid_size(grid) {}

DomainViolation::DomainViolation(const std::string& what, std::size_t idx)
    : Error(cat(what, " at grid index ", idx)), index(idx) {}

SingularPoint::SingularPoint(double eps, double theta)
    : Error(cat("log-difference kernel is singular at (", eps, ", ", theta,
                ")")) {}

DenominatorVanished::DenominatorVanished(double min_w, std::size_t idx)
    : Error(cat("denominator 1 + mu*int sin(Phi) fell to ", min_w,
                " at grid index ", idx)),
      min_denominator(min_w),
      index(idx) {}

OverflowGuard::OverflowGuard(double max_exponent)
    : Error(cat("exponent 3*Psi reached ", max_exponent)),
      max_exponent(max_exponent) {}

NonConvergence::NonConvergence(const std::string& what, int budget)
    : Error(cat(what, " did not converge within ", budget, " iterations")),
      iteration_budget(budget) {}

IncompatibleSingularSystem::IncompatibleSingularSystem(double m, double p)
    : Error(cat("mu = ", m,
                " is characteristic and the right-hand side has eigen-"
                "component ",
                p)),
      mu(m),
      projection(p) {}

SolvabilityFailure::SolvabilityFailure(int k, const std::string& detail)
    : Error(cat("no real solvability constant at order ", k, ": ", detail)),
      order(k) {}

OrderTooHigh::OrderTooHigh(int order, int mode, std::size_t modes)
    : Error(cat("series order ", order, " at mode ", mode,
                " needs more than the ", modes, " available sine modes")) {}

ComplementNewtonDiverged::ComplementNewtonDiverged(int it, double res)
    : Error(cat("complement Newton stalled after ", it,
                " iterations, residual ", res)),
      iterations(it),
      residual(res) {}

FitIllConditioned::FitIllConditioned(double cond)
    : Error(cat("branching-curve fit design matrix has condition ", cond)),
      condition(cond) {}

NewtonDiverged::NewtonDiverged(int it, double res)
    : Error(cat("Newton failed after ", it, " iterations, residual ", res)),
      iterations(it),
      residual(res) {}

}  // namespace nekwave
