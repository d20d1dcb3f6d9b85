#pragma once

// Newton solves of φ = A(φ, μ) and pseudo-arclength continuation of the
// nontrivial branch leaving a characteristic value.

#include "nekwave/linear_analysis.hpp"
#include "nekwave/operators.hpp"
#include "nekwave/series.hpp"
#include "nekwave/spectral.hpp"

#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

namespace nekwave {

struct NewtonOptions {
  double tol = 1e-11;
  int max_iters = 40;
  /// Extra iterations after reaching tol, kept only while they reduce ‖r‖.
  int polish = 2;
};

struct PointDiagnostics {
  double min_denominator = 0.0;
  double max_slope = 0.0;
  double positivity_defect = 0.0;
  int newton_iters = 0;
};

struct BranchPoint {
  double mu = 0.0;
  SineSeries phi = SineSeries::zero(1);
  /// ⟨Φ, sin nθ⟩/π of the branch mode.
  double amplitude = 0.0;
  double residual = 0.0;
  PointDiagnostics diagnostics;
  /// Arclength step that produced the point (0 for the first).
  double ds = 0.0;
};

enum class Termination { StepBudget, SlopeBound, DenominatorBreakdown, NewtonFailure };
std::string to_string(Termination t);

struct Branch {
  CharValue origin;
  int mode = 1;
  std::vector<BranchPoint> points;
  Termination termination = Termination::StepBudget;
  /// Number of step halvings after corrector failures.
  int halvings = 0;
  double mu_min = 0.0;
  double mu_max = 0.0;
};

/// Dense-grid evaluation on θ = πj/P, j = 0..P, of the cone conditions.
struct MonitorVerdict {
  double positivity_defect = 0.0;
  double phi_at_zero = 0.0;
  double phi_at_pi = 0.0;
  double max_slope = 0.0;
  bool in_cone = true;
  bool below_slope_bound = true;
};

constexpr double kSlopeBound = std::numbers::pi / 6.0;

/// `points` = 0 selects 8N.
MonitorVerdict krasovskii_monitor(const SineSeries& phi, std::size_t points = 0);
MonitorVerdict krasovskii_monitor(const BranchPoint& point, std::size_t points = 0);

/// Running [min, max] of μ over the accepted points of a branch.
class SpectrumBounds {
 public:
  void add(double mu);
  bool empty() const { return count_ == 0; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }

 private:
  std::size_t count_ = 0;
  double lo_ = 0.0;
  double hi_ = 0.0;
};

/// Damped Newton on r(Φ) = Φ − A(Φ, μ). `mode` selects the amplitude
/// coordinate recorded in the point.
BranchPoint newton_solve(const WaveProblem& problem, const SineSeries& phi0, double mu,
                         const NewtonOptions& options = {}, int mode = 1);

/// Solves for (Φ, μ) with the eigen-coefficient a_n held at `amplitude`.
BranchPoint solve_at_amplitude(const WaveProblem& problem, int mode, double amplitude, const SineSeries& guess,
                               double mu_guess, const NewtonOptions& options = {});

struct ContinuationOptions {
  double ds = 0.02;
  int max_steps = 200;
  double ds_min = 1e-7;
  double ds_max = 0.1;
  double grow = 1.3;
  /// Corrector iterations at or below which the step grows.
  int fast_iters = 3;
  int corrector_iters = 10;
  double slope_bound = kSlopeBound - 0.01;
  int series_order = 4;
  NewtonOptions newton;
  /// Monitor grid; 0 selects 8N.
  std::size_t monitor_points = 0;
};

Branch continue_branch(const WaveProblem& problem, int mode, const ContinuationOptions& options = {});

/// Newton from `starts` random small odd initial guesses (coefficient norm at
/// most `radius`); returns the distinct converged nontrivial solutions.
std::vector<SineSeries> multistart_solutions(const WaveProblem& problem, double mu, int starts, double radius,
                                             std::uint64_t seed = 20240601);

}  // namespace nekwave
