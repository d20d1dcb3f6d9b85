#pragma once

// Small-amplitude branches: the recurrent power series in the parameter
// offset, and the scalar branching function obtained by splitting off the
// eigen-direction.

#include "nekwave/operators.hpp"
#include "nekwave/spectral.hpp"

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace nekwave {

/// Φ(λ) = Σ_k t^k Φ_k with μ = μ* + σ t^q, so t = λ for a transcritical
/// crossing (q = 1) and t = √(λ/σ) for a pitchfork (q = 2).
struct SeriesBranch {
  int mode = 1;
  double mu_star = 0.0;
  int order = 0;
  int exponent = 1;   // q
  double sigma = 1.0;  // ±1
  /// Φ_1..Φ_K; Φ_k = C_k sin nθ + ψ_k with ψ_k free of sin nθ.
  std::vector<SineSeries> terms;
  /// C_1..C_K.
  std::vector<double> constants;
  /// Per order, the coefficients of the solvability polynomial that fixed C_k:
  /// (β, γ) with βC + γC^{q+1} for k = 1, (a, b, c) with a + bC + cC² after.
  std::vector<std::vector<double>> solvability;

  /// Series variable t for a parameter offset λ.
  double t_of(double lambda) const;
  SineSeries evaluate(double lambda) const;
  /// dΦ/dt.
  SineSeries derivative_t(double t) const;
  SineSeries evaluate_t(double t) const;
  /// Eigen-component ⟨Φ, sin nθ⟩/π = Σ C_k t^k.
  double amplitude(double lambda) const;
  double mu(double lambda) const { return mu_star + lambda; }
};

/// The order-k right-hand side of the recurrent system: the t^k coefficient of
/// A(Σ_{j<k} t^j Φ_j, Σ t^j μ_j). `terms` holds Φ_1..Φ_{k−1}.
Eigen::VectorXd recurrence_rhs(const WaveOperator& op, const std::vector<Eigen::VectorXd>& terms,
                               const std::vector<double>& mu_series, int k);

SeriesBranch nekrasov_nazarov_series(const WaveProblem& problem, int mode, int order);

struct ResidualSweep {
  std::vector<double> lambda;
  std::vector<double> residual;
  /// Least-squares slope of log residual against log λ.
  double slope = 0.0;
  /// (K+1)/q.
  double expected = 0.0;
};

ResidualSweep residual_sweep(const WaveProblem& problem, const SeriesBranch& branch,
                             const std::vector<double>& lambdas);

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

struct BranchingOptions {
  /// Bound on |α| and |λ|.
  double radius = 0.5;
  int scan_intervals = 64;
  int max_newton = 40;
};

struct BranchingSample {
  double alpha = 0.0;
  double lambda = 0.0;
  double F = 0.0;
  SineSeries psi = SineSeries::zero(1);
  int iterations = 0;
};

/// Branching function of one mode: F(α, λ) = ⟨φ − A(φ, μ* + λ), e_n⟩ with
/// φ = α e_n + ψ and ψ solving the complement equation.
class BranchingFunction {
 public:
  BranchingFunction(const WaveProblem& problem, int mode, BranchingOptions options = {});

  BranchingSample operator()(double alpha, double lambda) const;
  /// Nonzero root of F(·, λ) in |α| ≤ radius nearest to 0, or nearest to the
  /// sign of `prefer` when given. Empty if no bracket is found.
  std::optional<double> root(double lambda, std::optional<double> prefer = std::nullopt) const;

  double mu_star() const { return mu_star_; }
  int mode() const { return mode_; }
  const WaveOperator& op() const { return op_; }
  const BranchingOptions& options() const { return options_; }

 private:
  double reduced(double alpha, double lambda) const;

  WaveOperator op_;
  int mode_;
  double mu_star_;
  BranchingOptions options_;
};

BranchingSample lyapunov_schmidt_reduce(const WaveProblem& problem, int mode, double alpha, double lambda,
                                        const BranchingOptions& options = {});

struct EquivalenceOptions {
  /// Sampling half-width in the series variable t.
  double halfwidth = 0.02;
  /// Fit degree = order + extra_degree.
  int extra_degree = 6;
  /// Sample count; 0 selects 2·degree + 2.
  int samples = 0;
  /// Added to C_2 before comparing (fault injection).
  double perturb_c2 = 0.0;
  BranchingOptions branching;
};

struct EquivalenceReport {
  int order = 0;
  int degree = 0;
  double condition = 0.0;
  std::vector<double> series;
  std::vector<double> fitted;
  /// |fitted − series| / |series| per order.
  std::vector<double> discrepancy;
  double max_discrepancy = 0.0;
  std::vector<double> t;
  std::vector<double> alpha;
};

EquivalenceReport equivalence_check(const WaveProblem& problem, int mode, int order,
                                    const EquivalenceOptions& options = {});
EquivalenceReport equivalence_check(const WaveProblem& problem, const SeriesBranch& branch,
                                    const EquivalenceOptions& options = {});

}  // namespace nekwave
