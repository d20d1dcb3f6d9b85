#pragma once

#include "nekwave/operators.hpp"
#include "nekwave/spectral.hpp"

#include <Eigen/Dense>

#include <vector>

namespace nekwave {

struct LinearTolerances {
  /// Relative width of a characteristic-value cluster.
  double cluster = 1e-8;
  /// Singular-value threshold below which I − μB is treated as singular.
  double singular = 1e-8;
  /// Largest eigen-component of a right-hand side accepted at a singular μ.
  double orthogonal = 1e-10;
};

/// μ* with Bφ = φ/μ* nontrivially solvable.
struct CharValue {
  double mu = 0.0;
  int multiplicity = 1;
  /// Orthonormal in coefficient space.
  std::vector<SineSeries> eigenfunctions;
  /// Odd multiplicity: a bifurcation point is guaranteed. Even multiplicity is
  /// only a candidate.
  bool guaranteed = true;
};

/// The n_max smallest positive characteristic values of B, ascending, with
/// multiplicities counted by clustering.
std::vector<CharValue> char_values(const Eigen::MatrixXd& B, std::size_t n_max,
                                   const LinearTolerances& tol = {});

/// Solves (I − μB)x = rhs. At a characteristic μ the right-hand side must be
/// orthogonal to the eigenspace and the minimal-norm solution is returned.
Eigen::VectorXd fredholm_solve(const Eigen::MatrixXd& B, double mu, const Eigen::VectorXd& rhs,
                               const LinearTolerances& tol = {});
SineSeries fredholm_solve(const Eigen::MatrixXd& B, double mu, const SineSeries& rhs,
                          const LinearTolerances& tol = {});

/// Characteristic values in the open interval (lo, hi), located by counting
/// eigenvalue crossings of I − μB on a uniform scan.
std::vector<CharValue> detect_bifurcations(const WaveProblem& problem, double lo, double hi,
                                           int scan_steps, const LinearTolerances& tol = {});
std::vector<CharValue> detect_bifurcations(const Eigen::MatrixXd& B, double lo, double hi,
                                           int scan_steps, const LinearTolerances& tol = {});

}  // namespace nekwave
