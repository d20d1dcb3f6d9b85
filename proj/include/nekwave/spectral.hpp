#pragma once

// Representations of 2π-periodic functions: odd sine series, their conjugate
// cosine series, and uniform-grid samples, with exact transforms between them.

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>

namespace nekwave {

/// sin(2π k / m), folded so that sin_turn(m - k, m) == -sin_turn(k, m) and the
/// zeros at k ≡ 0 and k ≡ m/2 are exact.
double sin_turn(std::int64_t k, std::int64_t m);
inline double cos_turn(std::int64_t k, std::int64_t m) {
  // cos x = sin(x + π/2); exact quarter shift needs m % 4 == 0.
  if (m % 4 == 0) return sin_turn(k + m / 4, m);
  return sin_turn(2 * k + m / 2, 2 * m);
}

/// Σ aₙ sin nθ, n = 1..N. Odd and 2π-periodic by construction.
class SineSeries {
 public:
  explicit SineSeries(Eigen::VectorXd coeffs);

  static SineSeries zero(std::size_t modes);
  /// amplitude · sin(k θ) carried in a basis of `modes` terms.
  static SineSeries mode(std::size_t modes, std::size_t k, double amplitude = 1.0);

  std::size_t modes() const { return static_cast<std::size_t>(coeffs_.size()); }
  const Eigen::VectorXd& coeffs() const { return coeffs_; }
  /// aₙ, 1-based.
  double coeff(std::size_t n) const { return coeffs_[static_cast<Eigen::Index>(n - 1)]; }

  double operator()(double theta) const;
  /// Φ(π j / P) with the sine arguments reduced exactly, so j = 0 and j = P give 0.
  double at_half_turn_fraction(std::int64_t j, std::int64_t p) const;

  /// Same function expressed in a basis of `modes` terms (zero padded or truncated).
  SineSeries resized(std::size_t modes) const;

  SineSeries& operator+=(const SineSeries& o);
  SineSeries& operator-=(const SineSeries& o);
  SineSeries& operator*=(double s);

  friend SineSeries operator+(SineSeries a, const SineSeries& b) { return a += b; }
  friend SineSeries operator-(SineSeries a, const SineSeries& b) { return a -= b; }
  friend SineSeries operator*(SineSeries a, double s) { return a *= s; }
  friend SineSeries operator*(double s, SineSeries a) { return a *= s; }

 private:
  Eigen::VectorXd coeffs_;
};

/// mean + Σ bₙ cos nθ.
struct CosineSeries {
  double mean = 0.0;
  Eigen::VectorXd coeffs;

  double operator()(double theta) const;
};

/// Samples on θ_j = 2πj/M, j = 0..M-1.
class GridFunction {
 public:
  explicit GridFunction(Eigen::VectorXd values);

  std::size_t size() const { return static_cast<std::size_t>(values_.size()); }
  const Eigen::VectorXd& values() const { return values_; }
  double theta(std::size_t j) const;

 private:
  Eigen::VectorXd values_;
};

GridFunction to_grid(const SineSeries& s, std::size_t grid);
GridFunction to_grid(const CosineSeries& c, std::size_t grid);
SineSeries from_grid(const GridFunction& g, std::size_t modes);

/// ∫₀^ε Σ aₙ sin nα dα = Σ (aₙ/n)(1 − cos nε).
CosineSeries cumulative_integral(const SineSeries& s);

/// sin nθ ↦ −cos nθ, zero mean.
CosineSeries conjugate(const SineSeries& s);
/// cos nθ ↦ sin nθ; the mean must vanish.
SineSeries conjugate(const CosineSeries& c);

enum class PointwiseMap { Sin, Exp3, Reciprocal };
GridFunction pointwise_map(const GridFunction& g, PointwiseMap f);

/// sin x − x without cancellation for small |x|.
double sin_minus_identity(double x);

/// Precomputed transform tables for a fixed (N, M) pair. Immutable after
/// construction; every nonlinear operator evaluation goes through one of these.
class SpectralPlan {
 public:
  SpectralPlan(std::size_t modes, std::size_t grid);

  std::size_t modes() const { return modes_; }
  std::size_t grid() const { return grid_; }
  /// Modes resolved on the grid, M/2 − 1.
  std::size_t inner_modes() const { return grid_ / 2 - 1; }

  /// M×N, sin(nθ_j).
  const Eigen::MatrixXd& synth_sin() const { return synth_sin_; }
  /// M×N, cos(nθ_j).
  const Eigen::MatrixXd& synth_cos() const { return synth_cos_; }
  /// N×M, (2/M) sin(nθ_j): grid values to the first N sine coefficients.
  const Eigen::MatrixXd& analysis() const { return analysis_; }
  /// M×M: grid values of an odd function to grid values of its antiderivative
  /// from 0, through all M/2 − 1 resolved modes.
  const Eigen::MatrixXd& cumulative() const { return cumulative_; }

  Eigen::VectorXd sin_values(const Eigen::VectorXd& a) const { return synth_sin_ * a; }
  Eigen::VectorXd conj_values(const Eigen::VectorXd& a) const { return -(synth_cos_ * a); }
  Eigen::VectorXd analyse(const Eigen::VectorXd& v) const { return analysis_ * v; }

 private:
  std::size_t modes_;
  std::size_t grid_;
  Eigen::MatrixXd synth_sin_;
  Eigen::MatrixXd synth_cos_;
  Eigen::MatrixXd analysis_;
  Eigen::MatrixXd cumulative_;
};

}  // namespace nekwave
