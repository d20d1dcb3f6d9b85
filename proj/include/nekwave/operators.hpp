#pragma once

// Kernels and the nonlinear integral operators: Nekrasov's slope-angle
// equation, Krasovskii's conjugate-exponential form, and a polynomial
// Hammerstein operator, all evaluated as Fourier multipliers on sine
// coefficients.

#include "nekwave/spectral.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace nekwave {

/// ln|(1 − cos(ε−θ)) / (1 − cos(ε+θ))|, acting as the multiplier 1/(3n) once
/// paired with the −μ/(12π) prefactor.
struct LogDifference {};

/// Σ sin nε sin nθ / μₙ with explicit positive, increasing μₙ.
struct FourierDiagonal {
  std::vector<double> charvals;
};

/// Fourier-diagonal kernel with μₙ = 3n·coth(2πnh/L).
struct FiniteDepthFourier {
  double depth;
  double wavelength;
  std::size_t terms;
};

class Kernel {
 public:
  using Variant = std::variant<LogDifference, FourierDiagonal, FiniteDepthFourier>;

  static Kernel log_difference();
  static Kernel fourier_diagonal(std::vector<double> charvals);
  static Kernel finite_depth(double depth, double wavelength, std::size_t terms);
  /// K₁ of the conjugate-exponential equation: μₙ = πn/2.
  static Kernel krasovskii(std::size_t terms);

  const Variant& variant() const { return v_; }
  std::string name() const;

  /// First n_max characteristic values, ascending.
  std::vector<double> characteristic_values(std::size_t n_max) const;

 private:
  explicit Kernel(Variant v) : v_(std::move(v)) {}
  Variant v_;
};

/// Pointwise kernel value. LogDifference is exact; the Fourier kernels are
/// summed over their stored terms.
double kernel_eval(const Kernel& kernel, double eps, double theta);

std::vector<double> characteristic_values(const Kernel& kernel, std::size_t n_max);

enum class Nonlinearity { Nekrasov, Krasovskii, Hammerstein };

std::string to_string(Nonlinearity n);

struct WaveProblem {
  Kernel kernel = Kernel::log_difference();
  Nonlinearity nonlinearity = Nonlinearity::Nekrasov;
  /// f(u) = Σ c_p u^p, p = 0.. (Hammerstein only).
  std::vector<double> polynomial;
  double mu = 0.0;
  std::size_t modes = 32;
  /// Working grid; 0 selects 4N.
  std::size_t grid = 0;
  /// Smallest admissible 1 + μ∫₀^ε sin Φ.
  double denominator_guard = 1e-10;

  static WaveProblem nekrasov(std::size_t modes, double mu = 3.0,
                              Kernel kernel = Kernel::log_difference());
  static WaveProblem krasovskii(std::size_t modes, double mu = 1.0);
  static WaveProblem hammerstein(std::size_t modes, std::vector<double> polynomial,
                                 double mu = 1.0, Kernel kernel = Kernel::log_difference());

  std::size_t working_grid() const;
  /// Lowest power m ≥ 2 with a nonzero coefficient in the expansion of the
  /// integrand about Φ = 0.
  int leading_order() const;
};

/// A = μBφ + C(φ, μ) + D(φ, μ) with C homogeneous of degree k.
struct OperatorSplit {
  Eigen::MatrixXd B;
  int k = 2;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&, double)> C;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&, double)> D;
};

/// μ split as base + offset so residuals near a characteristic value keep the
/// offset's digits.
struct Parameter {
  double base = 0.0;
  double offset = 0.0;
  double value() const { return base + offset; }
};

/// Discretised operator bound to one problem. Immutable; thread-safe.
class WaveOperator {
 public:
  explicit WaveOperator(WaveProblem problem);

  const WaveProblem& problem() const { return problem_; }
  const SpectralPlan& plan() const { return *plan_; }
  std::size_t modes() const { return problem_.modes; }

  /// Bₙₙ of the Fréchet derivative at 0 (μ factored out).
  const Eigen::VectorXd& linear_diagonal() const { return linear_; }
  /// 1/Bₙₙ where Bₙₙ ≠ 0, +inf otherwise.
  const Eigen::VectorXd& charvals() const { return charvals_; }

  Eigen::VectorXd apply(const Eigen::VectorXd& a, double mu) const;
  /// A(Φ, μ) − μBΦ, formed from the integrand's nonlinear remainder.
  Eigen::VectorXd nonlinear_part(const Eigen::VectorXd& a, double mu) const;
  /// Degree-k homogeneous leading term C(Φ, μ).
  Eigen::VectorXd leading_part(const Eigen::VectorXd& a, double mu) const;
  /// Φ − A(Φ, μ).
  Eigen::VectorXd residual(const Eigen::VectorXd& a, Parameter mu) const;
  Eigen::VectorXd residual(const Eigen::VectorXd& a, double mu) const {
    return residual(a, Parameter{mu, 0.0});
  }
  /// ∂A/∂a.
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& a, double mu) const;
  /// ∂A/∂μ.
  Eigen::VectorXd mu_derivative(const Eigen::VectorXd& a, double mu) const;

  /// Integrand on the working grid (sin Φ / w, e^{3Ψ} sin Φ, or f(u)).
  Eigen::VectorXd integrand(const Eigen::VectorXd& a, double mu) const;
  /// min_j w(θ_j); +inf for operators without a denominator.
  double min_denominator(const Eigen::VectorXd& a, double mu) const;

  /// Power-series composition: given Φ = Σ t^k Φ_k and μ = Σ t^k μ_k, returns
  /// the coefficients of A(Φ, μ) in t through `order`.
  std::vector<Eigen::VectorXd> apply_series(const std::vector<Eigen::VectorXd>& phi,
                                            const std::vector<double>& mu, int order) const;

 private:
  struct NekrasovState;
  NekrasovState nekrasov_state(const Eigen::VectorXd& a, double mu) const;
  Eigen::VectorXd multiply(const Eigen::VectorXd& grid_values, double mu) const;
  Eigen::VectorXd conj_exponent(const Eigen::VectorXd& a) const;

  WaveProblem problem_;
  std::shared_ptr<const SpectralPlan> plan_;
  Eigen::VectorXd weight_;    // output multiplier per mode
  Eigen::VectorXd linear_;    // Bₙₙ
  Eigen::VectorXd charvals_;  // 1/Bₙₙ
};

SineSeries apply_nekrasov(const WaveProblem& problem, const SineSeries& phi);
SineSeries apply_krasovskii(const WaveProblem& problem, const SineSeries& phi);
SineSeries apply_hammerstein(const WaveProblem& problem, const SineSeries& u);
/// Dispatches on the problem's nonlinearity.
SineSeries apply_operator(const WaveProblem& problem, const SineSeries& phi);

OperatorSplit linearize(const WaveProblem& problem);

}  // namespace nekwave
