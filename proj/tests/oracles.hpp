#pragma once

// Reference computations for the tests. Nothing here touches the library's
// transform tables: functions are evaluated pointwise from their coefficients
// and integrated with plain quadrature.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

constexpr double pi = std::numbers::pi;

inline double sine_sum(const Eigen::VectorXd& a, double x) {
  double s = 0.0;
  for (Eigen::Index n = 0; n < a.size(); ++n) s += a[n] * std::sin(static_cast<double>(n + 1) * x);
  return s;
}

inline double sine_sum_derivative(const Eigen::VectorXd& a, double x) {
  double s = 0.0;
  for (Eigen::Index n = 0; n < a.size(); ++n) {
    const double k = static_cast<double>(n + 1);
    s += k * a[n] * std::cos(k * x);
  }
  return s;
}

// 16-point Gauss–Legendre on [-1, 1].
struct Gauss16 {
  std::array<double, 16> x{}, w{};
  Gauss16() {
    const int n = 16;
    for (int i = 0; i < n; ++i) {
      double z = std::cos(pi * (i + 0.75) / (n + 0.5));
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = z;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        const double dp = n * (z * p1 - p0) / (z * z - 1.0);
        const double dz = p1 / dp;
        z -= dz;
        if (std::abs(dz) < 1e-16) break;
      }
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double dp = n * (z * p1 - p0) / (z * z - 1.0);
      x[i] = z;
      w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
  }
};

inline const Gauss16& gauss16() {
  static const Gauss16 g;
  return g;
}

inline double gauss(const std::function<double(double)>& f, double lo, double hi) {
  const auto& g = gauss16();
  const double c = 0.5 * (lo + hi), r = 0.5 * (hi - lo);
  double s = 0.0;
  for (int i = 0; i < 16; ++i) s += g.w[i] * f(c + r * g.x[i]);
  return s * r;
}

// Composite Gauss on [lo, hi] with geometric refinement towards both ends,
// for integrands with logarithmic endpoint singularities. Refinement stops
// once a piece is too thin to resolve in double precision.
inline double graded(const std::function<double(double)>& f, double lo, double hi, int levels = 40) {
  if (!(hi > lo)) return 0.0;
  const double floor = 1e-10 * std::max(1.0, std::max(std::abs(lo), std::abs(hi)));
  double s = 0.0;
  double a = 0.5 * (lo + hi);
  for (int l = 0; l < levels && hi - a > floor; ++l) {
    const double cut = hi - 0.2 * (hi - a);
    s += gauss(f, a, cut);
    a = cut;
  }
  s += gauss(f, a, hi);
  double b = 0.5 * (lo + hi);
  for (int l = 0; l < levels && b - lo > floor; ++l) {
    const double cut = lo + 0.2 * (b - lo);
    s += gauss(f, cut, b);
    b = cut;
  }
  s += gauss(f, lo, b);
  return s;
}

// ∫₀^ε Σ aₙ sin nα dα by the trapezoid rule with `points` nodes and the
// Euler–Maclaurin endpoint correction h²/12 (f'(0) − f'(ε)).
inline double trapezoid_cumulative(const Eigen::VectorXd& a, double eps, int points = 100000) {
  const int n = points - 1;
  const double h = eps / n;
  double s = 0.5 * (sine_sum(a, 0.0) + sine_sum(a, eps));
  for (int j = 1; j < n; ++j) s += sine_sum(a, j * h);
  s *= h;
  s -= h * h / 12.0 * (sine_sum_derivative(a, eps) - sine_sum_derivative(a, 0.0));
  return s;
}

// Truncated Fourier series of the log-difference kernel.
inline double log_kernel_series(double eps, double theta, int terms) {
  double s = 0.0;
  for (int n = terms; n >= 1; --n) s += std::sin(n * eps) * std::sin(n * theta) / n;
  return -4.0 * s;
}

inline double log_kernel(double eps, double theta) {
  // 1 − cos x = 2 sin²(x/2) avoids cancellation near the diagonal.
  const double num = std::sin(0.5 * (eps - theta)), den = std::sin(0.5 * (eps + theta));
  return 2.0 * std::log(std::abs(num / den));
}

// Nekrasov's equation evaluated directly:
//   A(θ) = −μ/(6π) ∫₀^π K(ε, θ) sin Φ(ε) / (1 + μ ∫₀^ε sin Φ) dε,
// the inner integral by Gauss on [0, ε], the outer by graded quadrature split
// at the kernel singularity.
inline double nekrasov_direct(const Eigen::VectorXd& a, double mu, double theta) {
  auto inner = [&](double eps) {
    const int pieces = 4;
    double s = 0.0;
    for (int p = 0; p < pieces; ++p)
      s += gauss([&](double x) { return std::sin(sine_sum(a, x)); }, eps * p / pieces, eps * (p + 1) / pieces);
    return s;
  };
  auto integrand = [&](double eps) {
    const double g = std::sin(sine_sum(a, eps)) / (1.0 + mu * inner(eps));
    return log_kernel(eps, theta) * g;
  };
  double s = 0.0;
  if (theta > 0.0) s += graded(integrand, 0.0, theta);
  if (theta < pi) s += graded(integrand, theta, pi);
  return -mu / (6.0 * pi) * s;
}

// Sine coefficients (1/π)∫₀^{2π} f(θ) sin nθ dθ by the periodic trapezoid rule.
inline Eigen::VectorXd sine_coefficients(const std::function<double(double)>& f, int modes, int points = 4096) {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(modes);
  for (int j = 0; j < points; ++j) {
    const double t = 2.0 * pi * j / points;
    const double v = f(t);
    for (int n = 1; n <= modes; ++n) c[n - 1] += v * std::sin(n * t);
  }
  return c * (2.0 / points);
}

}  // namespace oracle
