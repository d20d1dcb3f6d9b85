#include "nekwave/operators.hpp"

#include "nekwave/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace nekwave {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kMaxExponent = 700.0;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

using Series = std::vector<Eigen::ArrayXd>;

// Truncated power-series arithmetic in a scalar parameter, with grid-valued
// coefficients.

Series series_mul(const Series& x, const Series& y, int order) {
  Series z(order + 1, Eigen::ArrayXd::Zero(x[0].size()));
  for (int k = 0; k <= order; ++k)
    for (int j = 0; j <= k; ++j) z[k] += x[j] * y[k - j];
  return z;
}

Series series_scale(const std::vector<double>& m, const Series& y, int order) {
  Series z(order + 1, Eigen::ArrayXd::Zero(y[0].size()));
  for (int k = 0; k <= order; ++k)
    for (int j = 0; j <= k; ++j)
      if (m[j] != 0.0) z[k] += m[j] * y[k - j];
  return z;
}

void series_sincos(const Series& u, int order, Series& s, Series& c) {
  const auto m = u[0].size();
  s.assign(order + 1, Eigen::ArrayXd::Zero(m));
  c.assign(order + 1, Eigen::ArrayXd::Zero(m));
  s[0] = u[0].sin();
  c[0] = u[0].cos();
  for (int k = 1; k <= order; ++k) {
    for (int j = 1; j <= k; ++j) {
      s[k] += static_cast<double>(j) * u[j] * c[k - j];
      c[k] -= static_cast<double>(j) * u[j] * s[k - j];
    }
    s[k] /= static_cast<double>(k);
    c[k] /= static_cast<double>(k);
  }
}

Series series_exp(const Series& u, int order) {
  Series e(order + 1, Eigen::ArrayXd::Zero(u[0].size()));
  e[0] = u[0].exp();
  for (int k = 1; k <= order; ++k) {
    for (int j = 1; j <= k; ++j) e[k] += static_cast<double>(j) * u[j] * e[k - j];
    e[k] /= static_cast<double>(k);
  }
  return e;
}

Series series_recip(const Series& w, int order) {
  Series r(order + 1, Eigen::ArrayXd::Zero(w[0].size()));
  r[0] = w[0].inverse();
  for (int k = 1; k <= order; ++k) {
    for (int j = 1; j <= k; ++j) r[k] -= w[j] * r[k - j];
    r[k] *= r[0];
  }
  return r;
}

double polynomial_value(const std::vector<double>& c, double u, std::size_t from) {
  double v = 0.0;
  for (std::size_t p = c.size(); p-- > from;) v = v * u + c[p];
  for (std::size_t p = 0; p < from; ++p) v *= u;
  return v;
}

double polynomial_derivative(const std::vector<double>& c, double u) {
  double v = 0.0;
  for (std::size_t p = c.size(); p-- > 1;) v = v * u + static_cast<double>(p) * c[p];
  return v;
}

}  // namespace

// ---------------------------------------------------------------------------
// Kernel

Kernel Kernel::log_difference() { return Kernel(LogDifference{}); }

Kernel Kernel::fourier_diagonal(std::vector<double> charvals) {
  if (charvals.empty()) throw PreconditionViolated("Fourier-diagonal kernel needs characteristic values");
  for (std::size_t i = 0; i < charvals.size(); ++i) {
    if (!(charvals[i] > 0.0) || !std::isfinite(charvals[i]))
      throw PreconditionViolated("characteristic values must be positive and finite");
    if (i > 0 && !(charvals[i] > charvals[i - 1]))
      throw PreconditionViolated("characteristic values must be strictly increasing");
  }
  return Kernel(FourierDiagonal{std::move(charvals)});
}

Kernel Kernel::finite_depth(double depth, double wavelength, std::size_t terms) {
  if (!(depth > 0.0) || !(wavelength > 0.0) || !std::isfinite(depth) || !std::isfinite(wavelength))
    throw PreconditionViolated("finite depth needs h > 0 and L > 0");
  if (terms < 1) throw PreconditionViolated("finite depth kernel needs at least one term");
  return Kernel(FiniteDepthFourier{depth, wavelength, terms});
}

Kernel Kernel::krasovskii(std::size_t terms) {
  std::vector<double> v(terms);
  for (std::size_t n = 1; n <= terms; ++n) v[n - 1] = kPi * static_cast<double>(n) / 2.0;
  return fourier_diagonal(std::move(v));
}

std::string Kernel::name() const {
  return std::visit(overloaded{[](const LogDifference&) { return std::string("log-difference"); },
                               [](const FourierDiagonal&) { return std::string("fourier-diagonal"); },
                               [](const FiniteDepthFourier&) { return std::string("finite-depth"); }},
                    v_);
}

std::vector<double> Kernel::characteristic_values(std::size_t n_max) const {
  std::vector<double> out(n_max);
  std::visit(overloaded{[&](const LogDifference&) {
                          for (std::size_t n = 1; n <= n_max; ++n) out[n - 1] = 3.0 * static_cast<double>(n);
                        },
                        [&](const FourierDiagonal& k) {
                          if (n_max > k.charvals.size())
                            throw PreconditionViolated("requested more characteristic values than stored");
                          std::copy_n(k.charvals.begin(), n_max, out.begin());
                        },
                        [&](const FiniteDepthFourier& k) {
                          for (std::size_t n = 1; n <= n_max; ++n) {
                            const double x = 2.0 * kPi * static_cast<double>(n) * k.depth / k.wavelength;
                            out[n - 1] = 3.0 * static_cast<double>(n) / std::tanh(x);
                          }
                        }},
             v_);
  return out;
}

std::vector<double> characteristic_values(const Kernel& kernel, std::size_t n_max) {
  return kernel.characteristic_values(n_max);
}

double kernel_eval(const Kernel& kernel, double eps, double theta) {
  auto fourier = [&](const std::vector<double>& mu) {
    double sum = 0.0;
    for (std::size_t n = 1; n <= mu.size(); ++n) {
      const double dn = static_cast<double>(n);
      sum += std::sin(dn * eps) * std::sin(dn * theta) / mu[n - 1];
    }
    return sum;
  };
  return std::visit(
      overloaded{[&](const LogDifference&) {
                   // 1 − cos x = 2 sin²(x/2), with x reduced so multiples of 2π are exact zeros.
                   const double num = std::abs(std::sin(0.5 * std::remainder(eps - theta, 2.0 * kPi)));
                   const double den = std::abs(std::sin(0.5 * std::remainder(eps + theta, 2.0 * kPi)));
                   if (num == 0.0 || den == 0.0) throw SingularPoint(eps, theta);
                   return 2.0 * (std::log(num) - std::log(den));
                 },
                 [&](const FourierDiagonal& k) { return fourier(k.charvals); },
                 [&](const FiniteDepthFourier& k) { return fourier(kernel.characteristic_values(k.terms)); }},
      kernel.variant());
}

std::string to_string(Nonlinearity n) {
  switch (n) {
    case Nonlinearity::Nekrasov:
      return "nekrasov";
    case Nonlinearity::Krasovskii:
      return "krasovskii";
    case Nonlinearity::Hammerstein:
      return "hammerstein";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// WaveProblem

WaveProblem WaveProblem::nekrasov(std::size_t modes, double mu, Kernel kernel) {
  WaveProblem p;
  p.kernel = std::move(kernel);
  p.nonlinearity = Nonlinearity::Nekrasov;
  p.mu = mu;
  p.modes = modes;
  return p;
}

WaveProblem WaveProblem::krasovskii(std::size_t modes, double mu) {
  WaveProblem p;
  p.kernel = Kernel::krasovskii(modes);
  p.nonlinearity = Nonlinearity::Krasovskii;
  p.mu = mu;
  p.modes = modes;
  return p;
}

WaveProblem WaveProblem::hammerstein(std::size_t modes, std::vector<double> polynomial, double mu,
                                     Kernel kernel) {
  WaveProblem p;
  p.kernel = std::move(kernel);
  p.nonlinearity = Nonlinearity::Hammerstein;
  p.polynomial = std::move(polynomial);
  p.mu = mu;
  p.modes = modes;
  return p;
}

std::size_t WaveProblem::working_grid() const { return grid == 0 ? 4 * modes : grid; }

int WaveProblem::leading_order() const {
  if (nonlinearity != Nonlinearity::Hammerstein) return 2;
  for (std::size_t p = 2; p < polynomial.size(); ++p)
    if (polynomial[p] != 0.0) return static_cast<int>(p);
  return 0;
}

// ---------------------------------------------------------------------------
// WaveOperator

struct WaveOperator::NekrasovState {
  Eigen::ArrayXd phi, s, c, I, w;
};

WaveOperator::WaveOperator(WaveProblem problem) : problem_(std::move(problem)) {
  const std::size_t n = problem_.modes;
  const std::size_t m = problem_.working_grid();
  if (n < 1) throw PreconditionViolated("at least one mode required");
  if (m < 4 * n) throw GridTooSmall(m, n);
  if (!std::isfinite(problem_.mu)) throw PreconditionViolated("mu must be finite");
  if (problem_.nonlinearity == Nonlinearity::Hammerstein) {
    if (problem_.polynomial.empty()) throw PreconditionViolated("Hammerstein problem needs a coefficient table");
    for (double c : problem_.polynomial)
      if (!std::isfinite(c)) throw PreconditionViolated("non-finite Hammerstein coefficient");
  }
  plan_ = std::make_shared<SpectralPlan>(n, m);

  const auto kv = problem_.kernel.characteristic_values(n);
  const auto ni = static_cast<Eigen::Index>(n);
  weight_.resize(ni);
  for (Eigen::Index i = 0; i < ni; ++i) {
    // The conjugate-exponential equation integrates over the half period [0, π].
    const double half = problem_.nonlinearity == Nonlinearity::Krasovskii ? kPi / 2.0 : 1.0;
    weight_[i] = half / kv[static_cast<std::size_t>(i)];
  }
  const double slope = problem_.nonlinearity == Nonlinearity::Hammerstein
                           ? (problem_.polynomial.size() > 1 ? problem_.polynomial[1] : 0.0)
                           : 1.0;
  linear_ = slope * weight_;
  charvals_.resize(ni);
  for (Eigen::Index i = 0; i < ni; ++i)
    charvals_[i] = linear_[i] != 0.0 ? 1.0 / linear_[i] : std::numeric_limits<double>::infinity();
}

Eigen::VectorXd WaveOperator::multiply(const Eigen::VectorXd& grid_values, double mu) const {
  return (mu * weight_.array() * plan_->analyse(grid_values).array()).matrix();
}

Eigen::VectorXd WaveOperator::conj_exponent(const Eigen::VectorXd& a) const {
  Eigen::VectorXd e = 3.0 * plan_->conj_values(a);
  const double mx = e.size() ? e.maxCoeff() : 0.0;
  if (mx > kMaxExponent) throw OverflowGuard(mx);
  return e;
}

WaveOperator::NekrasovState WaveOperator::nekrasov_state(const Eigen::VectorXd& a, double mu) const {
  NekrasovState st;
  st.phi = plan_->sin_values(a).array();
  st.s = st.phi.sin();
  st.c = st.phi.cos();
  st.I = (plan_->cumulative() * st.s.matrix()).array();
  st.w = 1.0 + mu * st.I;
  Eigen::Index idx = 0;
  const double mn = st.w.minCoeff(&idx);
  if (!(mn > problem_.denominator_guard)) throw DenominatorVanished(mn, static_cast<std::size_t>(idx));
  return st;
}

Eigen::VectorXd WaveOperator::integrand(const Eigen::VectorXd& a, double mu) const {
  switch (problem_.nonlinearity) {
    case Nonlinearity::Nekrasov: {
      auto st = nekrasov_state(a, mu);
      return (st.s / st.w).matrix();
    }
    case Nonlinearity::Krasovskii: {
      const Eigen::ArrayXd e3 = conj_exponent(a).array().exp();
      return (e3 * plan_->sin_values(a).array().sin()).matrix();
    }
    case Nonlinearity::Hammerstein: {
      Eigen::VectorXd u = plan_->sin_values(a);
      for (Eigen::Index j = 0; j < u.size(); ++j) u[j] = polynomial_value(problem_.polynomial, u[j], 0);
      return u;
    }
  }
  return {};
}

double WaveOperator::min_denominator(const Eigen::VectorXd& a, double mu) const {
  if (problem_.nonlinearity != Nonlinearity::Nekrasov) return std::numeric_limits<double>::infinity();
  const Eigen::ArrayXd s = plan_->sin_values(a).array().sin();
  const Eigen::ArrayXd w = 1.0 + mu * (plan_->cumulative() * s.matrix()).array();
  return w.minCoeff();
}

Eigen::VectorXd WaveOperator::apply(const Eigen::VectorXd& a, double mu) const {
  return multiply(integrand(a, mu), mu);
}

Eigen::VectorXd WaveOperator::nonlinear_part(const Eigen::VectorXd& a, double mu) const {
  Eigen::ArrayXd nl;
  switch (problem_.nonlinearity) {
    case Nonlinearity::Nekrasov: {
      auto st = nekrasov_state(a, mu);
      // sin Φ/w − Φ = (sin Φ − Φ)/w − μΦI/w
      nl = st.phi.unaryExpr([](double x) { return sin_minus_identity(x); }) / st.w - mu * st.phi * st.I / st.w;
      break;
    }
    case Nonlinearity::Krasovskii: {
      const Eigen::ArrayXd e = conj_exponent(a).array();
      const Eigen::ArrayXd phi = plan_->sin_values(a).array();
      nl = e.exp() * phi.unaryExpr([](double x) { return sin_minus_identity(x); }) +
           phi * e.unaryExpr([](double x) { return std::expm1(x); });
      break;
    }
    case Nonlinearity::Hammerstein: {
      const Eigen::ArrayXd u = plan_->sin_values(a).array();
      nl = u.unaryExpr([&](double x) {
        double v = polynomial_value(problem_.polynomial, x, 2);
        if (!problem_.polynomial.empty()) v += problem_.polynomial[0];
        return v;
      });
      break;
    }
  }
  return multiply(nl.matrix(), mu);
}

Eigen::VectorXd WaveOperator::leading_part(const Eigen::VectorXd& a, double mu) const {
  const Eigen::ArrayXd phi = plan_->sin_values(a).array();
  Eigen::ArrayXd c;
  switch (problem_.nonlinearity) {
    case Nonlinearity::Nekrasov: {
      const Eigen::ArrayXd I = (plan_->cumulative() * phi.matrix()).array();
      c = -mu * phi * I;
      break;
    }
    case Nonlinearity::Krasovskii:
      c = 3.0 * plan_->conj_values(a).array() * phi;
      break;
    case Nonlinearity::Hammerstein: {
      const int k = problem_.leading_order();
      if (k == 0) return Eigen::VectorXd::Zero(a.size());
      c = problem_.polynomial[static_cast<std::size_t>(k)] * phi.pow(static_cast<double>(k));
      break;
    }
  }
  return multiply(c.matrix(), mu);
}

Eigen::VectorXd WaveOperator::residual(const Eigen::VectorXd& a, Parameter mu) const {
  Eigen::VectorXd lin(a.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (linear_[i] == 0.0)
      lin[i] = a[i];
    else
      lin[i] = a[i] * linear_[i] * ((charvals_[i] - mu.base) - mu.offset);
  }
  return lin - nonlinear_part(a, mu.value());
}

Eigen::MatrixXd WaveOperator::jacobian(const Eigen::VectorXd& a, double mu) const {
  const auto& S = plan_->synth_sin();
  Eigen::MatrixXd G;
  switch (problem_.nonlinearity) {
    case Nonlinearity::Nekrasov: {
      auto st = nekrasov_state(a, mu);
      const Eigen::MatrixXd X = st.c.matrix().asDiagonal() * S;
      const Eigen::MatrixXd Y = plan_->cumulative() * X;
      const Eigen::ArrayXd inv_w = st.w.inverse();
      G = inv_w.matrix().asDiagonal() * X;
      G.noalias() -= (mu * st.s * inv_w * inv_w).matrix().asDiagonal() * Y;
      break;
    }
    case Nonlinearity::Krasovskii: {
      const Eigen::ArrayXd e3 = conj_exponent(a).array().exp();
      const Eigen::ArrayXd phi = plan_->sin_values(a).array();
      G = (e3 * phi.cos()).matrix().asDiagonal() * S;
      G.noalias() -= (3.0 * e3 * phi.sin()).matrix().asDiagonal() * plan_->synth_cos();
      break;
    }
    case Nonlinearity::Hammerstein: {
      Eigen::VectorXd d = plan_->sin_values(a);
      for (Eigen::Index j = 0; j < d.size(); ++j) d[j] = polynomial_derivative(problem_.polynomial, d[j]);
      G = d.asDiagonal() * S;
      break;
    }
  }
  Eigen::MatrixXd J = plan_->analysis() * G;
  return (mu * weight_).asDiagonal() * J;
}

Eigen::VectorXd WaveOperator::mu_derivative(const Eigen::VectorXd& a, double mu) const {
  if (problem_.nonlinearity == Nonlinearity::Nekrasov) {
    auto st = nekrasov_state(a, mu);
    const Eigen::ArrayXd g = st.s / st.w;
    const Eigen::ArrayXd dg = -st.s * st.I / (st.w * st.w);
    return multiply(g.matrix(), 1.0) + multiply(dg.matrix(), mu);
  }
  return multiply(integrand(a, mu), 1.0);
}

std::vector<Eigen::VectorXd> WaveOperator::apply_series(const std::vector<Eigen::VectorXd>& phi,
                                                        const std::vector<double>& mu, int order) const {
  if (order < 0) throw PreconditionViolated("series order must be non-negative");
  const auto m = static_cast<Eigen::Index>(plan_->grid());
  const auto n = static_cast<Eigen::Index>(modes());
  Series u(order + 1, Eigen::ArrayXd::Zero(m));
  for (int k = 0; k <= order && k < static_cast<int>(phi.size()); ++k) {
    if (phi[k].size() != n) throw PreconditionViolated("series term has wrong mode count");
    u[k] = plan_->sin_values(phi[k]).array();
  }
  std::vector<double> mus(order + 1, 0.0);
  for (int k = 0; k <= order && k < static_cast<int>(mu.size()); ++k) mus[k] = mu[k];

  Series integrand;
  switch (problem_.nonlinearity) {
    case Nonlinearity::Nekrasov: {
      Series s, c;
      series_sincos(u, order, s, c);
      Series I(order + 1);
      for (int k = 0; k <= order; ++k) I[k] = (plan_->cumulative() * s[k].matrix()).array();
      Series w = series_scale(mus, I, order);
      w[0] += 1.0;
      const double mn = w[0].minCoeff();
      if (!(mn > problem_.denominator_guard)) throw DenominatorVanished(mn, 0);
      integrand = series_mul(s, series_recip(w, order), order);
      break;
    }
    case Nonlinearity::Krasovskii: {
      Series psi3(order + 1);
      for (int k = 0; k <= order; ++k)
        psi3[k] = k < static_cast<int>(phi.size()) ? Eigen::ArrayXd(3.0 * plan_->conj_values(phi[k]).array())
                                                   : Eigen::ArrayXd(Eigen::ArrayXd::Zero(m));
      Series s, c;
      series_sincos(u, order, s, c);
      integrand = series_mul(series_exp(psi3, order), s, order);
      break;
    }
    case Nonlinearity::Hammerstein: {
      const auto& coef = problem_.polynomial;
      Series acc(order + 1, Eigen::ArrayXd::Zero(m));
      for (std::size_t p = coef.size(); p-- > 0;) {
        acc = series_mul(acc, u, order);
        acc[0] += coef[p];
      }
      integrand = std::move(acc);
      break;
    }
  }

  std::vector<Eigen::VectorXd> out(order + 1, Eigen::VectorXd::Zero(n));
  for (int k = 0; k <= order; ++k) {
    const Eigen::VectorXd gk = multiply(integrand[k].matrix(), 1.0);
    for (int j = 0; j + k <= order; ++j)
      if (mus[j] != 0.0) out[j + k] += mus[j] * gk;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Free functions

namespace {

SineSeries apply_checked(const WaveProblem& problem, const SineSeries& phi, Nonlinearity expect) {
  if (problem.nonlinearity != expect)
    throw PreconditionViolated("problem nonlinearity is " + to_string(problem.nonlinearity));
  if (phi.modes() != problem.modes) throw PreconditionViolated("input mode count differs from problem");
  WaveOperator op(problem);
  return SineSeries(op.apply(phi.coeffs(), problem.mu));
}

}  // namespace

SineSeries apply_nekrasov(const WaveProblem& problem, const SineSeries& phi) {
  return apply_checked(problem, phi, Nonlinearity::Nekrasov);
}

SineSeries apply_krasovskii(const WaveProblem& problem, const SineSeries& phi) {
  return apply_checked(problem, phi, Nonlinearity::Krasovskii);
}

SineSeries apply_hammerstein(const WaveProblem& problem, const SineSeries& u) {
  return apply_checked(problem, u, Nonlinearity::Hammerstein);
}

SineSeries apply_operator(const WaveProblem& problem, const SineSeries& phi) {
  return apply_checked(problem, phi, problem.nonlinearity);
}

OperatorSplit linearize(const WaveProblem& problem) {
  auto op = std::make_shared<const WaveOperator>(problem);
  OperatorSplit split;
  if (problem.nonlinearity == Nonlinearity::Hammerstein) {
    // Differentiate the coefficient table through the discrete operator.
    split.B = op->jacobian(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(problem.modes)), 1.0);
  } else {
    split.B = op->linear_diagonal().asDiagonal();
  }
  split.k = problem.leading_order();
  split.C = [op](const Eigen::VectorXd& a, double mu) { return op->leading_part(a, mu); };
  split.D = [op](const Eigen::VectorXd& a, double mu) {
    Eigen::VectorXd d = op->nonlinear_part(a, mu);
    d -= op->leading_part(a, mu);
    return d;
  };
  return split;
}

}  // namespace nekwave
