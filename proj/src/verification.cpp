#include "nekwave/verification.hpp"

#include "nekwave/continuation.hpp"
#include "nekwave/errors.hpp"
#include "nekwave/linear_analysis.hpp"
#include "nekwave/operators.hpp"
#include "nekwave/series.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace nekwave {

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

Eigen::VectorXd random_odd(std::mt19937_64& rng, Eigen::Index n, double size) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::VectorXd a(n);
  for (Eigen::Index k = 0; k < n; ++k) a[k] = u(rng) / static_cast<double>((k + 1) * (k + 1));
  return a * (size / a.cwiseAbs().sum());
}

// Largest cosine coefficient (including the mean) of grid values.
double even_projection(const Eigen::VectorXd& v) {
  const auto m = static_cast<std::int64_t>(v.size());
  double worst = 0.0;
  for (std::int64_t k = 0; k <= m / 2; ++k) {
    double s = 0.0;
    for (std::int64_t j = 0; j < m; ++j) s += v[j] * cos_turn(k * j, m);
    worst = std::max(worst, std::abs(2.0 * s / static_cast<double>(m)));
  }
  return worst;
}

}  // namespace

CheckResult check_kernel_identity(const VerifyOptions& options) {
  CheckResult r;
  r.name = "kernel_identity";
  const std::size_t N = options.kernel_terms;
  const int grid = 100;
  const double h = 2.0 * kPi / grid;
  // S(x) = Σ_{n≤N} cos(nx)/n on the half-integer offsets x = (k + ½)h.
  const int kmin = -(grid - 1), kmax = 2 * (grid - 1);
  std::vector<double> S(static_cast<std::size_t>(kmax - kmin + 1));
  for (int k = kmin; k <= kmax; ++k) {
    const double x = (k + 0.5) * h;
    double s = 0.0;
    for (std::size_t n = N; n >= 1; --n) s += std::cos(static_cast<double>(n) * x) / static_cast<double>(n);
    S[static_cast<std::size_t>(k - kmin)] = s;
  }
  const Kernel kernel = Kernel::log_difference();
  double worst = 0.0;
  for (int i = 0; i < grid; ++i)
    for (int j = 0; j < grid; ++j) {
      const double eps = (i + 0.5) * h;
      const double theta = j * h;
      const double series = -2.0 * (S[static_cast<std::size_t>(i - j - kmin)] - S[static_cast<std::size_t>(i + j - kmin)]);
      const double k = kernel_eval(kernel, eps, theta) + options.kernel_perturbation;
      worst = std::max(worst, std::abs(k - series));
    }
  const double bound = 4.0 / static_cast<double>(N);
  r.passed = worst <= bound;
  r.measured = {{"max_error", worst}, {"bound", bound}, {"terms", static_cast<double>(N)}};
  r.detail = "max |K + 4 sum sin n eps sin n theta / n| = " + fmt(worst) + " vs 4/N = " + fmt(bound);
  return r;
}

CheckResult check_eigenvalue_exactness(const VerifyOptions& options) {
  CheckResult r;
  r.name = "eigenvalue_exactness";
  const std::size_t N = options.modes;
  const std::size_t count = std::min<std::size_t>(16, N);
  const auto cvs = char_values(linearize(WaveProblem::nekrasov(N)).B, count);
  double worst = 0.0;
  bool simple = cvs.size() == count;
  for (std::size_t i = 0; i < cvs.size(); ++i) {
    worst = std::max(worst, std::abs(cvs[i].mu - 3.0 * static_cast<double>(i + 1)));
    simple = simple && cvs[i].multiplicity == 1;
  }
  double worst_finite = 0.0;
  for (double ratio : {0.1, 0.5, 1.0, 5.0}) {
    const auto p = WaveProblem::nekrasov(N, 3.0, Kernel::finite_depth(ratio, 1.0, N));
    const auto fc = char_values(linearize(p).B, count);
    for (std::size_t i = 0; i < fc.size(); ++i) {
      const double n = static_cast<double>(i + 1);
      const double exact = 3.0 * n / std::tanh(2.0 * kPi * n * ratio);
      worst_finite = std::max(worst_finite, std::abs(fc[i].mu - exact) / exact);
    }
  }
  r.passed = worst <= 1e-12 && worst_finite <= 1e-12 && simple;
  r.measured = {{"max_error_infinite_depth", worst}, {"max_rel_error_finite_depth", worst_finite}};
  r.detail = "mu_n = 3n to " + fmt(worst) + ", finite depth to " + fmt(worst_finite);
  return r;
}

CheckResult check_frechet_consistency(const VerifyOptions& options) {
  CheckResult r;
  r.name = "frechet_consistency";
  const WaveProblem p = WaveProblem::nekrasov(options.modes);
  const WaveOperator op(p);
  const double mu = 3.0;
  std::mt19937_64 rng(7);
  const Eigen::VectorXd phi = random_odd(rng, static_cast<Eigen::Index>(options.modes), 1.0);
  const Eigen::VectorXd Bphi = op.linear_diagonal().cwiseProduct(phi);
  std::vector<double> deltas = {1e-2, 1e-3, 1e-4}, errs;
  for (double d : deltas) errs.push_back((op.apply(d * phi, mu) - mu * d * Bphi).norm());
  const double order = loglog_slope(deltas, errs);

  // Central-difference Jacobian at 0 against μB.
  const double h = 1e-6;
  const auto n = static_cast<Eigen::Index>(options.modes);
  double jac_err = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    e[j] = h;
    const Eigen::VectorXd col = (op.apply(e, mu) - op.apply(-e, mu)) / (2.0 * h);
    Eigen::VectorXd expect = Eigen::VectorXd::Zero(n);
    expect[j] = mu * op.linear_diagonal()[j];
    jac_err = std::max(jac_err, (col - expect).cwiseAbs().maxCoeff());
  }
  r.passed = order >= 1.9 && jac_err <= 1e-8;
  r.measured = {{"remainder_order", order}, {"jacobian_error", jac_err}};
  r.detail = "remainder order " + fmt(order) + ", finite-difference Jacobian error " + fmt(jac_err);
  return r;
}

CheckResult check_symmetry(const VerifyOptions& options) {
  CheckResult r;
  r.name = "symmetry_invariance";
  std::mt19937_64 rng(11);
  const std::size_t N = std::min<std::size_t>(options.modes, 32);
  const std::vector<WaveProblem> problems = {
      WaveProblem::nekrasov(N, 3.0), WaveProblem::krasovskii(N, 1.0),
      WaveProblem::hammerstein(N, {0.0, 1.0, 0.5, -0.25}, 2.0)};
  double worst = 0.0;
  for (const auto& p : problems) {
    const WaveOperator op(p);
    for (int s = 0; s < 100; ++s) {
      const Eigen::VectorXd a = random_odd(rng, static_cast<Eigen::Index>(N), 0.1);
      const Eigen::VectorXd out = op.apply(a, p.mu);
      worst = std::max(worst, even_projection(op.plan().sin_values(out)));
    }
  }
  r.passed = worst <= 1e-12;
  r.measured = {{"max_even_projection", worst}};
  r.detail = "largest even projection of 300 outputs " + fmt(worst);
  return r;
}

CheckResult check_series_residual_order(const VerifyOptions& options) {
  CheckResult r;
  r.name = "series_residual_order";
  const WaveProblem p = WaveProblem::nekrasov(options.modes);
  const SeriesBranch br = nekrasov_nazarov_series(p, options.mode, options.series_order);
  const ResidualSweep sw = residual_sweep(p, br, {1e-1, 3e-2, 1e-2, 3e-3, 1e-3});
  const double target = options.series_order + 0.7;
  r.passed = sw.slope >= target;
  r.measured = {{"slope", sw.slope}, {"target", target}};
  for (std::size_t i = 0; i < sw.lambda.size(); ++i) r.measured.emplace_back("residual@" + fmt(sw.lambda[i]), sw.residual[i]);
  r.detail = "log-log slope " + fmt(sw.slope) + " vs " + fmt(target);
  return r;
}

CheckResult check_series_equivalence(const VerifyOptions& options) {
  CheckResult r;
  r.name = "series_branching_equivalence";
  const WaveProblem p = WaveProblem::nekrasov(options.modes);
  const EquivalenceReport rep = equivalence_check(p, options.mode, options.equivalence_order);
  r.passed = rep.max_discrepancy <= 1e-6;
  r.measured = {{"max_discrepancy", rep.max_discrepancy}, {"condition", rep.condition}};
  for (std::size_t k = 0; k < rep.discrepancy.size(); ++k)
    r.measured.emplace_back("discrepancy_order_" + std::to_string(k + 1), rep.discrepancy[k]);
  r.detail = "largest relative coefficient discrepancy " + fmt(rep.max_discrepancy);
  return r;
}

CheckResult check_series_vs_newton(const VerifyOptions& options) {
  CheckResult r;
  r.name = "series_vs_newton";
  const WaveProblem p = WaveProblem::nekrasov(options.modes);
  const SeriesBranch br = nekrasov_nazarov_series(p, options.mode, options.series_order);
  std::vector<double> lambdas = {0.05, 0.025, 0.0125, 0.00625}, diffs;
  double worst_res = 0.0;
  for (double l : lambdas) {
    const SineSeries seed = br.evaluate(l);
    const BranchPoint pt = newton_solve(p, seed, br.mu(l), {}, options.mode);
    worst_res = std::max(worst_res, pt.residual);
    diffs.push_back((pt.phi - seed).coeffs().norm());
  }
  const double order = loglog_slope(lambdas, diffs);
  const double target = options.series_order + 0.7;
  r.passed = worst_res <= 1e-11 && order >= target;
  r.measured = {{"max_newton_residual", worst_res}, {"difference_order", order}, {"target", target},
                {"difference@0.05", diffs.front()}};
  r.detail = "Newton residual " + fmt(worst_res) + ", series difference order " + fmt(order);
  return r;
}

std::vector<CheckResult> run_verification(const VerifyOptions& options) {
  using Fn = CheckResult (*)(const VerifyOptions&);
  const std::vector<std::pair<const char*, Fn>> checks = {
      {"kernel_identity", check_kernel_identity},
      {"eigenvalue_exactness", check_eigenvalue_exactness},
      {"frechet_consistency", check_frechet_consistency},
      {"symmetry_invariance", check_symmetry},
      {"series_residual_order", check_series_residual_order},
      {"series_branching_equivalence", check_series_equivalence},
      {"series_vs_newton", check_series_vs_newton},
  };
  std::vector<CheckResult> out;
  for (const auto& [name, fn] : checks) {
    try {
      out.push_back(fn(options));
    } catch (const Error& e) {
      CheckResult r;
      r.name = name;
      r.passed = false;
      r.detail = e.what();
      out.push_back(std::move(r));
    }
  }
  return out;
}

}  // namespace nekwave
