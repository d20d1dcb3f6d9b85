#include "nekwave/continuation.hpp"

#include "nekwave/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>

namespace nekwave {

namespace {

struct NewtonResult {
  Eigen::VectorXd z;
  Eigen::VectorXd r;
  double norm = 0.0;
  int iters = 0;
};

using Residual = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using Jacobian = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;

// Backtracking Newton. Residual evaluations that leave the admissible region
// (vanishing denominator, overflow) count as no decrease.
NewtonResult damped_newton(const Residual& F, const Jacobian& J, Eigen::VectorXd z, const NewtonOptions& opt) {
  NewtonResult out;
  out.r = F(z);
  out.norm = out.r.norm();
  int polish_left = opt.polish;
  for (;;) {
    const bool converged = out.norm <= opt.tol;
    if (converged && polish_left == 0) break;
    if (out.iters >= opt.max_iters) {
      if (converged) break;
      throw NewtonDiverged(out.iters, out.norm);
    }
    const Eigen::VectorXd delta = J(z).partialPivLu().solve(-out.r);
    ++out.iters;
    if (!delta.allFinite()) {
      if (converged) break;
      throw NewtonDiverged(out.iters, out.norm);
    }
    auto attempt = [&](double s, Eigen::VectorXd& zt, Eigen::VectorXd& rt) {
      zt = z + s * delta;
      try {
        rt = F(zt);
      } catch (const DenominatorVanished&) {
        return std::numeric_limits<double>::infinity();
      } catch (const OverflowGuard&) {
        return std::numeric_limits<double>::infinity();
      }
      return rt.norm();
    };
    Eigen::VectorXd zt, rt;
    if (converged) {
      --polish_left;
      const double nt = attempt(1.0, zt, rt);
      if (!(nt < out.norm)) break;
      z = std::move(zt);
      out.r = std::move(rt);
      out.norm = nt;
      continue;
    }
    double s = 1.0;
    for (;;) {
      const double nt = attempt(s, zt, rt);
      if (nt <= (1.0 - 1e-4 * s) * out.norm) {
        z = std::move(zt);
        out.r = std::move(rt);
        out.norm = nt;
        break;
      }
      s *= 0.5;
      if (s < 1.0 / 1024.0) throw NewtonDiverged(out.iters, out.norm);
    }
  }
  out.z = std::move(z);
  return out;
}

BranchPoint make_point(const WaveOperator& op, Eigen::VectorXd a, double mu, double residual, int iters, int mode,
                       std::size_t monitor_points) {
  BranchPoint p;
  p.mu = mu;
  p.amplitude = a[mode - 1];
  p.residual = residual;
  p.diagnostics.min_denominator = op.min_denominator(a, mu);
  p.diagnostics.newton_iters = iters;
  p.phi = SineSeries(std::move(a));
  const MonitorVerdict v = krasovskii_monitor(p.phi, monitor_points);
  p.diagnostics.max_slope = v.max_slope;
  p.diagnostics.positivity_defect = v.positivity_defect;
  return p;
}

void check_input(const WaveProblem& problem, const SineSeries& phi) {
  if (phi.modes() != problem.modes) throw PreconditionViolated("initial guess mode count differs from problem");
}

}  // namespace

std::string to_string(Termination t) {
  switch (t) {
    case Termination::StepBudget:
      return "StepBudget";
    case Termination::SlopeBound:
      return "SlopeBound";
    case Termination::DenominatorBreakdown:
      return "DenominatorBreakdown";
    case Termination::NewtonFailure:
      return "NewtonFailure";
  }
  return "Unknown";
}

MonitorVerdict krasovskii_monitor(const SineSeries& phi, std::size_t points) {
  const auto P = static_cast<std::int64_t>(points == 0 ? 8 * phi.modes() : points);
  if (P < 2) throw PreconditionViolated("monitor grid needs at least two intervals");
  MonitorVerdict v;
  v.phi_at_zero = phi.at_half_turn_fraction(0, P);
  v.phi_at_pi = phi.at_half_turn_fraction(P, P);
  double lo = std::min(v.phi_at_zero, v.phi_at_pi);
  double slope = std::max(std::abs(v.phi_at_zero), std::abs(v.phi_at_pi));
  for (std::int64_t j = 1; j < P; ++j) {
    const double x = phi.at_half_turn_fraction(j, P);
    lo = std::min(lo, x);
    slope = std::max(slope, std::abs(x));
  }
  v.positivity_defect = std::min(0.0, lo);
  v.max_slope = slope;
  v.in_cone = v.positivity_defect >= -1e-12;
  v.below_slope_bound = v.max_slope < kSlopeBound;
  return v;
}

MonitorVerdict krasovskii_monitor(const BranchPoint& point, std::size_t points) {
  return krasovskii_monitor(point.phi, points);
}

void SpectrumBounds::add(double mu) {
  if (count_ == 0) {
    lo_ = hi_ = mu;
  } else {
    lo_ = std::min(lo_, mu);
    hi_ = std::max(hi_, mu);
  }
  ++count_;
}

BranchPoint newton_solve(const WaveProblem& problem, const SineSeries& phi0, double mu, const NewtonOptions& options,
                         int mode) {
  check_input(problem, phi0);
  if (mode < 1 || static_cast<std::size_t>(mode) > problem.modes) throw PreconditionViolated("mode index outside 1..N");
  const WaveOperator op(problem);
  const auto n = static_cast<Eigen::Index>(problem.modes);
  const Residual F = [&](const Eigen::VectorXd& a) { return op.residual(a, mu); };
  const Jacobian J = [&](const Eigen::VectorXd& a) {
    return Eigen::MatrixXd(Eigen::MatrixXd::Identity(n, n) - op.jacobian(a, mu));
  };
  NewtonResult res = damped_newton(F, J, phi0.coeffs(), options);
  return make_point(op, std::move(res.z), mu, res.norm, res.iters, mode, 0);
}

BranchPoint solve_at_amplitude(const WaveProblem& problem, int mode, double amplitude, const SineSeries& guess,
                               double mu_guess, const NewtonOptions& options) {
  check_input(problem, guess);
  if (mode < 1 || static_cast<std::size_t>(mode) > problem.modes) throw PreconditionViolated("mode index outside 1..N");
  const WaveOperator op(problem);
  const auto n = static_cast<Eigen::Index>(problem.modes);
  const Eigen::Index idx = mode - 1;
  const double base = op.charvals()[idx];

  // z = (a without a_n, μ − base)
  auto unpack = [&](const Eigen::VectorXd& z) {
    Eigen::VectorXd a(n);
    for (Eigen::Index i = 0, k = 0; i < n; ++i) a[i] = i == idx ? amplitude : z[k++];
    return a;
  };
  const Residual F = [&](const Eigen::VectorXd& z) { return op.residual(unpack(z), Parameter{base, z[n - 1]}); };
  const Jacobian J = [&](const Eigen::VectorXd& z) {
    const Eigen::VectorXd a = unpack(z);
    const double mu = base + z[n - 1];
    const Eigen::MatrixXd full = Eigen::MatrixXd::Identity(n, n) - op.jacobian(a, mu);
    Eigen::MatrixXd out(n, n);
    for (Eigen::Index i = 0, k = 0; i < n; ++i)
      if (i != idx) out.col(k++) = full.col(i);
    out.col(n - 1) = -op.mu_derivative(a, mu);
    return out;
  };
  Eigen::VectorXd z(n);
  for (Eigen::Index i = 0, k = 0; i < n; ++i)
    if (i != idx) z[k++] = guess.coeffs()[i];
  z[n - 1] = mu_guess - base;
  NewtonResult res = damped_newton(F, J, std::move(z), options);
  return make_point(op, unpack(res.z), base + res.z[n - 1], res.norm, res.iters, mode, 0);
}

Branch continue_branch(const WaveProblem& problem, int mode, const ContinuationOptions& options) {
  if (!(options.ds > 0.0)) throw PreconditionViolated("arclength step must be positive");
  if (options.max_steps < 1) throw PreconditionViolated("at least one continuation step required");
  const WaveOperator op(problem);
  const auto n = static_cast<Eigen::Index>(problem.modes);

  Branch branch;
  branch.mode = mode;
  const auto cvs = char_values(op.linear_diagonal().asDiagonal().toDenseMatrix(), problem.modes);
  for (const auto& cv : cvs)
    if (std::abs(cv.mu - op.charvals()[mode - 1]) <= 1e-12 * cv.mu) branch.origin = cv;
  if (branch.origin.multiplicity != 1 || branch.origin.mu == 0.0)
    throw PreconditionViolated("continuation needs a simple characteristic value");

  const SeriesBranch series = nekrasov_nazarov_series(problem, mode, std::max(2, options.series_order));
  const int q = series.exponent;
  auto mu_of_t = [&](double t) { return series.mu_star + series.sigma * std::pow(t, q); };

  // First point: the series at the t whose leading-order arclength is ds,
  // on the side with a positive eigen-coefficient.
  const double c1 = series.constants.front();
  const double lead = std::hypot(c1, q == 1 ? 1.0 : 0.0);
  double t0 = std::copysign(options.ds / std::max(lead, 1e-12), c1);
  std::optional<BranchPoint> first;
  for (int attempt = 0; attempt < 20 && !first; ++attempt) {
    try {
      const SineSeries seed = series.evaluate_t(t0);
      first = newton_solve(problem, seed, mu_of_t(t0), options.newton, mode);
      first = make_point(op, first->phi.coeffs(), first->mu, first->residual, first->diagnostics.newton_iters, mode,
                         options.monitor_points);
      // A corrector that moves the eigen-coefficient far from the seed's has
      // left the branch, typically for the trivial solution.
      const double a0 = seed.coeff(mode);
      if (!(std::abs(first->phi.coeff(mode) - a0) <= 0.5 * std::abs(a0))) first.reset();
    } catch (const Error&) {
    }
    if (!first) {
      t0 *= 0.5;
      ++branch.halvings;
    }
  }
  if (!first) {
    branch.termination = Termination::NewtonFailure;
    return branch;
  }

  SpectrumBounds bounds;
  auto accept = [&](BranchPoint p) {
    bounds.add(p.mu);
    branch.points.push_back(std::move(p));
  };
  accept(*first);

  auto state = [&](const BranchPoint& p) {
    Eigen::VectorXd x(n + 1);
    x.head(n) = p.phi.coeffs();
    x[n] = p.mu;
    return x;
  };
  Eigen::VectorXd tangent(n + 1);
  tangent.head(n) = series.derivative_t(t0).coeffs();
  tangent[n] = series.sigma * q * std::pow(t0, q - 1);
  tangent *= std::copysign(1.0, t0) / tangent.norm();

  const double base = series.mu_star;
  double ds = options.ds;
  NewtonOptions corr = options.newton;
  corr.max_iters = options.corrector_iters;

  while (static_cast<int>(branch.points.size()) < options.max_steps) {
    const Eigen::VectorXd x0 = state(branch.points.back());
    bool done = false;
    bool denominator_failure = false;
    while (!done) {
      const Eigen::VectorXd pred = x0 + ds * tangent;
      // Unknowns carry μ as an offset from μ* so residuals keep its digits.
      const Residual F = [&](const Eigen::VectorXd& x) {
        Eigen::VectorXd out(n + 1);
        out.head(n) = op.residual(x.head(n), Parameter{base, x[n] - base});
        out[n] = tangent.dot(x - x0) - ds;
        return out;
      };
      const Jacobian J = [&](const Eigen::VectorXd& x) {
        Eigen::MatrixXd M(n + 1, n + 1);
        M.topLeftCorner(n, n) = Eigen::MatrixXd::Identity(n, n) - op.jacobian(x.head(n), x[n]);
        M.topRightCorner(n, 1) = -op.mu_derivative(x.head(n), x[n]);
        M.bottomRows(1) = tangent.transpose();
        return M;
      };
      try {
        NewtonResult res = damped_newton(F, J, pred, corr);
        const double rnorm = res.r.head(n).norm();
        BranchPoint p = make_point(op, res.z.head(n), res.z[n], rnorm, res.iters, mode, options.monitor_points);
        if (!(p.diagnostics.min_denominator > problem.denominator_guard)) throw DenominatorVanished(p.diagnostics.min_denominator, 0);
        p.ds = ds;
        if (p.diagnostics.max_slope >= options.slope_bound) {
          branch.termination = Termination::SlopeBound;
          branch.mu_min = bounds.lo();
          branch.mu_max = bounds.hi();
          return branch;
        }
        const Eigen::VectorXd step = res.z - x0;
        tangent = step / step.norm();
        accept(std::move(p));
        if (res.iters <= options.fast_iters) ds = std::min(ds * options.grow, options.ds_max);
        done = true;
      } catch (const Error& e) {
        denominator_failure = dynamic_cast<const DenominatorVanished*>(&e) != nullptr;
        ds *= 0.5;
        ++branch.halvings;
        if (ds < options.ds_min) {
          branch.termination =
              denominator_failure ? Termination::DenominatorBreakdown : Termination::NewtonFailure;
          branch.mu_min = bounds.lo();
          branch.mu_max = bounds.hi();
          return branch;
        }
      }
    }
  }
  branch.termination = Termination::StepBudget;
  branch.mu_min = bounds.lo();
  branch.mu_max = bounds.hi();
  return branch;
}

std::vector<SineSeries> multistart_solutions(const WaveProblem& problem, double mu, int starts, double radius,
                                             std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> scale(0.1, 1.0);
  const auto n = static_cast<Eigen::Index>(problem.modes);
  const Eigen::Index active = std::min<Eigen::Index>(n, 8);
  std::vector<SineSeries> found;
  for (int s = 0; s < starts; ++s) {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
    for (Eigen::Index k = 0; k < active; ++k) a[k] = unit(rng) / static_cast<double>((k + 1) * (k + 1));
    a *= radius * scale(rng) / a.norm();
    try {
      const BranchPoint p = newton_solve(problem, SineSeries(a), mu);
      const Eigen::VectorXd& c = p.phi.coeffs();
      if (c.norm() <= 1e-8) continue;
      const bool seen = std::any_of(found.begin(), found.end(), [&](const SineSeries& f) {
        return (f.coeffs() - c).norm() <= 1e-6 * std::max(1.0, c.norm());
      });
      if (!seen) found.push_back(p.phi);
    } catch (const Error&) {
    }
  }
  return found;
}

}  // namespace nekwave
