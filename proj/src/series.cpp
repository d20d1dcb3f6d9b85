#include "nekwave/series.hpp"

#include "nekwave/errors.hpp"
#include "nekwave/linear_analysis.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace nekwave {

namespace {

constexpr int kMaxExponent = 3;

std::string poly_text(const std::vector<double>& c) {
  std::ostringstream os;
  os.precision(17);
  os << "[";
  for (std::size_t i = 0; i < c.size(); ++i) os << (i ? ", " : "") << c[i];
  os << "]";
  return os.str();
}

class Recurrence {
 public:
  Recurrence(const WaveOperator& op, int mode, int q, double sigma)
      : op_(op), idx_(mode - 1), q_(q), sigma_(sigma), mu_star_(op.charvals()[mode - 1]) {
    B_ = op.linear_diagonal().asDiagonal();
  }

  std::vector<double> mu_series(int order) const {
    std::vector<double> m(static_cast<std::size_t>(order) + 1, 0.0);
    m[0] = mu_star_;
    if (q_ <= order) m[static_cast<std::size_t>(q_)] = sigma_;
    return m;
  }

  // Φ_1..Φ_upto for the constants C (missing entries taken as 0).
  std::vector<Eigen::VectorXd> build(const std::vector<double>& C, int upto) const {
    const auto n = static_cast<Eigen::Index>(op_.modes());
    std::vector<Eigen::VectorXd> terms;
    for (int k = 1; k <= upto; ++k) {
      Eigen::VectorXd phi = Eigen::VectorXd::Zero(n);
      if (k >= 2) {
        const Eigen::VectorXd rhs = recurrence_rhs(op_, terms, mu_series(k), k);
        try {
          phi = fredholm_solve(B_, mu_star_, rhs);
        } catch (const IncompatibleSingularSystem& e) {
          throw SolvabilityFailure(k, e.what());
        }
      }
      phi[idx_] = static_cast<std::size_t>(k - 1) < C.size() ? C[static_cast<std::size_t>(k - 1)] : 0.0;
      terms.push_back(std::move(phi));
    }
    return terms;
  }

  // Eigen-component of the order-k right-hand side.
  double solvability(const std::vector<double>& C, int k) const {
    const auto terms = build(C, k - 1);
    return recurrence_rhs(op_, terms, mu_series(k), k)[idx_];
  }

 private:
  const WaveOperator& op_;
  Eigen::Index idx_;
  int q_;
  double sigma_;
  double mu_star_;
  Eigen::MatrixXd B_;
};

void check_mode(const WaveOperator& op, int mode) {
  if (mode < 1 || static_cast<std::size_t>(mode) > op.modes())
    throw PreconditionViolated("mode index outside 1..N");
  const double b = op.linear_diagonal()[mode - 1];
  if (!(b > 0.0)) throw PreconditionViolated("mode has no positive characteristic value");
  const double mu = op.charvals()[mode - 1];
  for (Eigen::Index i = 0; i < op.charvals().size(); ++i)
    if (i != mode - 1 && std::abs(op.charvals()[i] - mu) <= 1e-8 * mu)
      throw PreconditionViolated("characteristic value is not simple");
}

}  // namespace

double SeriesBranch::t_of(double lambda) const {
  const double r = lambda / sigma;
  if (exponent == 1) return r;
  if (exponent % 2 == 0 && r < 0.0) throw PreconditionViolated("parameter offset on the side without a branch");
  return std::copysign(std::pow(std::abs(r), 1.0 / exponent), r);
}

SineSeries SeriesBranch::evaluate_t(double t) const {
  if (terms.empty()) throw PreconditionViolated("empty series");
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(terms.front().coeffs().size());
  for (std::size_t k = terms.size(); k-- > 0;) acc = (acc + terms[k].coeffs()) * t;
  return SineSeries(std::move(acc));
}

SineSeries SeriesBranch::evaluate(double lambda) const { return evaluate_t(t_of(lambda)); }

SineSeries SeriesBranch::derivative_t(double t) const {
  if (terms.empty()) throw PreconditionViolated("empty series");
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(terms.front().coeffs().size());
  for (std::size_t k = terms.size(); k-- > 0;) acc = acc * t + static_cast<double>(k + 1) * terms[k].coeffs();
  return SineSeries(std::move(acc));
}

double SeriesBranch::amplitude(double lambda) const {
  const double t = t_of(lambda);
  double acc = 0.0;
  for (std::size_t k = constants.size(); k-- > 0;) acc = (acc + constants[k]) * t;
  return acc;
}

Eigen::VectorXd recurrence_rhs(const WaveOperator& op, const std::vector<Eigen::VectorXd>& terms,
                               const std::vector<double>& mu_series, int k) {
  if (k < 1) throw PreconditionViolated("recurrence order must be positive");
  const auto n = static_cast<Eigen::Index>(op.modes());
  std::vector<Eigen::VectorXd> phi;
  phi.reserve(static_cast<std::size_t>(k));
  phi.push_back(Eigen::VectorXd::Zero(n));
  for (int j = 1; j < k; ++j)
    phi.push_back(static_cast<std::size_t>(j - 1) < terms.size() ? terms[static_cast<std::size_t>(j - 1)]
                                                                : Eigen::VectorXd::Zero(n));
  return op.apply_series(phi, mu_series, k)[static_cast<std::size_t>(k)];
}

SeriesBranch nekrasov_nazarov_series(const WaveProblem& problem, int mode, int order) {
  if (order < 1) throw PreconditionViolated("series order must be at least 1");
  if (problem.nonlinearity == Nonlinearity::Hammerstein && !problem.polynomial.empty() &&
      problem.polynomial[0] != 0.0)
    throw PreconditionViolated("the zero function must solve the equation (f(0) = 0)");
  const WaveOperator op(problem);
  check_mode(op, mode);

  SeriesBranch br;
  br.mode = mode;
  br.order = order;
  br.mu_star = op.charvals()[mode - 1];

  // Lowest q for which the solvability polynomial at order q+1 has a
  // nonlinear term: g(C) = βC + γC^{q+1}.
  double beta = 0.0, gamma = 0.0;
  int q = 0;
  for (int trial = 1; trial <= kMaxExponent; ++trial) {
    if (static_cast<std::size_t>((order + trial) * mode) > op.modes())
      throw OrderTooHigh(order + trial, mode, op.modes());
    const Recurrence rec(op, mode, trial, 1.0);
    const double g1 = rec.solvability({1.0}, trial + 1);
    const double g2 = rec.solvability({2.0}, trial + 1);
    gamma = (g2 - 2.0 * g1) / (std::pow(2.0, trial + 1) - 2.0);
    beta = g1 - gamma;
    if (!(std::abs(beta) > 1e-13 * (std::abs(g1) + std::abs(g2))))
      throw SolvabilityFailure(trial + 1, "linear coefficient vanishes; polynomial " + poly_text({beta, gamma}));
    if (std::abs(gamma) > 1e-10 * (std::abs(g1) + std::abs(g2))) {
      q = trial;
      break;
    }
  }
  if (q == 0)
    throw SolvabilityFailure(kMaxExponent + 1, "no nonlinear term up to the maximal exponent; polynomial " +
                                                   poly_text({beta, gamma}));

  // C^q = −σβ/γ; for even q pick the side of λ that gives a real root.
  double r = -beta / gamma;
  double sigma = 1.0;
  if (q % 2 == 0 && r < 0.0) {
    sigma = -1.0;
    r = -r;
  }
  const double c1 = q == 1 ? r : std::copysign(std::pow(std::abs(r), 1.0 / q), r);
  br.exponent = q;
  br.sigma = sigma;
  br.constants = {c1};
  br.solvability.push_back({sigma * beta, gamma});

  const Recurrence rec(op, mode, q, sigma);
  for (int j = 2; j <= order; ++j) {
    std::vector<double> C = br.constants;
    C.push_back(0.0);
    auto g = [&](double c) {
      C.back() = c;
      return rec.solvability(C, j + q);
    };
    const double a = g(0.0);
    const double gp = g(1.0);
    const double gm = g(-1.0);
    const double b = 0.5 * (gp - gm);
    const double c = 0.5 * (gp + gm) - a;
    const double scale = std::abs(a) + std::abs(gp) + std::abs(gm);
    if (!(std::abs(b) > 1e-14 * scale))
      throw SolvabilityFailure(j + q, "no dependence on the free constant; polynomial " + poly_text({a, b, c}));
    double root = -a / b;
    if (std::abs(c) > 1e-12 * std::abs(b)) {
      const double disc = b * b - 4.0 * a * c;
      if (disc < 0.0) throw SolvabilityFailure(j + q, "no real root; polynomial " + poly_text({a, b, c}));
      const double s = std::sqrt(disc);
      const double r1 = (-b + s) / (2.0 * c);
      const double r2 = (-b - s) / (2.0 * c);
      root = std::abs(r1 - root) < std::abs(r2 - root) ? r1 : r2;
    }
    br.constants.push_back(root);
    br.solvability.push_back({a, b, c});
  }

  const auto terms = rec.build(br.constants, order);
  for (const auto& t : terms) br.terms.emplace_back(t);
  return br;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw PreconditionViolated("slope fit needs two or more points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(std::abs(x[i]));
    const double ly = std::log(std::abs(y[i]));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

ResidualSweep residual_sweep(const WaveProblem& problem, const SeriesBranch& branch,
                             const std::vector<double>& lambdas) {
  const WaveOperator op(problem);
  ResidualSweep out;
  for (double lambda : lambdas) {
    const SineSeries phi = branch.evaluate(lambda);
    const Eigen::VectorXd r = op.residual(phi.coeffs(), Parameter{branch.mu_star, lambda});
    out.lambda.push_back(lambda);
    out.residual.push_back(r.norm());
  }
  out.slope = loglog_slope(out.lambda, out.residual);
  out.expected = static_cast<double>(branch.order + 1) / branch.exponent;
  return out;
}

// ---------------------------------------------------------------------------
// Branching function

BranchingFunction::BranchingFunction(const WaveProblem& problem, int mode, BranchingOptions options)
    : op_(problem), mode_(mode), options_(options) {
  check_mode(op_, mode);
  mu_star_ = op_.charvals()[mode - 1];
  if (!(options_.radius > 0.0)) throw PreconditionViolated("branching radius must be positive");
  if (options_.scan_intervals < 2) throw PreconditionViolated("at least two scan intervals required");
}

BranchingSample BranchingFunction::operator()(double alpha, double lambda) const {
  const double bound = options_.radius * (1.0 + 1e-12);
  if (!(std::abs(alpha) <= bound) || !(std::abs(lambda) <= bound))
    throw PreconditionViolated("alpha and lambda must lie in the small neighbourhood");
  const auto n = static_cast<Eigen::Index>(op_.modes());
  const Eigen::Index idx = mode_ - 1;
  const Parameter par{mu_star_, lambda};
  const double mu = par.value();

  Eigen::VectorXd phi = Eigen::VectorXd::Zero(n);
  phi[idx] = alpha;
  const double tol = 1e-14 * std::abs(alpha);

  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < n; ++i)
    if (i != idx) keep.push_back(i);

  Eigen::VectorXd r = op_.residual(phi, par);
  auto projected_norm = [&](const Eigen::VectorXd& v) {
    double s = 0.0;
    for (Eigen::Index i : keep) s += v[i] * v[i];
    return std::sqrt(s);
  };
  double res = projected_norm(r);
  int it = 0;
  while (res > tol) {
    if (it == options_.max_newton) throw ComplementNewtonDiverged(it, res);
    ++it;
    const Eigen::MatrixXd J = Eigen::MatrixXd::Identity(n, n) - op_.jacobian(phi, mu);
    const auto m = static_cast<Eigen::Index>(keep.size());
    Eigen::MatrixXd Jp(m, m);
    Eigen::VectorXd rp(m);
    for (Eigen::Index a = 0; a < m; ++a) {
      rp[a] = r[keep[static_cast<std::size_t>(a)]];
      for (Eigen::Index b = 0; b < m; ++b) Jp(a, b) = J(keep[static_cast<std::size_t>(a)], keep[static_cast<std::size_t>(b)]);
    }
    const Eigen::VectorXd delta = Jp.partialPivLu().solve(-rp);
    if (!delta.allFinite()) throw ComplementNewtonDiverged(it, res);
    for (Eigen::Index a = 0; a < m; ++a) phi[keep[static_cast<std::size_t>(a)]] += delta[a];
    r = op_.residual(phi, par);
    const double next = projected_norm(r);
    // Stagnation at the rounding floor.
    if (delta.norm() <= 1e-15 * phi.norm()) {
      res = next;
      break;
    }
    res = next;
  }

  BranchingSample s;
  s.alpha = alpha;
  s.lambda = lambda;
  s.F = r[idx];
  phi[idx] = 0.0;
  s.psi = SineSeries(std::move(phi));
  s.iterations = it;
  return s;
}

double BranchingFunction::reduced(double alpha, double lambda) const {
  if (alpha != 0.0) return (*this)(alpha, lambda).F / alpha;
  const double d = 1e-5 * options_.radius;
  return ((*this)(d, lambda).F - (*this)(-d, lambda).F) / (2.0 * d);
}

std::optional<double> BranchingFunction::root(double lambda, std::optional<double> prefer) const {
  const int K = options_.scan_intervals;
  const double R = options_.radius;
  std::vector<double> xs(static_cast<std::size_t>(K) + 1);
  std::vector<std::optional<double>> gs(xs.size());
  for (int i = 0; i <= K; ++i) {
    // Symmetric grid, exactly 0 at the centre for even K.
    xs[static_cast<std::size_t>(i)] = R * static_cast<double>(2 * i - K) / static_cast<double>(K);
    try {
      gs[static_cast<std::size_t>(i)] = reduced(xs[static_cast<std::size_t>(i)], lambda);
    } catch (const Error&) {
      gs[static_cast<std::size_t>(i)] = std::nullopt;
    }
  }

  std::vector<double> roots;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    if (!gs[i] || !gs[i + 1]) continue;
    double a = xs[i], b = xs[i + 1], fa = *gs[i], fb = *gs[i + 1];
    if (fa == 0.0 && a != 0.0) {
      roots.push_back(a);
      continue;
    }
    if (!(fa * fb < 0.0)) continue;
    try {
      // Secant steps safeguarded by the bracket.
      double x0 = a, f0 = fa;
      double x1 = b, f1 = fb;
      double x = a - fa * (b - a) / (fb - fa);
      for (int it = 0; it < 100; ++it) {
        const double fx = reduced(x, lambda);
        if (fx == 0.0) break;
        if ((fx < 0.0) == (fa < 0.0)) {
          a = x;
          fa = fx;
        } else {
          b = x;
          fb = fx;
        }
        x0 = x1;
        f0 = f1;
        x1 = x;
        f1 = fx;
        double next = f1 != f0 ? x1 - f1 * (x1 - x0) / (f1 - f0) : 0.5 * (a + b);
        if (!(next > std::min(a, b) && next < std::max(a, b))) next = 0.5 * (a + b);
        const double step = std::abs(next - x);
        x = next;
        if (step <= 2e-16 * std::abs(x) || std::abs(b - a) <= 4e-16 * std::abs(x)) break;
      }
      if (x != 0.0) roots.push_back(x);
    } catch (const Error&) {
    }
  }
  if (prefer && *prefer != 0.0) {
    std::erase_if(roots, [&](double r) { return (r < 0.0) != (*prefer < 0.0); });
  }
  if (roots.empty()) return std::nullopt;
  return *std::min_element(roots.begin(), roots.end(),
                           [](double p, double q) { return std::abs(p) < std::abs(q); });
}

BranchingSample lyapunov_schmidt_reduce(const WaveProblem& problem, int mode, double alpha, double lambda,
                                        const BranchingOptions& options) {
  return BranchingFunction(problem, mode, options)(alpha, lambda);
}

// ---------------------------------------------------------------------------
// Equivalence

EquivalenceReport equivalence_check(const WaveProblem& problem, int mode, int order,
                                    const EquivalenceOptions& options) {
  return equivalence_check(problem, nekrasov_nazarov_series(problem, mode, order), options);
}

EquivalenceReport equivalence_check(const WaveProblem& problem, const SeriesBranch& branch,
                                    const EquivalenceOptions& options) {
  if (!(options.halfwidth > 0.0)) throw PreconditionViolated("sampling half-width must be positive");
  EquivalenceReport rep;
  rep.order = branch.order;
  rep.degree = branch.order + std::max(0, options.extra_degree);
  const int P = options.samples > 0 ? options.samples : 2 * rep.degree + 2;
  if (P < rep.degree) throw PreconditionViolated("fewer samples than fit coefficients");

  const double h = options.halfwidth;
  // The design matrix depends only on the nodes, so conditioning is checked
  // before any root is computed.
  Eigen::MatrixXd V(P, rep.degree);
  for (int i = 0; i < P; ++i) {
    const double t = h * std::cos(std::numbers::pi * (i + 0.5) / P);
    rep.t.push_back(t);
    double p = 1.0;
    for (int k = 0; k < rep.degree; ++k) {
      p *= t / h;
      V(i, k) = p;
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(V, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  rep.condition = sv[0] / sv[sv.size() - 1];
  if (!(rep.condition <= 1e12)) throw FitIllConditioned(rep.condition);

  const BranchingFunction bf(problem, branch.mode, options.branching);
  Eigen::VectorXd y(P);
  for (int i = 0; i < P; ++i) {
    const double t = rep.t[static_cast<std::size_t>(i)];
    const double lambda = branch.sigma * std::pow(t, branch.exponent);
    std::optional<double> prefer;
    if (branch.exponent > 1) prefer = branch.constants.front() * t;
    const auto a = bf.root(lambda, prefer);
    if (!a) throw NonConvergence("branching-equation root scan", options.branching.scan_intervals);
    rep.alpha.push_back(*a);
    y[i] = *a;
  }
  const Eigen::VectorXd coef = svd.solve(y);

  for (int k = 1; k <= branch.order; ++k) {
    double series = branch.constants[static_cast<std::size_t>(k - 1)];
    if (k == 2) series += options.perturb_c2;
    const double fitted = coef[k - 1] / std::pow(h, k);
    rep.series.push_back(series);
    rep.fitted.push_back(fitted);
    const double d = std::abs(fitted - series) / std::max(std::abs(series), 1e-12);
    rep.discrepancy.push_back(d);
    rep.max_discrepancy = std::max(rep.max_discrepancy, d);
  }
  return rep;
}

}  // namespace nekwave
