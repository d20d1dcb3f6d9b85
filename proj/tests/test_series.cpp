#include "nekwave/errors.hpp"
#include "nekwave/operators.hpp"
#include "nekwave/series.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace nekwave;

namespace {

const SeriesBranch& nekrasov_branch() {
  static const SeriesBranch br = nekrasov_nazarov_series(WaveProblem::nekrasov(64), 1, 5);
  return br;
}

}  // namespace

TEST_CASE("first-order term is a multiple of sin θ") {
  const SeriesBranch br = nekrasov_nazarov_series(WaveProblem::nekrasov(32), 1, 1);
  REQUIRE(br.terms.size() == 1);
  const SineSeries& p1 = br.terms.front();
  CHECK(p1.coeff(1) != 0.0);
  for (std::size_t n = 2; n <= 32; ++n) CHECK(p1.coeff(n) == 0.0);
  CHECK(br.exponent == 1);
  CHECK(br.mu_star == 3.0);
}

TEST_CASE("Nekrasov constants through order five") {
  const SeriesBranch& br = nekrasov_branch();
  CHECK(br.exponent == 1);
  CHECK(br.sigma == 1.0);
  REQUIRE(br.constants.size() == 5);
  // C₁ = β/γ with β = 1/3 and γ = 3 from the quadratic term of sin Φ / w.
  CHECK(br.constants[0] == doctest::Approx(1.0 / 9.0).epsilon(1e-13));
  CHECK(br.constants[1] == doctest::Approx(-0.032921810699588404).epsilon(1e-10));
}

TEST_CASE("series residual decays like λ^{K+1}") {
  const WaveProblem p = WaveProblem::nekrasov(64);
  const ResidualSweep sw = residual_sweep(p, nekrasov_branch(), {1e-1, 3e-2, 1e-2, 3e-3, 1e-3});
  CHECK(sw.expected == 6.0);
  CHECK(sw.slope >= 5.7);
  const ResidualSweep sparse = residual_sweep(p, nekrasov_branch(), {1e-1, 1e-2, 1e-3});
  CHECK(sparse.slope >= 5.7);
}

TEST_CASE("higher terms carry no eigen-component beyond their constant") {
  const SeriesBranch& br = nekrasov_branch();
  for (std::size_t k = 1; k < br.terms.size(); ++k) {
    const SineSeries psi = br.terms[k] - SineSeries::mode(64, 1, br.constants[k]);
    CHECK(psi.coeff(1) == 0.0);
    CHECK(br.terms[k].coeff(1) == br.constants[k]);
  }
}

TEST_CASE("order-k right-hand side is linear in the previous term for k ≥ 3") {
  const WaveProblem p = WaveProblem::nekrasov(32);
  const WaveOperator op(p);
  const SeriesBranch br = nekrasov_nazarov_series(p, 1, 5);
  std::mt19937_64 rng(79);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 3; k <= 5; ++k) {
    std::vector<Eigen::VectorXd> terms;
    for (int j = 0; j < k - 1; ++j) terms.push_back(br.terms[static_cast<std::size_t>(j)].coeffs());
    std::vector<double> mu(static_cast<std::size_t>(k) + 1, 0.0);
    mu[0] = br.mu_star;
    mu[1] = 1.0;
    Eigen::VectorXd d1(32), d2(32);
    for (Eigen::Index i = 0; i < 32; ++i) {
      d1[i] = u(rng) / (i + 1);
      d2[i] = u(rng) / (i + 1);
    }
    auto rhs_with = [&](const Eigen::VectorXd& delta) {
      auto t = terms;
      t.back() += delta;
      return recurrence_rhs(op, t, mu, k);
    };
    const Eigen::VectorXd base = rhs_with(Eigen::VectorXd::Zero(32));
    const Eigen::VectorXd r1 = rhs_with(d1) - base;
    const Eigen::VectorXd r2 = rhs_with(d2) - base;
    const Eigen::VectorXd r12 = rhs_with(d1 + d2) - base;
    const Eigen::VectorXd r3 = rhs_with(3.0 * d1) - base;
    CAPTURE(k);
    CHECK((r12 - r1 - r2).norm() <= 1e-12 * (r1.norm() + r2.norm()));
    CHECK((r3 - 3.0 * r1).norm() <= 1e-12 * r1.norm());
  }
}

TEST_CASE("first constant agrees with the branching-function root") {
  const WaveProblem p = WaveProblem::nekrasov(64);
  const BranchingFunction F(p, 1);
  const double lambda = 2e-4;
  const auto up = F.root(lambda);
  const auto down = F.root(-lambda);
  REQUIRE(up);
  REQUIRE(down);
  // Central difference cancels the even-order terms, leaving C₃λ² ≈ 4e-9 C₁.
  const double c1 = (*up - *down) / (2.0 * lambda);
  CHECK(std::abs(c1 - nekrasov_branch().constants[0]) <= 1e-8 * nekrasov_branch().constants[0]);
}

TEST_CASE("zero solution persists in the reduced equation") {
  const BranchingFunction F(WaveProblem::nekrasov(32), 1);
  for (double lambda : {-0.1, -0.01, 0.0, 0.02, 0.3}) {
    const BranchingSample s = F(0.0, lambda);
    CHECK(s.F == 0.0);
    CHECK(s.psi.coeffs().norm() == 0.0);
  }
}

TEST_CASE("complement solution is orthogonal to the eigenfunction") {
  const BranchingFunction F(WaveProblem::nekrasov(32), 1);
  for (double alpha : {-0.05, 0.01, 0.08}) {
    const BranchingSample s = F(alpha, 0.01);
    CHECK(std::abs(s.psi.coeff(1)) <= 1e-12);
    CHECK(std::isfinite(s.F));
  }
  const BranchingSample s = lyapunov_schmidt_reduce(WaveProblem::nekrasov(32), 2, 0.02, -0.1);
  CHECK(std::abs(s.psi.coeff(2)) <= 1e-12);
}

TEST_CASE("branching root matches the series amplitude") {
  const WaveProblem p = WaveProblem::nekrasov(64);
  const BranchingFunction F(p, 1);
  for (double lambda : {-0.02, -0.01, 0.01, 0.02}) {
    const auto a = F.root(lambda);
    REQUIRE(a);
    const double series = nekrasov_branch().amplitude(lambda);
    CHECK(std::abs(*a - series) <= 1e-6 * std::abs(series));
  }
}

TEST_CASE("reduced function of the Nekrasov problem has a quadratic even part") {
  // F(α, λ) ≈ −λB₁₁α + κα², and the root α ≈ λB₁₁/κ fixes κ = B₁₁/C₁.
  const BranchingFunction F(WaveProblem::nekrasov(64), 1);
  const double kappa = (1.0 / 3.0) / nekrasov_branch().constants[0];
  const double alpha = 1e-3;
  const double even = (F(alpha, 0.0).F + F(-alpha, 0.0).F) / (2.0 * alpha * alpha);
  CHECK(even == doctest::Approx(kappa).epsilon(1e-4));
  const double lambda = 1e-2;
  const double odd = (F(1e-6, lambda).F - F(-1e-6, lambda).F) / 2e-6;
  CHECK(odd == doctest::Approx(-lambda / 3.0).epsilon(1e-6));
}

TEST_CASE("reduced function of the Krasovskii problem is odd in α") {
  const BranchingFunction F(WaveProblem::krasovskii(32), 1);
  for (double lambda : {-0.05, 0.0, 0.03}) {
    for (double alpha : {1e-3, 0.02, 0.1}) {
      const double fp = F(alpha, lambda).F;
      const double fm = F(-alpha, lambda).F;
      CHECK(std::abs(fp + fm) <= 1e-10 * std::max(1.0, std::abs(fp)));
    }
  }
}

TEST_CASE("Krasovskii branch is a pitchfork on the subcritical side") {
  const WaveProblem p = WaveProblem::krasovskii(64);
  const SeriesBranch br = nekrasov_nazarov_series(p, 1, 5);
  CHECK(br.mu_star == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(br.exponent == 2);
  CHECK(br.sigma == -1.0);
  CHECK(br.constants[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(br.constants[1]) <= 1e-12);
  const ResidualSweep sw = residual_sweep(p, br, {-1e-1, -3e-2, -1e-2, -3e-3, -1e-3});
  CHECK(sw.expected == 3.0);
  CHECK(sw.slope >= sw.expected - 0.3);
}

TEST_CASE("cubic Hammerstein nonlinearity gives a fractional-exponent series") {
  const WaveProblem p = WaveProblem::hammerstein(64, {0.0, 1.0, 0.0, 1.0}, 1.0);
  const SeriesBranch br = nekrasov_nazarov_series(p, 1, 5);
  CHECK(br.exponent == 2);
  CHECK(br.mu_star == 3.0);
  std::vector<double> lambdas;
  for (double l : {1e-1, 3e-2, 1e-2, 3e-3, 1e-3}) lambdas.push_back(br.sigma * l);
  const ResidualSweep sw = residual_sweep(p, br, lambdas);
  CHECK(sw.slope >= sw.expected - 0.3);
  // λ → −λ with t → −t maps the branch to its reflection.
  CHECK((br.evaluate_t(0.05) + br.evaluate_t(-0.05)).coeffs().norm() <= 1e-15);
}

TEST_CASE("series for a finite-depth kernel and a higher mode") {
  const WaveProblem p = WaveProblem::nekrasov(64, 3.0, Kernel::finite_depth(0.3, 1.0, 64));
  const SeriesBranch br = nekrasov_nazarov_series(p, 2, 4);
  CHECK(br.mu_star == doctest::Approx(6.0 / std::tanh(4.0 * std::acos(-1.0) * 0.3)).epsilon(1e-14));
  const ResidualSweep sw = residual_sweep(p, br, {1e-1, 3e-2, 1e-2, 3e-3});
  CHECK(sw.slope >= 4.7);
  for (const auto& t : br.terms)
    for (std::size_t n = 1; n <= 64; n += 2) CHECK(std::abs(t.coeff(n)) <= 1e-14);
}

TEST_CASE("series errors") {
  CHECK_THROWS_AS(nekrasov_nazarov_series(WaveProblem::nekrasov(8), 1, 8), OrderTooHigh);
  CHECK_THROWS_AS(nekrasov_nazarov_series(WaveProblem::nekrasov(8), 1, 0), PreconditionViolated);
  CHECK_THROWS_AS(nekrasov_nazarov_series(WaveProblem::nekrasov(8), 9, 1), PreconditionViolated);
  CHECK_THROWS_AS(nekrasov_nazarov_series(WaveProblem::hammerstein(16, {0.0, 1.0}), 1, 2), SolvabilityFailure);
  CHECK_THROWS_AS(nekrasov_nazarov_series(WaveProblem::hammerstein(16, {0.5, 1.0, 1.0}), 1, 2),
                  PreconditionViolated);
  try {
    nekrasov_nazarov_series(WaveProblem::hammerstein(16, {0.0, 1.0}), 1, 2);
  } catch (const SolvabilityFailure& e) {
    CHECK(std::string(e.what()).find("polynomial") != std::string::npos);
  }
}

TEST_CASE("series and branching root curve share their Taylor coefficients") {
  const WaveProblem p = WaveProblem::nekrasov(64);
  const EquivalenceReport one = equivalence_check(p, 1, 1);
  CHECK(one.max_discrepancy <= 1e-8);
  const EquivalenceReport four = equivalence_check(p, 1, 4);
  REQUIRE(four.discrepancy.size() == 4);
  CHECK(four.max_discrepancy <= 1e-6);
  CHECK(four.condition <= 1e12);
}

TEST_CASE("perturbing the second constant is detected") {
  EquivalenceOptions opt;
  opt.perturb_c2 = 1e-3;
  const EquivalenceReport rep = equivalence_check(WaveProblem::nekrasov(32), 1, 2, opt);
  CHECK(rep.discrepancy[1] >= 1e-4);
}

TEST_CASE("over-fitted root curves are rejected before sampling") {
  EquivalenceOptions opt;
  opt.extra_degree = 60;
  CHECK_THROWS_AS(equivalence_check(WaveProblem::nekrasov(32), 1, 2, opt), FitIllConditioned);
}
