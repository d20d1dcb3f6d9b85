#include "nekwave/continuation.hpp"
#include "nekwave/errors.hpp"
#include "nekwave/series.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace nekwave;

namespace {

const Branch& nekrasov_branch() {
  static const Branch br = [] {
    ContinuationOptions opt;
    opt.max_steps = 200;
    return continue_branch(WaveProblem::nekrasov(32), 1, opt);
  }();
  return br;
}

const Branch& krasovskii_branch() {
  static const Branch br = continue_branch(WaveProblem::krasovskii(32), 1);
  return br;
}

}  // namespace

TEST_CASE("Newton from zero stays on the trivial branch") {
  for (double mu : {0.5, 2.0, 4.0, 7.5}) {
    const BranchPoint pt = newton_solve(WaveProblem::nekrasov(16), SineSeries::zero(16), mu);
    CHECK(pt.phi.coeffs().norm() == 0.0);
    CHECK(pt.diagnostics.newton_iters <= 2);
    CHECK(pt.residual == 0.0);
  }
}

TEST_CASE("Newton seeded by the series converges to the nearby solution") {
  const WaveProblem p = WaveProblem::nekrasov(64);
  const SeriesBranch br = nekrasov_nazarov_series(p, 1, 5);
  const SineSeries seed = br.evaluate(0.05);
  const BranchPoint pt = newton_solve(p, seed, 3.05);
  CHECK(pt.residual <= 1e-11);
  CHECK(pt.diagnostics.min_denominator > 1e-10);
  // O(λ⁶) with λ = 0.05 is about 1.6e-8.
  CHECK((pt.phi - seed).coeffs().norm() <= 1e-9);
  CHECK(pt.amplitude == doctest::Approx(pt.phi.coeff(1)));
}

TEST_CASE("Newton outside the admissible region reports the vanished denominator") {
  CHECK_THROWS_AS(newton_solve(WaveProblem::nekrasov(16), SineSeries::mode(16, 1, -1.5), 4.0), DenominatorVanished);
}

TEST_CASE("Newton budget exhaustion is typed") {
  NewtonOptions opt;
  opt.max_iters = 1;
  opt.polish = 0;
  const WaveProblem p = WaveProblem::nekrasov(16);
  CHECK_THROWS_AS(newton_solve(p, SineSeries::mode(16, 1, 0.3), 3.5, opt), NewtonDiverged);
}

TEST_CASE("amplitude-constrained solve near the bifurcation") {
  const WaveProblem p = WaveProblem::nekrasov(64);
  std::vector<double> gaps;
  for (double a : {1e-2, 1e-3, 1e-4}) {
    const BranchPoint pt = solve_at_amplitude(p, 1, a, SineSeries::mode(64, 1, a), 3.0);
    CHECK(pt.phi.coeff(1) == a);
    CHECK(pt.residual <= 1e-12);
    gaps.push_back(std::abs(pt.mu - 3.0));
  }
  CHECK(gaps[1] < gaps[0]);
  CHECK(gaps[2] < gaps[1]);
  // Transcritical crossing: μ − 3 ≈ α/C₁ = 9α.
  CHECK(gaps[2] / 1e-4 == doctest::Approx(9.0).epsilon(1e-2));
}

TEST_CASE("Nekrasov branch invariants") {
  const Branch& br = nekrasov_branch();
  REQUIRE(br.points.size() == 200);
  CHECK(br.termination == Termination::StepBudget);
  CHECK(br.origin.mu == 3.0);
  CHECK(std::abs(br.points.front().mu - 3.0) <= 10.0 * 0.02);
  CHECK(br.points.front().amplitude > 0.0);
  for (std::size_t i = 0; i < br.points.size(); ++i) {
    const BranchPoint& pt = br.points[i];
    CHECK(pt.residual <= 1e-10);
    CHECK(pt.diagnostics.min_denominator > 1e-10);
    CHECK(pt.phi(0.0) == 0.0);
    CHECK(pt.phi.at_half_turn_fraction(1, 1) == 0.0);
    if (i > 0) {
      CHECK(pt.amplitude > br.points[i - 1].amplitude);
      // Consecutive points stay within the arclength step that produced them.
      const double dx = std::hypot((pt.phi - br.points[i - 1].phi).coeffs().norm(), pt.mu - br.points[i - 1].mu);
      CHECK(dx <= 1.5 * pt.ds);
    }
  }
  CHECK(br.mu_min == doctest::Approx(br.points.front().mu));
  CHECK(br.mu_max >= br.mu_min);
}

TEST_CASE("Nekrasov branch tail approaches the characteristic value") {
  const Branch& br = nekrasov_branch();
  for (std::size_t i = 1; i < 10; ++i)
    CHECK(std::abs(br.points[i].mu - 3.0) > std::abs(br.points[i - 1].mu - 3.0));
}

TEST_CASE("an oversized first step is halved until the corrector succeeds") {
  ContinuationOptions opt;
  opt.ds = 5.0;
  opt.ds_max = 10.0;
  opt.max_steps = 5;
  const Branch br = continue_branch(WaveProblem::nekrasov(16), 1, opt);
  CHECK(br.halvings > 0);
  CHECK_FALSE(br.points.empty());
  for (const auto& pt : br.points) {
    CHECK(pt.residual <= 1e-10);
    // The corrector must not fall back onto the trivial branch.
    CHECK(pt.amplitude > 0.1);
  }
}

TEST_CASE("Krasovskii branch stays in the cone and stops at the slope bound") {
  const Branch& br = krasovskii_branch();
  REQUIRE_FALSE(br.points.empty());
  CHECK(br.termination == Termination::SlopeBound);
  CHECK(br.origin.mu == doctest::Approx(1.0).epsilon(1e-15));
  for (const auto& pt : br.points) {
    CHECK(pt.diagnostics.positivity_defect >= -1e-12);
    CHECK(pt.diagnostics.max_slope < kSlopeBound - 0.01);
    CHECK(pt.residual <= 1e-10);
    CHECK(pt.amplitude > 0.0);
  }
  CHECK(std::isfinite(br.mu_min));
  CHECK(std::isfinite(br.mu_max));
  CHECK(br.mu_min > 0.0);
  CHECK(br.mu_max <= 1.0);
}

TEST_CASE("Krasovskii μ-interval does not drift with amplitude") {
  const Branch& br = krasovskii_branch();
  SpectrumBounds early, all;
  for (std::size_t i = 0; i < br.points.size(); ++i) {
    all.add(br.points[i].mu);
    if (i < br.points.size() / 2) early.add(br.points[i].mu);
  }
  CHECK(all.lo() <= early.lo());
  CHECK(all.hi() >= early.hi());
  CHECK(all.hi() - all.lo() < 1.0);
  CHECK(all.lo() == br.mu_min);
}

TEST_CASE("monitor of a single positive mode") {
  const MonitorVerdict v = krasovskii_monitor(SineSeries::mode(16, 1, 0.1));
  CHECK(v.positivity_defect == 0.0);
  CHECK(v.phi_at_zero == 0.0);
  CHECK(v.phi_at_pi == 0.0);
  CHECK(v.max_slope == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(v.in_cone);
  CHECK(v.below_slope_bound);
}

TEST_CASE("monitor of the second mode leaves the cone") {
  const MonitorVerdict v = krasovskii_monitor(SineSeries::mode(16, 2, 0.1));
  CHECK(v.positivity_defect == doctest::Approx(-0.1).epsilon(1e-12));
  CHECK_FALSE(v.in_cone);
  const MonitorVerdict steep = krasovskii_monitor(SineSeries::mode(16, 1, 0.6));
  CHECK_FALSE(steep.below_slope_bound);
}

TEST_CASE("spectrum bounds track extremes") {
  SpectrumBounds b;
  CHECK(b.empty());
  for (double m : {1.0, 0.5, 2.0, 1.5}) b.add(m);
  CHECK_FALSE(b.empty());
  CHECK(b.lo() == 0.5);
  CHECK(b.hi() == 2.0);
}

TEST_CASE("near-origin solutions above the first characteristic value are the branch solution") {
  const WaveProblem p = WaveProblem::nekrasov(32);
  const double mu = 3.03;
  const SeriesBranch br = nekrasov_nazarov_series(p, 1, 5);
  const BranchPoint ref = newton_solve(p, br.evaluate(mu - 3.0), mu);
  const auto found = multistart_solutions(p, mu, 16, 0.2);
  for (const auto& s : found) {
    if (s.coeffs().norm() > 0.2) continue;
    const double d = std::min((s - ref.phi).coeffs().norm(), (s + ref.phi).coeffs().norm());
    CHECK(d <= 1e-9);
  }
}

TEST_CASE("termination reasons have stable names") {
  CHECK(to_string(Termination::StepBudget) == "StepBudget");
  CHECK(to_string(Termination::SlopeBound) == "SlopeBound");
  CHECK(to_string(Termination::DenominatorBreakdown) == "DenominatorBreakdown");
  CHECK(to_string(Termination::NewtonFailure) == "NewtonFailure");
}
