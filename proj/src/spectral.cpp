#include "nekwave/spectral.hpp"

#include "nekwave/errors.hpp"

#include <cmath>
#include <numbers>

namespace nekwave {

double sin_turn(std::int64_t k, std::int64_t m) {
  k %= m;
  if (k < 0) k += m;
  if (k == 0 || 2 * k == m) return 0.0;
  if (2 * k > m) return -sin_turn(m - k, m);
  if (4 * k == m) return 1.0;
  const double pi = std::numbers::pi;
  if (4 * k > m) return std::sin(pi * static_cast<double>(m - 2 * k) / static_cast<double>(m));
  return std::sin(2.0 * pi * static_cast<double>(k) / static_cast<double>(m));
}

namespace {

void require_finite(const Eigen::VectorXd& v, const char* what) {
  if (!v.allFinite()) throw PreconditionViolated(std::string(what) + " has non-finite entries");
}

}  // namespace

SineSeries::SineSeries(Eigen::VectorXd coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.size() < 1) throw PreconditionViolated("sine series needs at least one mode");
  require_finite(coeffs_, "sine series");
}

SineSeries SineSeries::zero(std::size_t modes) {
  return SineSeries(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(modes)));
}

SineSeries SineSeries::mode(std::size_t modes, std::size_t k, double amplitude) {
  if (k < 1 || k > modes) throw PreconditionViolated("mode index outside 1..N");
  Eigen::VectorXd c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(modes));
  c[static_cast<Eigen::Index>(k - 1)] = amplitude;
  return SineSeries(std::move(c));
}

double SineSeries::operator()(double theta) const {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < coeffs_.size(); ++i)
    sum += coeffs_[i] * std::sin(static_cast<double>(i + 1) * theta);
  return sum;
}

double SineSeries::at_half_turn_fraction(std::int64_t j, std::int64_t p) const {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < coeffs_.size(); ++i)
    sum += coeffs_[i] * sin_turn(static_cast<std::int64_t>(i + 1) * j, 2 * p);
  return sum;
}

SineSeries SineSeries::resized(std::size_t modes) const {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(modes));
  const Eigen::Index keep = std::min<Eigen::Index>(c.size(), coeffs_.size());
  c.head(keep) = coeffs_.head(keep);
  return SineSeries(std::move(c));
}

SineSeries& SineSeries::operator+=(const SineSeries& o) {
  if (o.modes() != modes()) throw PreconditionViolated("sine series mode counts differ");
  coeffs_ += o.coeffs_;
  return *this;
}

SineSeries& SineSeries::operator-=(const SineSeries& o) {
  if (o.modes() != modes()) throw PreconditionViolated("sine series mode counts differ");
  coeffs_ -= o.coeffs_;
  return *this;
}

SineSeries& SineSeries::operator*=(double s) {
  coeffs_ *= s;
  return *this;
}

double CosineSeries::operator()(double theta) const {
  double sum = mean;
  for (Eigen::Index i = 0; i < coeffs.size(); ++i)
    sum += coeffs[i] * std::cos(static_cast<double>(i + 1) * theta);
  return sum;
}

GridFunction::GridFunction(Eigen::VectorXd values) : values_(std::move(values)) {
  if (values_.size() < 2 || values_.size() % 2 != 0)
    throw PreconditionViolated("grid size must be even and at least 2");
  require_finite(values_, "grid function");
}

double GridFunction::theta(std::size_t j) const {
  return 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(size());
}

GridFunction to_grid(const SineSeries& s, std::size_t grid) {
  if (grid < 2 * s.modes() + 2) throw GridTooSmall(grid, s.modes());
  if (grid % 2 != 0) throw PreconditionViolated("grid size must be even");
  const auto m = static_cast<std::int64_t>(grid);
  Eigen::VectorXd v(m);
  for (std::int64_t j = 0; j < m; ++j) {
    double sum = 0.0;
    for (std::size_t n = 1; n <= s.modes(); ++n)
      sum += s.coeff(n) * sin_turn(static_cast<std::int64_t>(n) * j, m);
    v[j] = sum;
  }
  return GridFunction(std::move(v));
}

GridFunction to_grid(const CosineSeries& c, std::size_t grid) {
  if (grid < 2 * static_cast<std::size_t>(c.coeffs.size()) + 2)
    throw GridTooSmall(grid, static_cast<std::size_t>(c.coeffs.size()));
  if (grid % 2 != 0) throw PreconditionViolated("grid size must be even");
  const auto m = static_cast<std::int64_t>(grid);
  Eigen::VectorXd v(m);
  for (std::int64_t j = 0; j < m; ++j) {
    double sum = c.mean;
    for (Eigen::Index i = 0; i < c.coeffs.size(); ++i)
      sum += c.coeffs[i] * cos_turn((i + 1) * j, m);
    v[j] = sum;
  }
  return GridFunction(std::move(v));
}

SineSeries from_grid(const GridFunction& g, std::size_t modes) {
  const std::size_t grid = g.size();
  if (modes < 1) throw PreconditionViolated("at least one mode required");
  if (modes > grid / 2 - 1) throw ModeCountTooLarge(modes, grid);
  const auto m = static_cast<std::int64_t>(grid);
  Eigen::VectorXd a(static_cast<Eigen::Index>(modes));
  for (std::size_t n = 1; n <= modes; ++n) {
    double sum = 0.0;
    for (std::int64_t j = 0; j < m; ++j)
      sum += g.values()[j] * sin_turn(static_cast<std::int64_t>(n) * j, m);
    a[static_cast<Eigen::Index>(n - 1)] = 2.0 * sum / static_cast<double>(grid);
  }
  return SineSeries(std::move(a));
}

CosineSeries cumulative_integral(const SineSeries& s) {
  CosineSeries out;
  out.coeffs.resize(static_cast<Eigen::Index>(s.modes()));
  for (std::size_t n = 1; n <= s.modes(); ++n) {
    const double an = s.coeff(n) / static_cast<double>(n);
    out.mean += an;
    out.coeffs[static_cast<Eigen::Index>(n - 1)] = -an;
  }
  return out;
}

CosineSeries conjugate(const SineSeries& s) {
  CosineSeries out;
  out.mean = 0.0;
  out.coeffs = -s.coeffs();
  return out;
}

SineSeries conjugate(const CosineSeries& c) {
  if (std::abs(c.mean) > 0.0) throw PreconditionViolated("conjugate of a series with nonzero mean");
  return SineSeries(c.coeffs);
}

GridFunction pointwise_map(const GridFunction& g, PointwiseMap f) {
  Eigen::VectorXd v = g.values();
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    switch (f) {
      case PointwiseMap::Sin:
        v[j] = std::sin(v[j]);
        break;
      case PointwiseMap::Exp3:
        v[j] = std::exp(3.0 * v[j]);
        break;
      case PointwiseMap::Reciprocal:
        if (v[j] == 0.0)
          throw DomainViolation("reciprocal of zero", static_cast<std::size_t>(j));
        v[j] = 1.0 / v[j];
        break;
    }
  }
  return GridFunction(std::move(v));
}

double sin_minus_identity(double x) {
  if (std::abs(x) > 0.5) return std::sin(x) - x;
  // −x³/3! + x⁵/5! − …
  const double x2 = x * x;
  double term = -x * x2 / 6.0;
  double sum = term;
  for (int k = 2; k < 20; ++k) {
    term *= -x2 / static_cast<double>((2 * k) * (2 * k + 1));
    sum += term;
    if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

SpectralPlan::SpectralPlan(std::size_t modes, std::size_t grid) : modes_(modes), grid_(grid) {
  if (grid % 4 != 0) throw PreconditionViolated("plan grid size must be a multiple of 4");
  if (modes < 1) throw PreconditionViolated("at least one mode required");
  if (modes > inner_modes()) throw ModeCountTooLarge(modes, grid);
  const auto m = static_cast<Eigen::Index>(grid);
  const auto n = static_cast<Eigen::Index>(modes);
  const auto ni = static_cast<Eigen::Index>(inner_modes());

  synth_sin_.resize(m, n);
  synth_cos_.resize(m, n);
  for (Eigen::Index j = 0; j < m; ++j)
    for (Eigen::Index k = 0; k < n; ++k) {
      synth_sin_(j, k) = sin_turn((k + 1) * j, m);
      synth_cos_(j, k) = cos_turn((k + 1) * j, m);
    }

  Eigen::MatrixXd full(ni, m);
  for (Eigen::Index k = 0; k < ni; ++k)
    for (Eigen::Index j = 0; j < m; ++j)
      full(k, j) = 2.0 * sin_turn((k + 1) * j, m) / static_cast<double>(m);
  analysis_ = full.topRows(n);

  Eigen::MatrixXd antideriv(m, ni);
  for (Eigen::Index j = 0; j < m; ++j)
    for (Eigen::Index k = 0; k < ni; ++k)
      antideriv(j, k) = (1.0 - cos_turn((k + 1) * j, m)) / static_cast<double>(k + 1);
  cumulative_ = antideriv * full;
}

}  // namespace nekwave
