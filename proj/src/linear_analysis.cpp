#include "nekwave/linear_analysis.hpp"

#include "nekwave/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>

namespace nekwave {

namespace {

bool is_diagonal(const Eigen::MatrixXd& B) {
  for (Eigen::Index j = 0; j < B.cols(); ++j)
    for (Eigen::Index i = 0; i < B.rows(); ++i)
      if (i != j && B(i, j) != 0.0) return false;
  return true;
}

struct Eigenpair {
  double mu;
  Eigen::Index index;  // diagonal position, or −1 for dense
};

std::vector<double> real_positive_eigenvalues(const Eigen::MatrixXd& B) {
  std::vector<double> lambdas;
  const double scale = std::max(B.cwiseAbs().maxCoeff(), 1e-300);
  // Eigenvalues within the solver's backward error of zero are zero.
  const double noise = static_cast<double>(B.rows()) * std::numeric_limits<double>::epsilon() * B.norm();
  if ((B - B.transpose()).cwiseAbs().maxCoeff() <= 1e-14 * scale) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
      throw NonConvergence("symmetric eigensolver", 30 * static_cast<int>(B.rows()));
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
      if (es.eigenvalues()[i] > noise) lambdas.push_back(es.eigenvalues()[i]);
  } else {
    // Eigen's real Schur iteration allows 40 sweeps per row.
    Eigen::EigenSolver<Eigen::MatrixXd> es(B, false);
    if (es.info() != Eigen::Success)
      throw NonConvergence("dense eigensolver", 40 * static_cast<int>(B.rows()));
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
      const auto z = es.eigenvalues()[i];
      if (std::abs(z.imag()) <= 1e-12 * std::abs(z) && z.real() > noise) lambdas.push_back(z.real());
    }
  }
  return lambdas;
}

std::vector<SineSeries> null_basis(const Eigen::MatrixXd& B, double mu, int count) {
  const auto n = B.rows();
  const Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n) - mu * B;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
  // Singular values come sorted descending; the kernel is the tail.
  std::vector<SineSeries> out;
  for (int i = 0; i < count; ++i) {
    Eigen::VectorXd v = svd.matrixV().col(n - 1 - i);
    // Fix the sign so the largest entry is positive.
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v[arg] < 0.0) v = -v;
    out.emplace_back(std::move(v));
  }
  return out;
}

}  // namespace

std::vector<CharValue> char_values(const Eigen::MatrixXd& B, std::size_t n_max, const LinearTolerances& tol) {
  if (B.rows() != B.cols() || B.rows() == 0) throw PreconditionViolated("B must be square and non-empty");
  const auto n = B.rows();

  std::vector<Eigenpair> pairs;
  const bool diagonal = is_diagonal(B);
  if (diagonal) {
    for (Eigen::Index i = 0; i < n; ++i)
      if (B(i, i) > 0.0) pairs.push_back({1.0 / B(i, i), i});
  } else {
    for (double l : real_positive_eigenvalues(B)) pairs.push_back({1.0 / l, -1});
  }
  std::stable_sort(pairs.begin(), pairs.end(), [](const Eigenpair& a, const Eigenpair& b) { return a.mu < b.mu; });

  std::vector<CharValue> out;
  std::size_t i = 0;
  while (i < pairs.size() && out.size() < n_max) {
    std::size_t j = i + 1;
    while (j < pairs.size() && pairs[j].mu - pairs[i].mu <= tol.cluster * pairs[i].mu) ++j;
    CharValue cv;
    cv.mu = pairs[i].mu;
    cv.multiplicity = static_cast<int>(j - i);
    cv.guaranteed = cv.multiplicity % 2 == 1;
    if (diagonal) {
      for (std::size_t k = i; k < j; ++k)
        cv.eigenfunctions.push_back(SineSeries::mode(static_cast<std::size_t>(n),
                                                     static_cast<std::size_t>(pairs[k].index) + 1));
    } else {
      cv.eigenfunctions = null_basis(B, cv.mu, cv.multiplicity);
    }
    out.push_back(std::move(cv));
    i = j;
  }
  return out;
}

Eigen::VectorXd fredholm_solve(const Eigen::MatrixXd& B, double mu, const Eigen::VectorXd& rhs,
                               const LinearTolerances& tol) {
  const auto n = B.rows();
  if (B.cols() != n || rhs.size() != n) throw PreconditionViolated("dimension mismatch in fredholm_solve");
  const double scale = std::max(1.0, rhs.norm());

  if (is_diagonal(B)) {
    Eigen::VectorXd x(n);
    double proj2 = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double d = 1.0 - mu * B(i, i);
      if (std::abs(d) <= tol.singular) {
        proj2 += rhs[i] * rhs[i];
        x[i] = 0.0;
      } else {
        x[i] = rhs[i] / d;
      }
    }
    if (std::sqrt(proj2) > tol.orthogonal * scale) throw IncompatibleSingularSystem(mu, std::sqrt(proj2));
    return x;
  }

  const Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n) - mu * B;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const Eigen::VectorXd ut = svd.matrixU().transpose() * rhs;
  Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
  double proj2 = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (sv[i] <= tol.singular)
      proj2 += ut[i] * ut[i];
    else
      y[i] = ut[i] / sv[i];
  }
  if (std::sqrt(proj2) > tol.orthogonal * scale) throw IncompatibleSingularSystem(mu, std::sqrt(proj2));
  return svd.matrixV() * y;
}

SineSeries fredholm_solve(const Eigen::MatrixXd& B, double mu, const SineSeries& rhs, const LinearTolerances& tol) {
  return SineSeries(fredholm_solve(B, mu, rhs.coeffs(), tol));
}

std::vector<CharValue> detect_bifurcations(const WaveProblem& problem, double lo, double hi, int scan_steps,
                                           const LinearTolerances& tol) {
  return detect_bifurcations(linearize(problem).B, lo, hi, scan_steps, tol);
}

std::vector<CharValue> detect_bifurcations(const Eigen::MatrixXd& B, double lo, double hi, int scan_steps,
                                           const LinearTolerances& tol) {
  if (!(lo >= 0.0) || !(hi > lo)) throw PreconditionViolated("mu range must be positive and non-empty");
  if (scan_steps < 2) throw PreconditionViolated("at least two scan steps required");

  const auto all = char_values(B, static_cast<std::size_t>(B.rows()), tol);

  // Number of eigenvalues of I − μB that have crossed zero, i.e. charvals below μ.
  auto crossed = [&](double mu) {
    int count = 0;
    for (const auto& cv : all)
      if (cv.mu < mu) count += cv.multiplicity;
    return count;
  };

  std::vector<CharValue> out;
  double prev_mu = lo;
  int prev = crossed(lo);
  for (int j = 1; j <= scan_steps; ++j) {
    const double mu = lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(scan_steps);
    const int now = crossed(mu);
    if (now != prev) {
      for (const auto& cv : all)
        if (cv.mu >= prev_mu && cv.mu < mu && cv.mu > lo && cv.mu < hi) out.push_back(cv);
    }
    prev = now;
    prev_mu = mu;
  }
  return out;
}

}  // namespace nekwave
