#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <utility>

#include "symcap/errors.hpp"

namespace symcap {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

/// Thresholds shared across verdicts. All strictly positive.
struct Tolerances {
  double psd_tol = 1e-9;       ///< relative threshold for PSD verdicts
  double eig_tol = 1e-10;      ///< eigen-residual bound
  double quantile_tol = 1e-12; ///< chi-square inversion tolerance

  void validate() const {
    if (!(psd_tol > 0.0) || !(eig_tol > 0.0) || !(quantile_tol > 0.0)) {
      throw InvalidInput("tolerances must be strictly positive");
    }
  }
};

namespace detail {

inline bool all_finite(const Mat& m) { return m.allFinite(); }

inline bool all_finite(const CMat& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) return false;
    }
  }
  return true;
}

}  // namespace detail

/// Real symmetric matrix; construction symmetrizes so entries(i,j) == entries(j,i)
/// holds exactly.
class SymMatrix {
public:
  explicit SymMatrix(const Mat& a) {
    if (a.rows() != a.cols() || a.rows() == 0) {
      throw InvalidInput("SymMatrix requires a nonempty square matrix");
    }
    m_ = 0.5 * (a + a.transpose());
  }

  [[nodiscard]] int dim() const { return static_cast<int>(m_.rows()); }
  [[nodiscard]] const Mat& mat() const { return m_; }

private:
  Mat m_;
};

/// Complex Hermitian matrix; construction averages with the conjugate transpose.
class HermMatrix {
public:
  explicit HermMatrix(const CMat& a) {
    if (a.rows() != a.cols() || a.rows() == 0) {
      throw InvalidInput("HermMatrix requires a nonempty square matrix");
    }
    h_ = 0.5 * (a + a.adjoint());
  }

  explicit HermMatrix(const SymMatrix& s) : h_(s.mat().cast<std::complex<double>>()) {}

  [[nodiscard]] int dim() const { return static_cast<int>(h_.rows()); }
  [[nodiscard]] const CMat& mat() const { return h_; }

private:
  CMat h_;
};

/// Eigendecomposition of a symmetric matrix, eigenvalues descending,
/// eigenvectors in matching columns.
struct SymEigen {
  Vec values;
  Mat vectors;
};

inline SymEigen eig_sym(const SymMatrix& m) {
  if (!detail::all_finite(m.mat())) throw InvalidInput("eig_sym: non-finite entries");
  Eigen::SelfAdjointEigenSolver<Mat> solver(m.mat());
  if (solver.info() != Eigen::Success) throw Error("eig_sym: eigensolver failed");
  const int d = m.dim();
  SymEigen out;
  out.values = solver.eigenvalues().reverse();
  out.vectors.resize(d, d);
  for (int j = 0; j < d; ++j) out.vectors.col(j) = solver.eigenvectors().col(d - 1 - j);
  return out;
}

/// Smallest eigenvalue of a Hermitian matrix (all of which are real).
inline double eig_herm_min(const HermMatrix& h) {
  if (!detail::all_finite(h.mat())) throw InvalidInput("eig_herm_min: non-finite entries");
  Eigen::SelfAdjointEigenSolver<CMat> solver(h.mat());
  if (solver.info() != Eigen::Success) throw Error("eig_herm_min: eigensolver failed");
  return solver.eigenvalues().minCoeff();
}

/// Symmetric PSD square root: R with R*R == m. Rejects matrices indefinite
/// beyond psd_tol relative to their spectral norm.
inline SymMatrix sqrtm_psd(const SymMatrix& m, const Tolerances& tol = {}) {
  const SymEigen eig = eig_sym(m);
  const double lam_max = eig.values.cwiseAbs().maxCoeff();
  const double floor = -tol.psd_tol * std::max(1.0, lam_max);
  Vec roots(eig.values.size());
  for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
    const double lam = eig.values[i];
    if (lam < floor) throw NotPositiveSemidefinite("sqrtm_psd: matrix is indefinite");
    roots[i] = std::sqrt(std::max(lam, 0.0));
  }
  return SymMatrix(eig.vectors * roots.asDiagonal() * eig.vectors.transpose());
}

/// PSD verdict: smallest eigenvalue of h down to -psd_tol * max(1, ||h||).
inline bool is_psd(const HermMatrix& h, const Tolerances& tol = {}) {
  if (!detail::all_finite(h.mat())) throw InvalidInput("is_psd: non-finite entries");
  Eigen::SelfAdjointEigenSolver<CMat> solver(h.mat());
  if (solver.info() != Eigen::Success) throw Error("is_psd: eigensolver failed");
  const double lam_min = solver.eigenvalues().minCoeff();
  const double norm = solver.eigenvalues().cwiseAbs().maxCoeff();
  return lam_min >= -tol.psd_tol * std::max(1.0, norm);
}

namespace detail {

/// Regularized lower incomplete gamma P(a, x), series branch (x < a + 1).
inline double gamma_p_series(double a, double x) {
  double sum = 1.0 / a;
  double term = sum;
  double ap = a;
  for (int i = 0; i < 1000; ++i) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-17) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

/// Regularized upper incomplete gamma Q(a, x) via Lentz continued fraction
/// (x >= a + 1).
inline double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 1000; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-17) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

/// Regularized lower incomplete gamma P(a, x) = gamma(a, x) / Gamma(a).
inline double regularized_gamma_p(double a, double x) {
  if (!(a > 0.0) || x < 0.0 || !std::isfinite(x)) {
    throw InvalidInput("regularized_gamma_p: invalid arguments");
  }
  if (x == 0.0) return 0.0;
  return (x < a + 1.0) ? gamma_p_series(a, x) : 1.0 - gamma_q_cf(a, x);
}

inline double chi2_cdf(int dof, double q) {
  return regularized_gamma_p(0.5 * dof, 0.5 * q);
}

inline double chi2_pdf(int dof, double q) {
  const double a = 0.5 * dof;
  if (q <= 0.0) return 0.0;
  return 0.5 * std::exp((a - 1.0) * std::log(0.5 * q) - 0.5 * q - std::lgamma(a));
}

}  // namespace detail

/// Quantile of the chi-square distribution: q with CDF_dof(q) == alpha to
/// quantile_tol. Bracketed bisection refined by Newton on the regularized
/// incomplete gamma.
inline double chi2_quantile(int dof, double alpha, const Tolerances& tol = {}) {
  if (dof < 1) throw InvalidInput("chi2_quantile: dof must be positive");
  if (!(alpha > 0.0) || !(alpha < 1.0)) {
    throw InvalidInput("chi2_quantile: alpha must lie in (0, 1)");
  }
  double lo = 0.0;
  double hi = std::max<double>(dof, 1.0);
  while (detail::chi2_cdf(dof, hi) < alpha) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e12) throw Error("chi2_quantile: bracket expansion failed");
  }
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (detail::chi2_cdf(dof, mid) < alpha) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 1e-15 * std::max(1.0, hi)) break;
  }
  double q = 0.5 * (lo + hi);
  for (int i = 0; i < 50; ++i) {
    const double f = detail::chi2_cdf(dof, q) - alpha;
    if (std::abs(f) <= tol.quantile_tol) break;
    const double fp = detail::chi2_pdf(dof, q);
    if (!(fp > 0.0)) break;
    double next = q - f / fp;
    if (!(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);
    if (f > 0.0) {
      hi = q;
    } else {
      lo = q;
    }
    q = next;
  }
  return q;
}

}  // namespace symcap
