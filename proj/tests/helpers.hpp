#pragma once

// Shared generators and independent oracles for the test suites. Everything
// here stays off the library's implementation paths: Mahalanobis oracles use
// explicit inverses, the chi-square oracle integrates the density, PSD
// cross-checks enumerate principal minors.

#include <random>
#include <vector>

#include "symcap/symcap.hpp"

namespace testutil {

using symcap::CMat;
using symcap::Mat;
using symcap::Vec;

inline Mat random_gaussian(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Mat m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = gauss(rng);
  }
  return m;
}

inline Mat random_orthogonal(int dim, std::mt19937_64& rng) {
  const Mat g = random_gaussian(dim, dim, rng);
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ();
  // fix signs so the distribution is Haar-like
  const Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < dim; ++i) {
    if (r(i, i) < 0.0) q.col(i) *= -1.0;
  }
  return q;
}

/// Well-conditioned random symmetric positive definite matrix with
/// eigenvalues in [lam_min, lam_max].
inline Mat random_pd(int dim, std::mt19937_64& rng, double lam_min = 0.3,
                     double lam_max = 3.0) {
  const Mat q = random_orthogonal(dim, rng);
  std::uniform_real_distribution<double> lam(lam_min, lam_max);
  Vec d(dim);
  for (int i = 0; i < dim; ++i) d[i] = lam(rng);
  const Mat m = q * d.asDiagonal() * q.transpose();
  return 0.5 * (m + m.transpose());
}

/// Random symplectic matrix as a product of elementary factors:
/// block shears [[I,B],[0,I]], [[I,0],[C,I]] (B, C symmetric), the block
/// map [[A,0],[0,A^-T]], and J itself.
inline Mat random_symplectic(int n, std::mt19937_64& rng, int factors = 4) {
  std::uniform_real_distribution<double> small(-0.5, 0.5);
  std::uniform_int_distribution<int> which(0, 3);
  const Mat eye = Mat::Identity(n, n);
  Mat s = Mat::Identity(2 * n, 2 * n);
  for (int f = 0; f < factors; ++f) {
    Mat factor = Mat::Identity(2 * n, 2 * n);
    switch (which(rng)) {
      case 0: {
        Mat b = random_gaussian(n, n, rng) * 0.4;
        b = 0.5 * (b + b.transpose());
        factor.topRightCorner(n, n) = b;
        break;
      }
      case 1: {
        Mat c = random_gaussian(n, n, rng) * 0.4;
        c = 0.5 * (c + c.transpose());
        factor.bottomLeftCorner(n, n) = c;
        break;
      }
      case 2: {
        const Mat a = eye + 0.4 * random_gaussian(n, n, rng);
        if (std::abs(a.determinant()) < 0.2) continue;  // keep the factor tame
        factor.topLeftCorner(n, n) = a;
        factor.bottomRightCorner(n, n) = a.inverse().transpose();
        break;
      }
      default:
        factor = symcap::standard_j(n);
        break;
    }
    s = s * factor;
  }
  return s;
}

/// Random invertible matrix with a conditioning guard.
inline Mat random_invertible(int dim, std::mt19937_64& rng) {
  for (int attempt = 0; attempt < 100; ++attempt) {
    const Mat g = Mat::Identity(dim, dim) + 0.7 * random_gaussian(dim, dim, rng);
    Eigen::JacobiSVD<Mat> svd(g);
    if (svd.singularValues().minCoeff() > 0.1 * svd.singularValues().maxCoeff()) return g;
  }
  return Mat::Identity(dim, dim);
}

/// Random antisymmetric invertible matrix Omega = G^T J G (general: its
/// top-right block need not be symmetric, so it feeds darboux_factor, not
/// build_form).
inline Mat random_form_matrix(int n, std::mt19937_64& rng) {
  const Mat g = random_invertible(2 * n, rng);
  const Mat omega = g.transpose() * symcap::standard_j(n) * g;
  return 0.5 * (omega - omega.transpose());
}

/// Random block-diagonal G = diag(P, P); then G^T J G = [[0, P^T P], [-P^T P, 0]]
/// lies in the A-B-C family (A = C = 0, B = P^T P symmetric), giving a spec
/// with an independently known factor G.
inline std::pair<symcap::SymplecticFormSpec, Mat> random_spec_with_factor(
    int n, std::mt19937_64& rng) {
  const Mat p = random_invertible(n, rng);
  Mat g = Mat::Zero(2 * n, 2 * n);
  g.topLeftCorner(n, n) = p;
  g.bottomRightCorner(n, n) = p;
  Mat b = p.transpose() * p;
  b = 0.5 * (b + b.transpose());
  return {symcap::build_form(Mat::Zero(n, n), b, Mat::Zero(n, n)), g};
}

/// Random invertible form spec with all three blocks populated.
inline symcap::SymplecticFormSpec random_form_spec(int n, std::mt19937_64& rng) {
  for (int attempt = 0; attempt < 100; ++attempt) {
    Mat a = 0.5 * random_gaussian(n, n, rng);
    a = 0.5 * (a - a.transpose());
    Mat c = 0.5 * random_gaussian(n, n, rng);
    c = 0.5 * (c - c.transpose());
    Mat b = Mat::Identity(n, n) + 0.5 * random_gaussian(n, n, rng);
    b = 0.5 * (b + b.transpose());
    try {
      return symcap::build_form(a, b, c);
    } catch (const symcap::DegenerateForm&) {
      continue;
    }
  }
  return symcap::SymplecticFormSpec::standard(n);
}

inline symcap::PointCloud random_cloud(int n, int rows, std::mt19937_64& rng,
                                       double scale = 1.0) {
  return symcap::PointCloud(n, scale * random_gaussian(rows, 2 * n, rng));
}

/// Chi-square CDF by adaptive Simpson quadrature of the density; independent
/// of the incomplete-gamma path.
inline double chi2_pdf_oracle(int dof, double x) {
  if (x <= 0.0) return 0.0;
  const double a = 0.5 * dof;
  return 0.5 * std::exp((a - 1.0) * std::log(0.5 * x) - 0.5 * x - std::lgamma(a));
}

inline double adaptive_simpson(int dof, double lo, double hi, double f_lo, double f_mid,
                               double f_hi, double whole, double tol, int depth) {
  const double mid = 0.5 * (lo + hi);
  const double lm = 0.5 * (lo + mid);
  const double mh = 0.5 * (mid + hi);
  const double f_lm = chi2_pdf_oracle(dof, lm);
  const double f_mh = chi2_pdf_oracle(dof, mh);
  const double left = (mid - lo) / 6.0 * (f_lo + 4.0 * f_lm + f_mid);
  const double right = (hi - mid) / 6.0 * (f_mid + 4.0 * f_mh + f_hi);
  if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol) {
    return left + right + (left + right - whole) / 15.0;
  }
  return adaptive_simpson(dof, lo, mid, f_lo, f_lm, f_mid, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(dof, mid, hi, f_mid, f_mh, f_hi, right, 0.5 * tol, depth - 1);
}

inline double chi2_cdf_quadrature(int dof, double q, double tol = 1e-13) {
  if (q <= 0.0) return 0.0;
  const double mid = 0.5 * q;
  const double f_lo = chi2_pdf_oracle(dof, 0.0);
  const double f_mid = chi2_pdf_oracle(dof, mid);
  const double f_hi = chi2_pdf_oracle(dof, q);
  const double whole = q / 6.0 * (f_lo + 4.0 * f_mid + f_hi);
  return adaptive_simpson(dof, 0.0, q, f_lo, f_mid, f_hi, whole, tol, 40);
}

/// Sylvester cross-oracle: every principal minor of the Hermitian matrix is
/// >= -tol (minor determinants of Hermitian matrices are real).
inline bool sylvester_psd(const CMat& h, double tol) {
  const int dim = static_cast<int>(h.rows());
  for (unsigned mask = 1; mask < (1u << dim); ++mask) {
    std::vector<int> idx;
    for (int i = 0; i < dim; ++i) {
      if (mask & (1u << i)) idx.push_back(i);
    }
    CMat sub(idx.size(), idx.size());
    for (std::size_t r = 0; r < idx.size(); ++r) {
      for (std::size_t c = 0; c < idx.size(); ++c) sub(r, c) = h(idx[r], idx[c]);
    }
    if (sub.determinant().real() < -tol) return false;
  }
  return true;
}

/// The fixed 4x4 witness: PSD, every pairwise inequality holds, yet
/// Sigma + iJ is indefinite with determinant -1.
inline Mat counterexample_sigma() {
  Mat sigma = Mat::Identity(4, 4);
  sigma(0, 1) = sigma(1, 0) = -1.0;
  return sigma;
}

/// Cloud fixture: `on_circle` unit-circle points plus two far outliers.
inline symcap::PointCloud circle_with_outliers(int on_circle = 10) {
  Mat points(on_circle + 2, 2);
  for (int i = 0; i < on_circle; ++i) {
    const double theta = 2.0 * M_PI * i / on_circle + 0.1;
    points(i, 0) = std::cos(theta);
    points(i, 1) = std::sin(theta);
  }
  points(on_circle, 0) = 40.0;
  points(on_circle, 1) = 35.0;
  points(on_circle + 1, 0) = -52.0;
  points(on_circle + 1, 1) = 41.0;
  return symcap::PointCloud(1, points);
}

}  // namespace testutil
