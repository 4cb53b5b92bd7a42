#pragma once

#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "symcap/numerics.hpp"

namespace symcap {

/// Phase-space point z = (x_1..x_n, p_1..p_n), positions first.
struct PhaseVector {
  int n = 0;
  Vec coords;
  std::string position_unit;
  std::string momentum_unit;

  PhaseVector() = default;
  PhaseVector(int n_, Vec coords_, std::string pos_unit = {}, std::string mom_unit = {})
      : n(n_),
        coords(std::move(coords_)),
        position_unit(std::move(pos_unit)),
        momentum_unit(std::move(mom_unit)) {
    if (n < 1 || coords.size() != 2 * n) {
      throw InvalidInput("PhaseVector: coords must have length 2n");
    }
    if (!coords.allFinite()) throw InvalidInput("PhaseVector: non-finite entries");
  }
};

/// Cloud of N phase-space samples, one per row of `points` (N x 2n).
struct PointCloud {
  int n = 0;
  Mat points;
  std::string position_unit;
  std::string momentum_unit;

  PointCloud() = default;
  PointCloud(int n_, Mat points_, std::string pos_unit = {}, std::string mom_unit = {})
      : n(n_),
        points(std::move(points_)),
        position_unit(std::move(pos_unit)),
        momentum_unit(std::move(mom_unit)) {
    if (n < 1 || points.cols() != 2 * n) {
      throw InvalidInput("PointCloud: points must have 2n columns");
    }
    if (!points.allFinite()) throw InvalidInput("PointCloud: non-finite entries");
  }

  [[nodiscard]] int size() const { return static_cast<int>(points.rows()); }

  [[nodiscard]] PhaseVector point(int i) const {
    return PhaseVector(n, points.row(i).transpose(), position_unit, momentum_unit);
  }
};

/// Standard symplectic matrix J = [[0, I], [-I, 0]].
inline Mat standard_j(int n) {
  if (n < 1) throw InvalidInput("standard_j: n must be positive");
  Mat j = Mat::Zero(2 * n, 2 * n);
  j.topRightCorner(n, n) = Mat::Identity(n, n);
  j.bottomLeftCorner(n, n) = -Mat::Identity(n, n);
  return j;
}

namespace detail {

inline void require_antisymmetric(const Mat& a, const char* what) {
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if ((a + a.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw InvalidBlocks(std::string(what) + " must be antisymmetric");
  }
}

inline void require_symmetric(const Mat& a, const char* what) {
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw InvalidBlocks(std::string(what) + " must be symmetric");
  }
}

}  // namespace detail

/// Factor F with F^T J F = omega for an invertible antisymmetric omega.
///
/// Route: the Hermitian matrix i*omega has eigenvalues in +-d pairs with
/// d > 0; real and imaginary parts of the +d eigenvectors give a real
/// orthogonal basis that block-rotates omega, and absorbing sqrt(d) per
/// block yields F. F is not unique; any matrix meeting the residual
/// contract is a valid answer.
inline Mat darboux_factor(const Mat& omega) {
  if (omega.rows() != omega.cols() || omega.rows() == 0 || omega.rows() % 2 != 0) {
    throw InvalidInput("darboux_factor: omega must be square of even dimension");
  }
  if (!omega.allFinite()) throw InvalidInput("darboux_factor: non-finite entries");
  detail::require_antisymmetric(omega, "omega");
  const int n = static_cast<int>(omega.rows()) / 2;

  const CMat herm = std::complex<double>(0.0, 1.0) * omega.cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<CMat> solver(herm);
  if (solver.info() != Eigen::Success) throw Error("darboux_factor: eigensolver failed");
  const Vec evals = solver.eigenvalues();  // ascending, pairs -d, +d

  const double d_max = evals.cwiseAbs().maxCoeff();
  const double d_min = evals.cwiseAbs().minCoeff();
  if (!(d_min > 1e-12 * d_max)) throw DegenerateForm("darboux_factor: omega is singular");

  // Positive half of the spectrum lives in the top n slots.
  Mat basis(2 * n, 2 * n);  // columns: b_1..b_n, a_1..a_n
  Vec d(n);
  for (int j = 0; j < n; ++j) {
    const int idx = 2 * n - 1 - j;  // descending d_1 >= ... >= d_n
    d[j] = evals[idx];
    const CVec u = solver.eigenvectors().col(idx);
    basis.col(j) = std::sqrt(2.0) * u.imag();
    basis.col(n + j) = std::sqrt(2.0) * u.real();
  }

  Mat f = basis.transpose();
  for (int j = 0; j < n; ++j) {
    const double s = std::sqrt(d[j]);
    f.row(j) *= s;
    f.row(n + j) *= s;
  }
  return f;
}

/// General symplectic form Omega = [[A, B], [-B, C]] with A, C antisymmetric
/// and B symmetric, together with a cached Darboux factor F (F^T J F = Omega)
/// and the inverse used by eval_form.
class SymplecticFormSpec {
public:
  /// The standard form Omega = J.
  static SymplecticFormSpec standard(int n) {
    return SymplecticFormSpec(Mat::Zero(n, n), Mat::Identity(n, n), Mat::Zero(n, n));
  }

  /// Conformal multiple Omega = epsilon * J.
  static SymplecticFormSpec scaled_standard(int n, double epsilon) {
    if (!(epsilon != 0.0) || !std::isfinite(epsilon)) {
      throw InvalidInput("scaled_standard: epsilon must be finite and nonzero");
    }
    return SymplecticFormSpec(Mat::Zero(n, n), epsilon * Mat::Identity(n, n), Mat::Zero(n, n));
  }

  SymplecticFormSpec(const Mat& a, const Mat& b, const Mat& c) {
    const Eigen::Index n = a.rows();
    if (n == 0 || a.cols() != n || b.rows() != n || b.cols() != n || c.rows() != n ||
        c.cols() != n) {
      throw InvalidBlocks("blocks A, B, C must be n x n with matching n");
    }
    if (!a.allFinite() || !b.allFinite() || !c.allFinite()) {
      throw InvalidBlocks("blocks contain non-finite entries");
    }
    detail::require_antisymmetric(a, "A");
    detail::require_antisymmetric(c, "C");
    detail::require_symmetric(b, "B");
    n_ = static_cast<int>(n);
    a_ = 0.5 * (a - a.transpose());
    b_ = 0.5 * (b + b.transpose());
    c_ = 0.5 * (c - c.transpose());

    omega_.resize(2 * n, 2 * n);
    omega_.topLeftCorner(n, n) = a_;
    omega_.topRightCorner(n, n) = b_;
    omega_.bottomLeftCorner(n, n) = -b_;
    omega_.bottomRightCorner(n, n) = c_;

    darboux_ = darboux_factor(omega_);
    const double residual =
        (darboux_.transpose() * standard_j(n_) * darboux_ - omega_).norm() / omega_.norm();
    if (!(residual <= 1e-9)) throw Error("SymplecticFormSpec: Darboux residual too large");

    Eigen::PartialPivLU<Mat> lu(omega_);
    omega_inv_ = lu.inverse();
  }

  [[nodiscard]] int n() const { return n_; }
  [[nodiscard]] const Mat& block_a() const { return a_; }
  [[nodiscard]] const Mat& block_b() const { return b_; }
  [[nodiscard]] const Mat& block_c() const { return c_; }
  [[nodiscard]] const Mat& omega() const { return omega_; }
  [[nodiscard]] const Mat& omega_inverse() const { return omega_inv_; }
  [[nodiscard]] const Mat& darboux_f() const { return darboux_; }

  [[nodiscard]] bool is_standard() const {
    return (omega_ - standard_j(n_)).cwiseAbs().maxCoeff() == 0.0;
  }

private:
  int n_ = 0;
  Mat a_, b_, c_;
  Mat omega_;
  Mat omega_inv_;
  Mat darboux_;
};

inline SymplecticFormSpec build_form(const Mat& a, const Mat& b, const Mat& c) {
  return SymplecticFormSpec(a, b, c);
}

/// omega(z, z') = -(z')^T Omega^{-1} z; antisymmetric in (z, z').
inline double eval_form(const SymplecticFormSpec& spec, const Vec& z, const Vec& z_prime) {
  if (z.size() != 2 * spec.n() || z_prime.size() != 2 * spec.n()) {
    throw InvalidInput("eval_form: dimension mismatch");
  }
  return -z_prime.dot(spec.omega_inverse() * z);
}

inline double eval_form(const SymplecticFormSpec& spec, const PhaseVector& z,
                        const PhaseVector& z_prime) {
  return eval_form(spec, z.coords, z_prime.coords);
}

}  // namespace symcap
