#pragma once

#include <vector>

#include "symcap/phase_space.hpp"

namespace symcap {

/// Ordered symplectic spectrum lambda_1 >= ... >= lambda_n > 0.
struct SymplecticSpectrum {
  enum class FormTag { standard_sigma, general_omega };
  Vec lambdas;
  FormTag form_tag = FormTag::standard_sigma;
};

/// S symplectic (S^T J S = J) with S^T M S = diag(Lambda, Lambda).
struct WilliamsonDecomposition {
  Mat s;
  Vec lambda;  // descending, equals the sigma-spectrum of M
};

/// The set {z : (z - center)^T shape^{-1} (z - center) <= radius_sq}.
struct Ellipsoid {
  PhaseVector center;
  SymMatrix shape;
  double radius_sq = 0.0;

  Ellipsoid(PhaseVector center_, SymMatrix shape_, double radius_sq_)
      : center(std::move(center_)), shape(std::move(shape_)), radius_sq(radius_sq_) {
    if (shape.dim() != 2 * center.n) throw InvalidInput("Ellipsoid: shape must be 2n x 2n");
    if (!(radius_sq > 0.0)) throw InvalidInput("Ellipsoid: radius_sq must be positive");
  }
};

namespace detail {

inline SymEigen require_pd(const SymMatrix& m, const char* what) {
  SymEigen eig = eig_sym(m);
  const double lam_min = eig.values[eig.values.size() - 1];
  const double lam_max = eig.values[0];
  if (!(lam_min > 0.0) || lam_min < 1e-14 * lam_max) {
    throw NotPositiveDefinite(std::string(what) + ": matrix is not positive definite");
  }
  return eig;
}

inline Mat pd_power(const SymEigen& eig, double exponent) {
  Vec powered(eig.values.size());
  for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
    powered[i] = std::pow(eig.values[i], exponent);
  }
  return eig.vectors * powered.asDiagonal() * eig.vectors.transpose();
}

/// Moduli of the +-i lambda eigenvalue pairs of the skew product
/// root * W * root, descending. Pairing is asserted to 1e-9 relative and
/// each pair is averaged.
inline Vec skew_pair_core(const Mat& root, const Mat& w) {
  const Mat skew = root * w * root;
  const CMat herm = std::complex<double>(0.0, 1.0) * skew.cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<CMat> solver(HermMatrix(herm).mat());
  if (solver.info() != Eigen::Success) throw Error("skew_pair_core: eigensolver failed");
  const Vec evals = solver.eigenvalues();  // ascending
  const int n = static_cast<int>(evals.size()) / 2;
  const double scale = std::max(1.0, evals.cwiseAbs().maxCoeff());
  Vec lambdas(n);
  for (int j = 0; j < n; ++j) {
    const double pos = evals[2 * n - 1 - j];
    const double neg = evals[j];
    if (std::abs(pos + neg) > 1e-9 * scale) {
      throw Error("skew_pair_core: eigenvalues do not pair as +-lambda");
    }
    lambdas[j] = 0.5 * (pos - neg);
  }
  return lambdas;
}

inline Vec skew_pair_spectrum(const SymMatrix& m, const Mat& w, const char* what) {
  return skew_pair_core(pd_power(require_pd(m, what), 0.5), w);
}

/// PSD-boundary variant: eigenvalues of m within psd_tol of zero are clamped
/// to zero, so flattened (singular PSD) shapes yield zero modes instead of a
/// rejection. Matrices indefinite beyond the tolerance are still rejected.
inline Vec skew_pair_spectrum_boundary(const SymMatrix& m, const Mat& w, const Tolerances& tol,
                                       const char* what) {
  const SymEigen eig = eig_sym(m);
  const double lam_max = std::max(0.0, eig.values[0]);
  Vec roots(eig.values.size());
  for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
    if (eig.values[i] < -tol.psd_tol * std::max(1.0, lam_max)) {
      throw NotPositiveDefinite(std::string(what) + ": shape matrix is indefinite");
    }
    roots[i] = std::sqrt(std::max(eig.values[i], 0.0));
  }
  return skew_pair_core(eig.vectors * roots.asDiagonal() * eig.vectors.transpose(), w);
}

}  // namespace detail

/// Sigma-spectrum of a positive definite M: the n positive numbers
/// lambda_j with +-i lambda_j the eigenvalues of M^{1/2} J M^{1/2}.
inline SymplecticSpectrum sigma_spectrum(const SymMatrix& m) {
  if (m.dim() % 2 != 0) throw InvalidInput("sigma_spectrum: dimension must be even");
  const int n = m.dim() / 2;
  return {detail::skew_pair_spectrum(m, standard_j(n), "sigma_spectrum"),
          SymplecticSpectrum::FormTag::standard_sigma};
}

/// Omega-spectrum: moduli of the eigenvalue pairs of Omega * M, descending.
/// Satisfies Spec_omega(M) == Spec_sigma(F M F^T) for the Darboux factor F.
inline SymplecticSpectrum omega_spectrum(const SymMatrix& m, const SymplecticFormSpec& spec) {
  if (m.dim() != 2 * spec.n()) throw InvalidInput("omega_spectrum: dimension mismatch");
  return {detail::skew_pair_spectrum(m, spec.omega(), "omega_spectrum"),
          SymplecticSpectrum::FormTag::general_omega};
}

/// Williamson diagonal form S^T M S = diag(Lambda, Lambda).
///
/// Built from K = M^{-1/2} J M^{-1/2}: the +mu eigenplanes of iK give an
/// orthogonal block rotation, and scaling by mu^{-1/2} turns it into a
/// symplectic congruence. Lambda_j = 1/mu_j, descending. S is not unique;
/// the contract is the pair of residuals.
inline WilliamsonDecomposition williamson(const SymMatrix& m) {
  if (m.dim() % 2 != 0) throw InvalidInput("williamson: dimension must be even");
  const int n = m.dim() / 2;
  const SymEigen eig = detail::require_pd(m, "williamson");
  const Mat inv_root = detail::pd_power(eig, -0.5);
  const Mat k = inv_root * standard_j(n) * inv_root;

  const CMat herm = std::complex<double>(0.0, 1.0) * k.cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<CMat> solver(HermMatrix(herm).mat());
  if (solver.info() != Eigen::Success) throw Error("williamson: eigensolver failed");
  const Vec evals = solver.eigenvalues();

  // mu ascending makes Lambda = 1/mu descending.
  Mat basis(2 * n, 2 * n);
  Vec lambda(n);
  for (int j = 0; j < n; ++j) {
    const int idx = 2 * n + j - n;  // positive eigenvalues occupy the top n slots
    const double mu = evals[idx];
    if (!(mu > 0.0)) throw Error("williamson: spectrum of K is not paired");
    const CVec u = solver.eigenvectors().col(idx);
    const double scale = 1.0 / std::sqrt(mu);
    basis.col(j) = std::sqrt(2.0) * u.imag() * scale;
    basis.col(n + j) = std::sqrt(2.0) * u.real() * scale;
    lambda[j] = 1.0 / mu;
  }

  WilliamsonDecomposition out;
  out.s = inv_root * basis;
  out.lambda = lambda;
  return out;
}

/// Coefficient and axis pair of one normal-form mode
/// lambda_j * (x_j^2 + p_j^2).
struct NormalFormAxis {
  double lambda = 0.0;
  Vec axis_x;
  Vec axis_p;
};

/// Normal form of the ellipsoid z^T M z <= 1 reached by S^{-1}: coefficients
/// equal the sigma-spectrum, axes are the columns of S carrying each mode.
inline std::vector<NormalFormAxis> normal_form_ellipsoid(const SymMatrix& m) {
  const WilliamsonDecomposition dec = williamson(m);
  const int n = m.dim() / 2;
  std::vector<NormalFormAxis> out;
  out.reserve(n);
  for (int j = 0; j < n; ++j) {
    out.push_back({dec.lambda[j], dec.s.col(j), dec.s.col(n + j)});
  }
  return out;
}

/// Symplectic capacity of an ellipsoid under the standard form:
/// pi * r^2 * lambda_sigma_min(shape). Translations are symplectomorphisms,
/// so the center plays no role. Shapes on the PSD boundary (flattened
/// ellipsoids) get capacity zero from their vanishing modes.
inline double capacity(const Ellipsoid& e, const Tolerances& tol = {}) {
  const int n = e.center.n;
  const Vec lambdas =
      detail::skew_pair_spectrum_boundary(e.shape, standard_j(n), tol, "capacity");
  return M_PI * e.radius_sq * lambdas[lambdas.size() - 1];
}

/// Capacity under a general form: capacity of the pullback (F^T)^{-1}(e)
/// under the standard form, F the Darboux factor of the spec.
inline double capacity(const Ellipsoid& e, const SymplecticFormSpec& spec,
                       const Tolerances& tol = {}) {
  if (spec.n() != e.center.n) throw InvalidInput("capacity: dimension mismatch");
  if (spec.is_standard()) return capacity(e, tol);
  const Mat g = spec.darboux_f().transpose().inverse();
  const SymMatrix pulled(g * e.shape.mat() * g.transpose());
  const Vec lambdas =
      detail::skew_pair_spectrum_boundary(pulled, standard_j(spec.n()), tol, "capacity");
  return M_PI * e.radius_sq * lambdas[lambdas.size() - 1];
}

/// Test utility for the monotonicity law: requires M <= M' (both PD) and
/// reports whether lambda_j(M) <= lambda_j(M') + 1e-9 for all j.
inline bool spectrum_monotonic_check(const SymMatrix& m, const SymMatrix& m_prime) {
  if (m.dim() != m_prime.dim()) throw InvalidInput("spectrum_monotonic_check: dims differ");
  const SymMatrix gap(m_prime.mat() - m.mat());
  if (!is_psd(HermMatrix(gap))) {
    throw InvalidInput("spectrum_monotonic_check: M' - M is not PSD");
  }
  const Vec a = sigma_spectrum(m).lambdas;
  const Vec b = sigma_spectrum(m_prime).lambdas;
  for (Eigen::Index j = 0; j < a.size(); ++j) {
    if (a[j] > b[j] + 1e-9) return false;
  }
  return true;
}

}  // namespace symcap
