#pragma once

#include <string>
#include <vector>

#include "symcap/mve.hpp"
#include "symcap/spectrum.hpp"

namespace symcap {

/// One pairwise uncertainty inequality
///   Delta^2 * Delta^2 >= covariance^2 + form-entry^2,
/// a 2x2 principal minor of Sigma + i*Omega. Indices are 1-based.
struct PairInequality {
  enum class Kind { xx, pp, xp };
  Kind kind = Kind::xp;
  int j = 0;
  int k = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;  // lhs - rhs
  bool holds = false;
};

inline const char* to_string(PairInequality::Kind kind) {
  switch (kind) {
    case PairInequality::Kind::xx: return "xx";
    case PairInequality::Kind::pp: return "pp";
    default: return "xp";
  }
}

/// Capacity criterion c(C, omega) >= pi * m0^2. The two readings record the
/// source text's ambiguous threshold pi * m0^2 * lambda_n(Sigma) under both
/// interpretations of lambda_n (largest / smallest sigma-eigenvalue); they
/// are reported, not used for the verdict.
struct CapacityCriterion {
  double value = 0.0;
  double threshold = 0.0;
  bool ok = false;
  double reading_largest = 0.0;
  double reading_smallest = 0.0;
};

/// Full uncertainty analysis of a covariance estimate against a form.
struct UncertaintyReport {
  int n = 0;
  SymMatrix sigma;            // calibrated covariance
  SymplecticFormSpec omega_spec;
  double m0 = 0.0;
  double min_eig = 0.0;       // smallest eigenvalue of Sigma + i*Omega
  bool psd_ok = false;
  std::vector<PairInequality> pairs;
  CapacityCriterion capacity;
  Vec spectrum;               // omega-spectrum of Sigma, descending
};

/// Smallest eigenvalue of Sigma + i*Omega and the PSD verdict.
inline std::pair<double, bool> hermitian_condition(const SymMatrix& sigma,
                                                   const SymplecticFormSpec& spec,
                                                   const Tolerances& tol = {}) {
  if (sigma.dim() != 2 * spec.n()) throw InvalidInput("hermitian_condition: dimension mismatch");
  const CMat h = sigma.mat().cast<std::complex<double>>() +
                 std::complex<double>(0.0, 1.0) * spec.omega().cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<CMat> solver(HermMatrix(h).mat());
  if (solver.info() != Eigen::Success) throw Error("hermitian_condition: eigensolver failed");
  const double min_eig = solver.eigenvalues().minCoeff();
  const double norm = solver.eigenvalues().cwiseAbs().maxCoeff();
  return {min_eig, min_eig >= -tol.psd_tol * std::max(1.0, norm)};
}

/// All pairwise inequalities implied by Sigma + i*Omega >= 0: n(n-1)/2 each
/// of xx and pp pairs plus n^2 xp pairs, computed directly from the Sigma
/// blocks and the Omega blocks.
inline std::vector<PairInequality> pair_inequalities(const SymMatrix& sigma,
                                                     const SymplecticFormSpec& spec,
                                                     const Tolerances& tol = {}) {
  const int n = spec.n();
  if (sigma.dim() != 2 * n) throw InvalidInput("pair_inequalities: dimension mismatch");
  const Mat& s = sigma.mat();
  const auto dxx = s.topLeftCorner(n, n);
  const auto dxp = s.topRightCorner(n, n);
  const auto dpp = s.bottomRightCorner(n, n);

  std::vector<PairInequality> out;
  out.reserve(n * (n - 1) + n * n);
  auto emit = [&](PairInequality::Kind kind, int j, int k, double lhs, double rhs) {
    PairInequality p;
    p.kind = kind;
    p.j = j + 1;
    p.k = k + 1;
    p.lhs = lhs;
    p.rhs = rhs;
    p.slack = lhs - rhs;
    p.holds = p.slack >= -tol.psd_tol * std::max(1.0, lhs);
    out.push_back(p);
  };

  for (int j = 0; j < n; ++j) {
    for (int k = j + 1; k < n; ++k) {
      emit(PairInequality::Kind::xx, j, k, dxx(j, j) * dxx(k, k),
           dxx(j, k) * dxx(j, k) + spec.block_a()(j, k) * spec.block_a()(j, k));
    }
  }
  for (int j = 0; j < n; ++j) {
    for (int k = j + 1; k < n; ++k) {
      emit(PairInequality::Kind::pp, j, k, dpp(j, j) * dpp(k, k),
           dpp(j, k) * dpp(j, k) + spec.block_c()(j, k) * spec.block_c()(j, k));
    }
  }
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      emit(PairInequality::Kind::xp, j, k, dxx(j, j) * dpp(k, k),
           dxp(j, k) * dxp(j, k) + spec.block_b()(j, k) * spec.block_b()(j, k));
    }
  }
  return out;
}

/// Capacity criterion on the covariance ellipsoid
///   C = {z : (z - center)^T Sigma^{-1} (z - center) <= m0^2}:
/// value = c(C, omega) via the Darboux pullback, threshold = pi * m0^2.
/// With this threshold the verdict agrees with the Hermitian PSD condition,
/// which a congruence by F^{-1} reduces to the standard-form case.
inline CapacityCriterion capacity_criterion(const EllipsoidEstimate& est,
                                            const SymplecticFormSpec& spec,
                                            const Tolerances& tol = {}) {
  const auto [sigma, m0] = cov_matrix(est);
  if (sigma.dim() != 2 * spec.n()) throw InvalidInput("capacity_criterion: dimension mismatch");
  const Ellipsoid cov_ellipsoid(est.center, sigma, m0 * m0);

  CapacityCriterion crit;
  crit.value = capacity(cov_ellipsoid, spec, tol);
  crit.threshold = M_PI * m0 * m0;
  crit.ok = crit.value >= crit.threshold - tol.psd_tol * std::max(1.0, crit.threshold);

  const Vec sig_spec =
      detail::skew_pair_spectrum_boundary(sigma, standard_j(spec.n()), tol, "capacity_criterion");
  crit.reading_largest = M_PI * m0 * m0 * sig_spec[0];
  crit.reading_smallest = M_PI * m0 * m0 * sig_spec[sig_spec.size() - 1];
  return crit;
}

/// Aggregate report: PSD condition, pairwise inequalities, capacity
/// criterion, omega-spectrum. Covariances on the PSD boundary (singular
/// Sigma) are handled as flattened ellipsoids with zero modes.
inline UncertaintyReport analyze(const EllipsoidEstimate& est, const SymplecticFormSpec& spec,
                                 const Tolerances& tol = {}) {
  tol.validate();
  const auto [sigma, m0] = cov_matrix(est);
  const auto [min_eig, psd_ok] = hermitian_condition(sigma, spec, tol);
  UncertaintyReport report{spec.n(),
                           sigma,
                           spec,
                           m0,
                           min_eig,
                           psd_ok,
                           pair_inequalities(sigma, spec, tol),
                           capacity_criterion(est, spec, tol),
                           detail::skew_pair_spectrum_boundary(sigma, spec.omega(), tol,
                                                               "analyze")};
  return report;
}

}  // namespace symcap
