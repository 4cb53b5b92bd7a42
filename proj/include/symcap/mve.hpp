#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <vector>

#include "symcap/phase_space.hpp"

namespace symcap {

/// Resampling configuration for the minimum volume ellipsoid estimator.
///
/// k is the coverage count (0 means the common choice floor((N+2n+1)/2));
/// m_alpha the calibration quantile level (0 means k/N); subsets are drawn
/// with a counter-based generator keyed by (seed, subset index) so the
/// candidate list does not depend on evaluation order.
struct MveConfig {
  int k = 0;
  double m_alpha = 0.0;
  std::uint64_t n_subsets = 5000;
  bool exhaustive = false;
  std::uint64_t seed = 0;
};

/// MVE output: the covariance ellipsoid is
///   (z - center)^T sigma^{-1} (z - center) <= raw_m2,
/// and cov_matrix() rescales sigma so the same set is described with the
/// calibrated radius m0 = sqrt(chi2_{2n, alpha}).
struct EllipsoidEstimate {
  PhaseVector center;
  SymMatrix sigma;
  double m0 = 0.0;
  double raw_m2 = 0.0;
  std::vector<int> subset;
  double volume_proxy = 0.0;

  /// Wrap an externally supplied covariance (raw_m2 = m0^2, so cov_matrix
  /// returns sigma unchanged).
  static EllipsoidEstimate from_covariance(PhaseVector center_, SymMatrix sigma_, double m0_) {
    if (!(m0_ > 0.0)) throw InvalidInput("from_covariance: m0 must be positive");
    EllipsoidEstimate est{std::move(center_), std::move(sigma_), m0_, m0_ * m0_, {}, 0.0};
    if (est.sigma.dim() != 2 * est.center.n) {
      throw InvalidInput("from_covariance: sigma must be 2n x 2n");
    }
    est.volume_proxy = std::sqrt(est.sigma.mat().determinant()) *
                       std::pow(est.raw_m2, est.center.n);
    return est;
  }
};

/// Squared Mahalanobis distance (z - center)^T sigma^{-1} (z - center),
/// via an LDLT solve.
inline double mahalanobis_sq(const Vec& z, const Vec& center, const SymMatrix& sigma) {
  if (z.size() != center.size() || z.size() != sigma.dim()) {
    throw InvalidInput("mahalanobis_sq: dimension mismatch");
  }
  Eigen::LDLT<Mat> ldlt(sigma.mat());
  if (ldlt.info() != Eigen::Success || (ldlt.vectorD().array() <= 0.0).any()) {
    throw DegenerateScatter("mahalanobis_sq: sigma is not positive definite");
  }
  const Vec diff = z - center;
  return diff.dot(ldlt.solve(diff));
}

namespace detail {

/// splitmix64; the counter-based subset generator hashes (seed, index)
/// through it so candidate draws are reproducible and order-free.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Distinct sorted indices {0..pool-1} of size count for draw `index`.
inline std::vector<int> counter_subset(std::uint64_t seed, std::uint64_t index, int pool,
                                       int count) {
  std::uint64_t state = splitmix64(seed ^ splitmix64(index + 1));
  std::vector<int> out;
  out.reserve(count);
  while (static_cast<int>(out.size()) < count) {
    state = splitmix64(state);
    const int candidate = static_cast<int>(state % static_cast<std::uint64_t>(pool));
    if (std::find(out.begin(), out.end(), candidate) == out.end()) out.push_back(candidate);
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline double binomial_count(int n, int k) {
  double c = 1.0;
  for (int i = 0; i < k; ++i) c = c * (n - i) / (i + 1);
  return c;
}

/// Rows of the subset reordered coordinate-lexicographically. Candidate
/// arithmetic always runs in this order, which makes the estimate invariant
/// under permutations of the cloud rows.
inline std::vector<int> canonical_order(const Mat& points, const std::vector<int>& subset) {
  std::vector<int> order = subset;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    for (Eigen::Index c = 0; c < points.cols(); ++c) {
      if (points(a, c) != points(b, c)) return points(a, c) < points(b, c);
    }
    return a < b;
  });
  return order;
}

/// Lexicographic comparison of two candidates' point coordinates (rows in
/// canonical order); the volume-proxy tie-break.
inline bool coords_less(const Mat& points, const std::vector<int>& lhs,
                        const std::vector<int>& rhs) {
  for (std::size_t r = 0; r < lhs.size(); ++r) {
    for (Eigen::Index c = 0; c < points.cols(); ++c) {
      const double a = points(lhs[r], c);
      const double b = points(rhs[r], c);
      if (a != b) return a < b;
    }
  }
  return false;
}

struct Candidate {
  std::vector<int> order;  // canonical row order
  Vec center;
  Mat scatter;
  double m2 = 0.0;
  double proxy = 0.0;
};

/// True when `cand` beats `best`: smaller volume proxy, ties broken by the
/// sorted coordinate list, then by the sorted index tuple.
inline bool candidate_less(const Mat& points, const Candidate& cand, const Candidate& best) {
  if (cand.proxy != best.proxy) return cand.proxy < best.proxy;
  if (coords_less(points, cand.order, best.order)) return true;
  if (coords_less(points, best.order, cand.order)) return false;
  std::vector<int> a = cand.order;
  std::vector<int> b = best.order;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return a < b;
}

inline void subset_moments(const Mat& points, const std::vector<int>& order, Vec& mean,
                           Mat& scatter) {
  const int s = static_cast<int>(order.size());
  const Eigen::Index d = points.cols();
  mean = Vec::Zero(d);
  for (int idx : order) mean += points.row(idx).transpose();
  mean /= static_cast<double>(s);
  scatter = Mat::Zero(d, d);
  for (int idx : order) {
    const Vec diff = points.row(idx).transpose() - mean;
    scatter += diff * diff.transpose();
  }
  scatter /= static_cast<double>(s - 1);
}

inline bool scatter_degenerate(const Mat& scatter, double det) {
  const Eigen::Index d = scatter.rows();
  const double scale = scatter.trace() / static_cast<double>(d);
  return !(det > 1e-12 * std::pow(scale, static_cast<double>(d)));
}

/// Evaluate one subset; nullopt when its points are not in general position.
inline std::optional<Candidate> evaluate_subset(const Mat& points, const std::vector<int>& subset,
                                                int k, int n) {
  Candidate cand;
  cand.order = canonical_order(points, subset);
  subset_moments(points, cand.order, cand.center, cand.scatter);

  Eigen::LDLT<Mat> ldlt(cand.scatter);
  if (ldlt.info() != Eigen::Success || (ldlt.vectorD().array() <= 0.0).any()) {
    return std::nullopt;
  }
  const double det = ldlt.vectorD().prod();
  if (scatter_degenerate(cand.scatter, det)) return std::nullopt;

  const int rows = static_cast<int>(points.rows());
  std::vector<double> dist(rows);
  for (int i = 0; i < rows; ++i) {
    const Vec diff = points.row(i).transpose() - cand.center;
    dist[i] = diff.dot(ldlt.solve(diff));
  }
  std::nth_element(dist.begin(), dist.begin() + (k - 1), dist.end());
  cand.m2 = dist[k - 1];
  cand.proxy = std::sqrt(det) * std::pow(cand.m2, n);
  return cand;
}

inline void validate_cloud_and_config(const PointCloud& cloud, MveConfig& config, int& k,
                                      double& alpha) {
  const int rows = cloud.size();
  const int dim = 2 * cloud.n;
  if (rows < dim + 2) {
    throw InvalidInput("mve: cloud must contain at least 2n+2 points");
  }
  k = config.k > 0 ? config.k : (rows + dim + 1) / 2;
  if (k < rows / 2 + 1 || k > rows) {
    throw InvalidInput("mve: k must lie in [floor(N/2)+1, N]");
  }
  alpha = config.m_alpha > 0.0 ? config.m_alpha : static_cast<double>(k) / rows;
  if (!config.exhaustive && config.n_subsets < 1) {
    throw InvalidInput("mve: n_subsets must be at least 1");
  }
}

inline EllipsoidEstimate finish_estimate(const PointCloud& cloud, const Candidate& best, int k,
                                         double alpha, const Tolerances& tol) {
  const double m0 = std::sqrt(chi2_quantile(2 * cloud.n, alpha, tol));
  std::vector<int> subset = best.order;
  std::sort(subset.begin(), subset.end());
  return EllipsoidEstimate{
      PhaseVector(cloud.n, best.center, cloud.position_unit, cloud.momentum_unit),
      SymMatrix(best.scatter), m0, best.m2, std::move(subset), best.proxy};
}

/// Visit every size-`count` subset of {0..pool-1} in lexicographic order.
template <typename Fn>
void for_each_combination(int pool, int count, Fn&& fn) {
  std::vector<int> subset(count);
  std::iota(subset.begin(), subset.end(), 0);
  while (true) {
    fn(subset);
    int i = count - 1;
    while (i >= 0 && subset[i] == pool - count + i) --i;
    if (i < 0) break;
    ++subset[i];
    for (int j = i + 1; j < count; ++j) subset[j] = subset[j - 1] + 1;
  }
}

}  // namespace detail

/// Minimum volume ellipsoid estimate of location and scatter.
///
/// Each candidate subset of size 2n+1 yields a trial ellipsoid: subset mean
/// and covariance, inflated by the k-th smallest squared Mahalanobis
/// distance over the whole cloud. The candidate minimizing
/// det(C)^{1/2} * (m^2)^n wins; ties go to the coordinate-lexicographically
/// smallest subset so row order cannot matter.
inline EllipsoidEstimate mve_estimate(const PointCloud& cloud, MveConfig config = {},
                                      const Tolerances& tol = {}) {
  int k = 0;
  double alpha = 0.0;
  detail::validate_cloud_and_config(cloud, config, k, alpha);
  const int subset_size = 2 * cloud.n + 1;

  std::optional<detail::Candidate> best;
  auto consider = [&](const std::vector<int>& subset) {
    auto cand = detail::evaluate_subset(cloud.points, subset, k, cloud.n);
    if (!cand) return;
    if (!best || detail::candidate_less(cloud.points, *cand, *best)) best = std::move(cand);
  };

  if (config.exhaustive) {
    detail::for_each_combination(cloud.size(), subset_size, consider);
  } else {
    for (std::uint64_t i = 0; i < config.n_subsets; ++i) {
      consider(detail::counter_subset(config.seed, i, cloud.size(), subset_size));
    }
  }
  if (!best) {
    throw GeneralPositionFailure("mve: no candidate subset was in general position");
  }
  return detail::finish_estimate(cloud, *best, k, alpha, tol);
}

/// Exhaustive oracle for small instances: plain enumeration with naive
/// arithmetic (explicit inverse, full sort), kept independent of
/// mve_estimate's code path.
inline EllipsoidEstimate brute_force_mve(const PointCloud& cloud, MveConfig config = {},
                                         const Tolerances& tol = {}) {
  int k = 0;
  double alpha = 0.0;
  detail::validate_cloud_and_config(cloud, config, k, alpha);
  const int subset_size = 2 * cloud.n + 1;
  if (detail::binomial_count(cloud.size(), subset_size) > 1e6) {
    throw TooLarge("brute_force_mve: C(N, 2n+1) exceeds the 1e6 guard");
  }

  const Mat& pts = cloud.points;
  const int rows = cloud.size();
  std::optional<detail::Candidate> best;

  detail::for_each_combination(rows, subset_size, [&](const std::vector<int>& subset) {
    detail::Candidate cand;
    cand.order = detail::canonical_order(pts, subset);
    detail::subset_moments(pts, cand.order, cand.center, cand.scatter);
    const double det = cand.scatter.determinant();
    if (detail::scatter_degenerate(cand.scatter, det)) return;
    Eigen::LDLT<Mat> probe(cand.scatter);
    if (probe.info() != Eigen::Success || (probe.vectorD().array() <= 0.0).any()) return;

    const Mat inv = cand.scatter.inverse();
    std::vector<double> dist(rows);
    for (int i = 0; i < rows; ++i) {
      const Vec diff = pts.row(i).transpose() - cand.center;
      dist[i] = diff.dot(inv * diff);
    }
    std::sort(dist.begin(), dist.end());
    cand.m2 = dist[k - 1];
    cand.proxy = std::sqrt(det) * std::pow(cand.m2, cloud.n);
    if (!best || detail::candidate_less(pts, cand, *best)) best = std::move(cand);
  });

  if (!best) {
    throw GeneralPositionFailure("brute_force_mve: no subset in general position");
  }
  return detail::finish_estimate(cloud, *best, k, alpha, tol);
}

/// Calibrated covariance pair (Sigma, m0): Sigma = (raw_m2 / m0^2) * sigma,
/// so {z : (z - center)^T Sigma^{-1} (z - center) <= m0^2} is exactly the
/// estimated ellipsoid.
inline std::pair<SymMatrix, double> cov_matrix(const EllipsoidEstimate& est) {
  const double scale = est.raw_m2 / (est.m0 * est.m0);
  return {SymMatrix(scale * est.sigma.mat()), est.m0};
}

/// Number of cloud points inside the ellipsoid at radius raw_m2.
inline int coverage_count(const PointCloud& cloud, const EllipsoidEstimate& est) {
  int count = 0;
  for (int i = 0; i < cloud.size(); ++i) {
    const double d2 = mahalanobis_sq(cloud.points.row(i).transpose(), est.center.coords,
                                     est.sigma);
    if (d2 <= est.raw_m2 * (1.0 + 1e-12)) ++count;
  }
  return count;
}

}  // namespace symcap
