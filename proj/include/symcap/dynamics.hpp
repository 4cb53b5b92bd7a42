#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "symcap/uncertainty.hpp"

namespace symcap {

/// Quadratic Hamiltonian, energy = 0.5 * z^T H z.
struct QuadraticHamiltonian {
  std::string label;
  SymMatrix h;
  int n = 0;

  QuadraticHamiltonian(std::string label_, SymMatrix h_)
      : label(std::move(label_)), h(std::move(h_)), n(h.dim() / 2) {
    if (h.dim() % 2 != 0) throw InvalidInput("QuadraticHamiltonian: dimension must be even");
  }
};

/// Time-t flow S_t = exp(t J H), a linear symplectomorphism.
struct FlowMap {
  Mat s;
  double t = 0.0;
};

inline QuadraticHamiltonian harmonic_oscillator(int n = 1) {
  return QuadraticHamiltonian("harmonic oscillator", SymMatrix(Mat::Identity(2 * n, 2 * n)));
}

inline QuadraticHamiltonian free_particle() {
  Mat h = Mat::Zero(2, 2);
  h(1, 1) = 1.0;
  return QuadraticHamiltonian("free particle", SymMatrix(h));
}

inline QuadraticHamiltonian coupled_oscillators() {
  Mat h = Mat::Identity(4, 4);
  h(0, 0) = 2.0;
  h(1, 1) = 2.0;
  h(0, 1) = h(1, 0) = -1.0;
  return QuadraticHamiltonian("coupled oscillators", SymMatrix(h));
}

/// Canned systems selectable by name: "oscillator", "free_particle",
/// "coupled_oscillators".
inline QuadraticHamiltonian hamiltonian_by_name(const std::string& name) {
  if (name == "oscillator") return harmonic_oscillator();
  if (name == "free_particle") return free_particle();
  if (name == "coupled_oscillators") return coupled_oscillators();
  throw InvalidInput("unknown Hamiltonian '" + name +
                     "' (expected oscillator, free_particle, coupled_oscillators)");
}

namespace detail {

/// exp(A) by scaling-and-squaring with a Taylor kernel; term recursion stops
/// below 1e-18 of the running norm, well inside the 1e-12 truncation budget.
inline Mat expm(const Mat& a) {
  const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();  // infinity norm
  int squarings = 0;
  if (norm > 0.5) {
    squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
    if (squarings > 60) throw FlowOverflow("expm: argument norm too large");
  }
  const Mat b = a / std::pow(2.0, squarings);

  Mat result = Mat::Identity(a.rows(), a.cols());
  Mat term = Mat::Identity(a.rows(), a.cols());
  for (int k = 1; k <= 40; ++k) {
    term = (term * b) / static_cast<double>(k);
    result += term;
    if (term.cwiseAbs().maxCoeff() < 1e-18 * result.cwiseAbs().maxCoeff()) break;
  }
  for (int i = 0; i < squarings; ++i) result = result * result;
  if (!result.allFinite()) throw FlowOverflow("expm: result is not finite");
  return result;
}

}  // namespace detail

inline FlowMap flow_map(const QuadraticHamiltonian& h, double t) {
  if (!std::isfinite(t)) throw InvalidInput("flow_map: t must be finite");
  return {detail::expm(t * standard_j(h.n) * h.h.mat()), t};
}

inline PointCloud propagate(const PointCloud& cloud, const FlowMap& map) {
  if (map.s.rows() != 2 * cloud.n) throw InvalidInput("propagate: dimension mismatch");
  return PointCloud(cloud.n, cloud.points * map.s.transpose(), cloud.position_unit,
                    cloud.momentum_unit);
}

/// One row of the invariance experiment table.
struct FlowSample {
  double t = 0.0;
  double capacity = 0.0;
  bool psd_ok = false;
  bool capacity_ok = false;
};

/// Run MVE + uncertainty analysis on the flowed cloud at each time. Under a
/// symplectic flow the capacity column stays constant and the verdicts do
/// not move; exhaustive MVE mode is required for that to hold exactly.
inline std::vector<FlowSample> invariance_experiment(const PointCloud& cloud,
                                                     const QuadraticHamiltonian& h,
                                                     const std::vector<double>& times,
                                                     const SymplecticFormSpec& spec,
                                                     const MveConfig& config = {},
                                                     const Tolerances& tol = {}) {
  if (times.empty()) throw InvalidInput("invariance_experiment: times must be nonempty");
  if (cloud.n != h.n || cloud.n != spec.n()) {
    throw InvalidInput("invariance_experiment: dimension mismatch");
  }
  std::vector<FlowSample> rows;
  rows.reserve(times.size());
  for (double t : times) {
    const PointCloud flowed = propagate(cloud, flow_map(h, t));
    const EllipsoidEstimate est = mve_estimate(flowed, config, tol);
    const UncertaintyReport report = analyze(est, spec, tol);
    rows.push_back({t, report.capacity.value, report.psd_ok, report.capacity.ok});
  }
  return rows;
}

}  // namespace symcap
