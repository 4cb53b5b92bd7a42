// Command-line front end: ingest clouds and form specifications, run
// estimation / analysis / flow experiments, emit machine- and human-readable
// reports. Exit codes: 0 success (condition holds), 1 completed but condition
// violated (or selftest failure), 2 operational error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "symcap/symcap.hpp"

namespace {

using namespace symcap;

struct RunConfig {
  std::string cloud_path;
  std::string omega_path;
  std::string sigma_path;
  int k = 0;
  double alpha = 0.0;
  std::string subsets = "5000";
  std::uint64_t seed = 0;
  double psd_tol = 1e-9;
  double eig_tol = 1e-10;
  double quantile_tol = 1e-12;
  std::string output = "json";
  std::string out_path;
  std::string hamiltonian = "oscillator";
  std::string times;
};

void add_tolerance_flags(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--psd-tol", cfg.psd_tol, "PSD verdict tolerance");
  cmd->add_option("--eig-tol", cfg.eig_tol, "eigen-residual tolerance");
  cmd->add_option("--quantile-tol", cfg.quantile_tol, "chi-square inversion tolerance");
}

void add_output_flags(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--output", cfg.output, "output format: json | table")
      ->check(CLI::IsMember({"json", "table"}));
  cmd->add_option("--out", cfg.out_path, "write the payload to PATH instead of stdout");
}

void add_mve_flags(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--k", cfg.k, "coverage count (default floor((N+2n+1)/2))");
  cmd->add_option("--alpha", cfg.alpha, "calibration quantile level (default k/N)");
  cmd->add_option("--subsets", cfg.subsets, "resampling budget or 'exhaustive'");
  cmd->add_option("--seed", cfg.seed, "seed for deterministic subset generation");
}

Tolerances tolerances(const RunConfig& cfg) {
  Tolerances tol{cfg.psd_tol, cfg.eig_tol, cfg.quantile_tol};
  tol.validate();
  return tol;
}

MveConfig mve_config(const RunConfig& cfg) {
  MveConfig mve;
  mve.k = cfg.k;
  mve.m_alpha = cfg.alpha;
  mve.seed = cfg.seed;
  if (cfg.subsets == "exhaustive") {
    mve.exhaustive = true;
  } else {
    try {
      mve.n_subsets = std::stoull(cfg.subsets);
    } catch (const std::exception&) {
      throw InvalidInput("--subsets must be a positive integer or 'exhaustive'");
    }
  }
  return mve;
}

void write_payload(const RunConfig& cfg, const std::string& payload) {
  if (cfg.out_path.empty()) {
    std::cout << payload;
    return;
  }
  std::ofstream out(cfg.out_path, std::ios::binary);
  if (!out) throw Error("cannot open output file '" + cfg.out_path + "'");
  out << payload;
}

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string matrix_table(const Mat& m, const std::string& indent) {
  std::string out;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    out += indent;
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      out += fmt6(m(r, c));
      if (c + 1 < m.cols()) out += "  ";
    }
    out += "\n";
  }
  return out;
}

std::string estimate_table(const EllipsoidEstimate& est) {
  std::string out = "center:";
  for (Eigen::Index i = 0; i < est.center.coords.size(); ++i) {
    out += " " + fmt6(est.center.coords[i]);
  }
  out += "\nsigma:\n" + matrix_table(est.sigma.mat(), "  ");
  out += "m0: " + fmt6(est.m0) + "\nraw_m2: " + fmt6(est.raw_m2) +
         "\nvolume_proxy: " + fmt6(est.volume_proxy) + "\nsubset:";
  for (int idx : est.subset) out += " " + std::to_string(idx);
  out += "\n";
  return out;
}

std::string report_table(const UncertaintyReport& report) {
  std::string out = "n: " + std::to_string(report.n) + "\nsigma:\n" +
                    matrix_table(report.sigma.mat(), "  ");
  out += "min_eig: " + fmt6(report.min_eig) + "\npsd_ok: " +
         (report.psd_ok ? "true" : "false") + "\npairs:\n";
  for (const PairInequality& p : report.pairs) {
    out += std::string("  ") + to_string(p.kind) + "(" + std::to_string(p.j) + "," +
           std::to_string(p.k) + ")  lhs=" + fmt6(p.lhs) + "  rhs=" + fmt6(p.rhs) +
           "  slack=" + fmt6(p.slack) + "  holds=" + (p.holds ? "true" : "false") + "\n";
  }
  out += "capacity: value=" + fmt6(report.capacity.value) +
         "  threshold=" + fmt6(report.capacity.threshold) +
         "  ok=" + (report.capacity.ok ? "true" : "false") + "\nspectrum:";
  for (Eigen::Index i = 0; i < report.spectrum.size(); ++i) {
    out += " " + fmt6(report.spectrum[i]);
  }
  out += "\nm0: " + fmt6(report.m0) + "\n";
  return out;
}

std::vector<double> parse_times(const std::string& text) {
  std::vector<double> times;
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ',')) {
    if (token.empty()) continue;
    char* end = nullptr;
    const double t = std::strtod(token.c_str(), &end);
    if (end != token.c_str() + token.size() || !std::isfinite(t)) {
      throw InvalidInput("--times: cannot parse '" + token + "'");
    }
    times.push_back(t);
  }
  if (times.empty()) throw InvalidInput("--times must list at least one time");
  return times;
}

int cmd_estimate(const RunConfig& cfg) {
  const Tolerances tol = tolerances(cfg);
  const PointCloud cloud = load_cloud(cfg.cloud_path);
  const EllipsoidEstimate est = mve_estimate(cloud, mve_config(cfg), tol);
  if (cfg.output == "table") {
    write_payload(cfg, estimate_table(est));
  } else {
    write_payload(cfg, estimate_to_json(est).dump(2) + "\n");
  }
  return 0;
}

int cmd_analyze(const RunConfig& cfg) {
  const Tolerances tol = tolerances(cfg);
  if (cfg.cloud_path.empty() == cfg.sigma_path.empty()) {
    throw InvalidInput("analyze needs exactly one of --cloud or --sigma-json");
  }

  std::optional<EllipsoidEstimate> est;
  if (!cfg.sigma_path.empty()) {
    est = load_sigma(cfg.sigma_path);
  } else {
    est = mve_estimate(load_cloud(cfg.cloud_path), mve_config(cfg), tol);
  }
  const int n = est->center.n;
  const SymplecticFormSpec spec =
      cfg.omega_path.empty() ? SymplecticFormSpec::standard(n) : load_omega(cfg.omega_path);
  if (spec.n() != n) throw InvalidInput("omega block size does not match the input dimension");

  const UncertaintyReport report = analyze(*est, spec, tol);
  if (cfg.output == "table") {
    write_payload(cfg, report_table(report));
  } else {
    write_payload(cfg, report_to_json(report).dump(2) + "\n");
  }
  return report.psd_ok ? 0 : 1;
}

int cmd_flow(const RunConfig& cfg) {
  const Tolerances tol = tolerances(cfg);
  const std::vector<double> times = parse_times(cfg.times);
  const PointCloud cloud = load_cloud(cfg.cloud_path);
  const QuadraticHamiltonian h = hamiltonian_by_name(cfg.hamiltonian);
  const SymplecticFormSpec spec = cfg.omega_path.empty() ? SymplecticFormSpec::standard(cloud.n)
                                                         : load_omega(cfg.omega_path);
  MveConfig mve = mve_config(cfg);
  const std::vector<FlowSample> rows = invariance_experiment(cloud, h, times, spec, mve, tol);

  std::string payload;
  if (cfg.output == "table") {
    payload = "t  capacity  psd_ok  capacity_ok\n";
    for (const FlowSample& r : rows) {
      payload += fmt6(r.t) + "  " + fmt6(r.capacity) + "  " + (r.psd_ok ? "true" : "false") +
                 "  " + (r.capacity_ok ? "true" : "false") + "\n";
    }
  } else {
    for (const FlowSample& r : rows) {
      payload += Json{{"t", r.t},
                      {"capacity", r.capacity},
                      {"psd_ok", r.psd_ok},
                      {"capacity_ok", r.capacity_ok}}
                     .dump() +
                 "\n";
    }
  }
  write_payload(cfg, payload);
  return 0;
}

// Fixed witness: positive semidefinite Sigma whose pairwise inequalities all
// hold while Sigma + iJ is indefinite with determinant -1.
Mat counterexample_sigma() {
  Mat sigma = Mat::Identity(4, 4);
  sigma(0, 1) = sigma(1, 0) = -1.0;
  return sigma;
}

struct SelftestCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

int cmd_selftest(const RunConfig& cfg) {
  const Tolerances tol = tolerances(cfg);
  std::vector<SelftestCheck> checks;

  {
    const SymMatrix sigma(counterexample_sigma());
    const SymplecticFormSpec spec = SymplecticFormSpec::standard(2);
    const CMat h = sigma.mat().cast<std::complex<double>>() +
                   std::complex<double>(0.0, 1.0) * spec.omega().cast<std::complex<double>>();
    const std::complex<double> det = h.determinant();
    const auto [min_eig, psd_ok] = hermitian_condition(sigma, spec, tol);
    const auto pairs = pair_inequalities(sigma, spec, tol);
    bool all_hold = true;
    for (const auto& p : pairs) all_hold = all_hold && p.holds;
    const bool pass = std::abs(det - std::complex<double>(-1.0, 0.0)) <= 1e-9 && !psd_ok &&
                      all_hold && pairs.size() == 6;
    checks.push_back({"counterexample",
                      pass,
                      "det(Sigma+iJ) = " + fmt6(det.real()) + " (target -1 +/- 1e-9), psd_ok = " +
                          (psd_ok ? "true" : "false") + ", pairs holding = " +
                          std::to_string(pairs.size())});
  }

  {
    std::mt19937_64 rng(20251u);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_real_distribution<double> level(0.0, 2.0);
    int agreements = 0;
    const int trials = 500;
    for (int i = 0; i < trials; ++i) {
      Mat g(2, 2);
      g << unit(rng), unit(rng), unit(rng), unit(rng);
      const Mat sigma = g * g.transpose() + 0.05 * Mat::Identity(2, 2);
      const double a = level(rng);
      const SymMatrix sym(sigma);
      const SymplecticFormSpec spec = SymplecticFormSpec::scaled_standard(1, std::max(a, 1e-6));
      const auto [min_eig, psd_ok] = hermitian_condition(sym, spec, tol);
      const double eps = std::max(a, 1e-6);
      const bool closed_form = sigma.determinant() >= eps * eps;
      const double margin = std::abs(sigma.determinant() - eps * eps);
      if (psd_ok == closed_form || margin <= 1e-9) ++agreements;
    }
    checks.push_back({"n=1 equivalence",
                      agreements == trials,
                      std::to_string(agreements) + "/" + std::to_string(trials) + " agreements"});
  }

  {
    std::mt19937_64 rng(77u);
    std::normal_distribution<double> gauss(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 60; ++i) {
      const int n = (i % 2) + 1;
      Mat g(2 * n, 2 * n);
      for (Eigen::Index r = 0; r < g.rows(); ++r)
        for (Eigen::Index c = 0; c < g.cols(); ++c) g(r, c) = gauss(rng);
      const SymMatrix m(g * g.transpose() + 0.5 * Mat::Identity(2 * n, 2 * n));
      const WilliamsonDecomposition dec = williamson(m);
      const Mat j = standard_j(n);
      Mat target = Mat::Zero(2 * n, 2 * n);
      target.topLeftCorner(n, n) = dec.lambda.asDiagonal();
      target.bottomRightCorner(n, n) = dec.lambda.asDiagonal();
      worst = std::max(worst, (dec.s.transpose() * j * dec.s - j).cwiseAbs().maxCoeff());
      worst = std::max(worst, (dec.s.transpose() * m.mat() * dec.s - target).cwiseAbs().maxCoeff());
    }
    checks.push_back({"williamson residuals", worst <= 1e-9,
                      "max residual " + fmt6(worst) + " (bound 1e-9)"});
  }

  {
    double worst = 0.0;
    for (int dof : {2, 4, 8}) {
      for (double alpha = 0.1; alpha < 0.995; alpha += 0.05) {
        const double q = chi2_quantile(dof, alpha, tol);
        worst = std::max(worst, std::abs(detail::chi2_cdf(dof, q) - alpha));
      }
    }
    checks.push_back({"chi2 round trip", worst <= 1e-10,
                      "max |CDF(q)-alpha| = " + fmt6(worst) + " (bound 1e-10)"});
  }

  int passed = 0;
  std::string payload;
  for (const SelftestCheck& c : checks) {
    payload += std::string(c.pass ? "[PASS] " : "[FAIL] ") + c.name + ": " + c.detail + "\n";
    if (c.pass) ++passed;
  }
  payload += "selftest: " + std::to_string(passed) + "/" + std::to_string(checks.size()) +
             " checks passed\n";
  write_payload(cfg, payload);
  return passed == static_cast<int>(checks.size()) ? 0 : 1;
}

void emit_error(const char* kind, const std::string& message) {
  std::cerr << Json{{"error", kind}, {"message", message}}.dump() << "\n";
}

template <typename Fn>
int run_guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const IngestError& e) {
    emit_error("IngestError", e.what());
  } catch (const InvalidBlocks& e) {
    emit_error("InvalidBlocks", e.what());
  } catch (const DegenerateForm& e) {
    emit_error("DegenerateForm", e.what());
  } catch (const NotPositiveSemidefinite& e) {
    emit_error("NotPositiveSemidefinite", e.what());
  } catch (const NotPositiveDefinite& e) {
    emit_error("NotPositiveDefinite", e.what());
  } catch (const DegenerateScatter& e) {
    emit_error("DegenerateScatter", e.what());
  } catch (const GeneralPositionFailure& e) {
    emit_error("GeneralPositionFailure", e.what());
  } catch (const TooLarge& e) {
    emit_error("TooLarge", e.what());
  } catch (const FlowOverflow& e) {
    emit_error("FlowOverflow", e.what());
  } catch (const InvalidInput& e) {
    emit_error("InvalidInput", e.what());
  } catch (const Error& e) {
    emit_error("Error", e.what());
  } catch (const std::exception& e) {
    emit_error("Error", e.what());
  }
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust covariance ellipsoids, symplectic spectra, and classical "
               "uncertainty criteria for phase-space point clouds"};
  app.require_subcommand(1);
  RunConfig cfg;

  CLI::App* estimate = app.add_subcommand("estimate", "fit the minimum volume ellipsoid");
  estimate->add_option("--cloud", cfg.cloud_path, "point-cloud file (CSV or JSON)")->required();
  add_mve_flags(estimate, cfg);
  add_tolerance_flags(estimate, cfg);
  add_output_flags(estimate, cfg);

  CLI::App* analyze_cmd =
      app.add_subcommand("analyze", "evaluate the uncertainty criteria on a covariance");
  analyze_cmd->add_option("--cloud", cfg.cloud_path, "point-cloud file (runs MVE first)");
  analyze_cmd->add_option("--sigma-json", cfg.sigma_path,
                          "precomputed covariance {n, sigma, m0[, center]}");
  analyze_cmd->add_option("--omega", cfg.omega_path, "form blocks {n, A, B, C}; default J");
  add_mve_flags(analyze_cmd, cfg);
  add_tolerance_flags(analyze_cmd, cfg);
  add_output_flags(analyze_cmd, cfg);

  CLI::App* flow = app.add_subcommand("flow", "capacity invariance under a Hamiltonian flow");
  flow->add_option("--cloud", cfg.cloud_path, "point-cloud file")->required();
  flow->add_option("--hamiltonian", cfg.hamiltonian,
                   "oscillator | free_particle | coupled_oscillators");
  flow->add_option("--times", cfg.times, "comma-separated list of times")->required();
  flow->add_option("--omega", cfg.omega_path, "form blocks {n, A, B, C}; default J");
  add_mve_flags(flow, cfg);
  add_tolerance_flags(flow, cfg);
  add_output_flags(flow, cfg);

  CLI::App* selftest = app.add_subcommand("selftest", "run the embedded acceptance checks");
  add_tolerance_flags(selftest, cfg);
  add_output_flags(selftest, cfg);

  CLI11_PARSE(app, argc, argv);

  if (estimate->parsed()) return run_guarded([&] { return cmd_estimate(cfg); });
  if (analyze_cmd->parsed()) return run_guarded([&] { return cmd_analyze(cfg); });
  if (flow->parsed()) {
    // Exhaustive enumeration is the flow default; the invariance statement is
    // only exact in that mode.
    if (flow->count("--subsets") == 0) cfg.subsets = "exhaustive";
    return run_guarded([&] { return cmd_flow(cfg); });
  }
  return run_guarded([&] { return cmd_selftest(cfg); });
}
