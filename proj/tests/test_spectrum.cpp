#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "helpers.hpp"

using namespace symcap;
using testutil::random_pd;
using testutil::random_symplectic;

TEST_CASE("sigma_spectrum of the identity is all ones") {
  for (int n : {1, 2, 3}) {
    const Vec lam = sigma_spectrum(SymMatrix(Mat::Identity(2 * n, 2 * n))).lambdas;
    REQUIRE(lam.size() == n);
    for (int j = 0; j < n; ++j) CHECK(lam[j] == Catch::Approx(1.0).margin(1e-12));
  }
}

TEST_CASE("sigma_spectrum matches a direct complex eigensolve of JM") {
  Mat m = Mat::Zero(2, 2);
  m(0, 0) = 1.0;
  m(1, 1) = 4.0;
  const Vec lam = sigma_spectrum(SymMatrix(m)).lambdas;
  REQUIRE(lam.size() == 1);
  CHECK(lam[0] == Catch::Approx(2.0).margin(1e-12));

  // oracle: eigenvalues of J*M straight from a general eigensolver
  std::mt19937_64 rng(51u);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + trial % 2;
    const Mat pd = random_pd(2 * n, rng);
    Eigen::EigenSolver<Mat> direct(standard_j(n) * pd);
    std::vector<double> moduli;
    for (Eigen::Index i = 0; i < direct.eigenvalues().size(); ++i) {
      CHECK(std::abs(direct.eigenvalues()[i].real()) < 1e-9);
      moduli.push_back(std::abs(direct.eigenvalues()[i].imag()));
    }
    std::sort(moduli.rbegin(), moduli.rend());
    const Vec lambdas = sigma_spectrum(SymMatrix(pd)).lambdas;
    for (int j = 0; j < n; ++j) {
      CHECK(lambdas[j] == Catch::Approx(moduli[2 * j]).margin(1e-9));
    }
  }
}

TEST_CASE("sigma_spectrum is a symplectic invariant") {
  std::mt19937_64 rng(52u);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 1 + trial % 3;
    const Mat m = random_pd(2 * n, rng);
    const Mat s = random_symplectic(n, rng);
    const Vec base = sigma_spectrum(SymMatrix(m)).lambdas;
    const Vec moved = sigma_spectrum(SymMatrix(s.transpose() * m * s)).lambdas;
    CHECK((base - moved).cwiseAbs().maxCoeff() <= 1e-8 * std::max(1.0, base[0]));
  }
}

TEST_CASE("sigma_spectrum rejects non-PD input") {
  Mat m = Mat::Identity(2, 2);
  m(1, 1) = -1.0;
  CHECK_THROWS_AS(sigma_spectrum(SymMatrix(m)), NotPositiveDefinite);
}

TEST_CASE("inversion law: spectrum of M^{-1} is the reversed reciprocals") {
  std::mt19937_64 rng(53u);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + trial % 3;
    const Mat m = random_pd(2 * n, rng);
    const Vec lam = sigma_spectrum(SymMatrix(m)).lambdas;
    const Vec lam_inv = sigma_spectrum(SymMatrix(m.inverse())).lambdas;
    for (int j = 0; j < n; ++j) {
      CHECK(lam_inv[j] == Catch::Approx(1.0 / lam[n - 1 - j]).epsilon(1e-8));
    }
  }
}

TEST_CASE("omega_spectrum reduces to sigma_spectrum for J and scales for epsilon J") {
  std::mt19937_64 rng(54u);
  const Mat m = random_pd(4, rng);
  const Vec sigma = sigma_spectrum(SymMatrix(m)).lambdas;

  const Vec via_j = omega_spectrum(SymMatrix(m), SymplecticFormSpec::standard(2)).lambdas;
  CHECK((via_j - sigma).cwiseAbs().maxCoeff() <= 1e-10);

  const double eps = 0.42;
  const Vec via_eps =
      omega_spectrum(SymMatrix(m), SymplecticFormSpec::scaled_standard(2, eps)).lambdas;
  CHECK((via_eps - eps * sigma).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("omega spectrum equals the sigma spectrum of F M F^T") {
  std::mt19937_64 rng(55u);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + trial % 2;
    const Mat m = random_pd(2 * n, rng);

    // independently known factor G with Omega = G^T J G
    const auto [spec, g] = testutil::random_spec_with_factor(n, rng);
    const Vec direct = omega_spectrum(SymMatrix(m), spec).lambdas;
    const Vec pulled = sigma_spectrum(SymMatrix(g * m * g.transpose())).lambdas;
    CHECK((direct - pulled).cwiseAbs().maxCoeff() <= 1e-8 * std::max(1.0, direct[0]));

    // general spec, factor from the spec itself
    const SymplecticFormSpec general = testutil::random_form_spec(n, rng);
    const Mat f = general.darboux_f();
    const Vec via_f = sigma_spectrum(SymMatrix(f * m * f.transpose())).lambdas;
    const Vec via_omega = omega_spectrum(SymMatrix(m), general).lambdas;
    CHECK((via_omega - via_f).cwiseAbs().maxCoeff() <= 1e-8 * std::max(1.0, via_omega[0]));
  }
}

TEST_CASE("williamson residuals on fixed and random matrices") {
  // identity: any valid S works, the contract is the residual pair
  const WilliamsonDecomposition id = williamson(SymMatrix(Mat::Identity(4, 4)));
  const Mat j2 = standard_j(2);
  CHECK((id.s.transpose() * j2 * id.s - j2).norm() <= 1e-9);
  for (int j = 0; j < 2; ++j) CHECK(id.lambda[j] == Catch::Approx(1.0).margin(1e-12));

  // already in normal form: Lambda comes back sorted descending
  Mat diag = Mat::Zero(4, 4);
  diag(0, 0) = 0.5;
  diag(1, 1) = 2.5;
  diag(2, 2) = 0.5;
  diag(3, 3) = 2.5;
  const WilliamsonDecomposition fixed = williamson(SymMatrix(diag));
  CHECK(fixed.lambda[0] == Catch::Approx(2.5).margin(1e-10));
  CHECK(fixed.lambda[1] == Catch::Approx(0.5).margin(1e-10));

  std::mt19937_64 rng(56u);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + trial % 3;
    const Mat m = random_pd(2 * n, rng);
    const WilliamsonDecomposition dec = williamson(SymMatrix(m));
    const Mat j = standard_j(n);
    Mat target = Mat::Zero(2 * n, 2 * n);
    target.topLeftCorner(n, n) = dec.lambda.asDiagonal();
    target.bottomRightCorner(n, n) = dec.lambda.asDiagonal();
    CHECK((dec.s.transpose() * j * dec.s - j).norm() <= 1e-9);
    CHECK((dec.s.transpose() * m * dec.s - target).norm() <= 1e-9);
    const Vec lam = sigma_spectrum(SymMatrix(m)).lambdas;
    CHECK((dec.lambda - lam).cwiseAbs().maxCoeff() <= 1e-9 * std::max(1.0, lam[0]));
  }

  CHECK_THROWS_AS(williamson(SymMatrix(Mat::Zero(2, 2))), NotPositiveDefinite);
}

TEST_CASE("normal_form_ellipsoid coefficients equal the sigma spectrum") {
  std::mt19937_64 rng(57u);
  const Mat m = random_pd(4, rng);
  const auto axes = normal_form_ellipsoid(SymMatrix(m));
  const Vec lam = sigma_spectrum(SymMatrix(m)).lambdas;
  REQUIRE(axes.size() == 2);
  for (int j = 0; j < 2; ++j) {
    CHECK(axes[j].lambda == Catch::Approx(lam[j]).epsilon(1e-9));
    // the axes carry their mode: S column quadratic forms reproduce lambda
    CHECK(axes[j].axis_x.dot(m * axes[j].axis_x) == Catch::Approx(lam[j]).epsilon(1e-8));
    CHECK(axes[j].axis_p.dot(m * axes[j].axis_p) == Catch::Approx(lam[j]).epsilon(1e-8));
  }
}

TEST_CASE("capacity of balls and planar ellipses") {
  for (double radius : {1.0, 2.5}) {
    for (int n : {1, 2, 3}) {
      const Ellipsoid ball(PhaseVector(n, Vec::Zero(2 * n)),
                           SymMatrix(Mat::Identity(2 * n, 2 * n)), radius * radius);
      CHECK(capacity(ball) == Catch::Approx(M_PI * radius * radius).epsilon(1e-12));
    }
  }

  std::mt19937_64 rng(58u);
  std::uniform_real_distribution<double> side(0.2, 5.0);
  for (int trial = 0; trial < 25; ++trial) {
    const double a = side(rng);
    const double b = side(rng);
    Mat q = Mat::Zero(2, 2);
    q(0, 0) = a;
    q(1, 1) = b;
    const Ellipsoid ellipse(PhaseVector(1, Vec::Zero(2)), SymMatrix(q), 1.0);
    CHECK(capacity(ellipse) == Catch::Approx(M_PI * std::sqrt(a * b)).epsilon(1e-9));
  }
}

TEST_CASE("capacity ignores the center") {
  std::mt19937_64 rng(59u);
  const Mat q = random_pd(4, rng);
  Vec center(4);
  center << 3.0, -1.5, 0.25, 9.0;
  const Ellipsoid moved(PhaseVector(2, center), SymMatrix(q), 2.0);
  const Ellipsoid centered(PhaseVector(2, Vec::Zero(4)), SymMatrix(q), 2.0);
  CHECK(capacity(moved) == capacity(centered));
}

TEST_CASE("capacity under epsilon J matches the explicit pullback") {
  std::mt19937_64 rng(60u);
  const Mat q = random_pd(2, rng);
  const Ellipsoid e(PhaseVector(1, Vec::Zero(2)), SymMatrix(q), 1.3);
  const double base = capacity(e);
  for (double eps : {0.2, 1.0, 3.7}) {
    const double general = capacity(e, SymplecticFormSpec::scaled_standard(1, eps));
    // pullback oracle: F = sqrt(eps) I maps the shape to Q / eps
    const Ellipsoid pulled(e.center, SymMatrix(q / eps), 1.3);
    CHECK(general == Catch::Approx(capacity(pulled)).epsilon(1e-9));
    CHECK(general == Catch::Approx(base / eps).epsilon(1e-9));
  }
}

TEST_CASE("capacity is monotone under shape growth") {
  std::mt19937_64 rng(61u);
  for (int trial = 0; trial < 15; ++trial) {
    const int n = 1 + trial % 2;
    const Mat q1 = random_pd(2 * n, rng);
    const Vec t = testutil::random_gaussian(2 * n, 1, rng).col(0);
    const Mat q2 = q1 + t * t.transpose();  // q1 <= q2, ellipsoid e1 inside e2
    const Ellipsoid e1(PhaseVector(n, Vec::Zero(2 * n)), SymMatrix(q1), 1.0);
    const Ellipsoid e2(PhaseVector(n, Vec::Zero(2 * n)), SymMatrix(q2), 1.0);
    CHECK(capacity(e1) <= capacity(e2) + 1e-9);
  }
}

TEST_CASE("spectrum_monotonic_check accepts growth and rejects bad input") {
  std::mt19937_64 rng(62u);
  const Mat m = random_pd(4, rng);
  CHECK(spectrum_monotonic_check(SymMatrix(m), SymMatrix(m)));
  CHECK(spectrum_monotonic_check(SymMatrix(m), SymMatrix(2.0 * m)));

  const Vec lam = sigma_spectrum(SymMatrix(m)).lambdas;
  const Vec lam2 = sigma_spectrum(SymMatrix(2.0 * m)).lambdas;
  CHECK((lam2 - 2.0 * lam).cwiseAbs().maxCoeff() <= 1e-9);

  for (int trial = 0; trial < 20; ++trial) {
    const Vec t = testutil::random_gaussian(4, 1, rng).col(0);
    CHECK(spectrum_monotonic_check(SymMatrix(m), SymMatrix(m + t * t.transpose())));
  }

  CHECK_THROWS_AS(
      spectrum_monotonic_check(SymMatrix(m), SymMatrix(m - 0.1 * Mat::Identity(4, 4))),
      InvalidInput);
}
