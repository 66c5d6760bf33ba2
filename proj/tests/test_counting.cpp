#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "dssf/counting.hpp"

using namespace dssf;

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::MatrixXcd random_matrix(std::mt19937_64& rng, int r, int c) {
  std::normal_distribution<double> n;
  Eigen::MatrixXcd a(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) {
      const double re = n(rng);
      a(i, j) = cplx(re, n(rng));
    }
  return a;
}

Eigen::MatrixXcd random_hermitian(std::mt19937_64& rng, int n) {
  const auto a = random_matrix(rng, n, n);
  return 0.5 * (a + a.adjoint());
}

// Q diag(values) Q^* with a random unitary Q.
Eigen::MatrixXcd with_spectrum(std::mt19937_64& rng, const std::vector<double>& values) {
  const int n = static_cast<int>(values.size());
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(random_matrix(rng, n, n));
  const Eigen::MatrixXcd q = qr.householderQ();
  Eigen::VectorXcd d(n);
  for (int i = 0; i < n; ++i) d(i) = values[i];
  return q * d.asDiagonal() * q.adjoint();
}

}  // namespace

TEST_CASE("counts far below the double range are exact") {
  auto s = LogSpectrum::from_logs({-800.0, -900.0, -1000.0, 5.0}, {1, 1, 1, -1});
  CHECK(s.n_plus_log(-850.0) == 1);
  CHECK(s.n_plus_log(-950.0) == 2);
  CHECK(s.n_plus_log(-1000.0) == 2);  // equality is not "above"
  CHECK(s.n_minus_log(4.0) == 1);
  CHECK(s.n_minus_log(5.0) == 0);
  s.set_log_truncation_floor(-1000.0);
  CHECK(s.adequate_for_log(-990.0));
  CHECK_FALSE(s.adequate_for_log(-998.0));
}

TEST_CASE("spectrum operations") {
  const auto s = LogSpectrum::from_values({3.0, -2.0, 0.0, 1.0});
  CHECK(s.n_plus(0.5) == 2);
  CHECK(s.n_minus(0.5) == 1);
  CHECK(s.scaled(std::log(2.0)).n_plus(5.0) == 1);
  CHECK(s.negated().n_minus(2.5) == 1);
  CHECK(s.merged(s).n_plus(0.5) == 4);
  CHECK(std::exp(s.log_schatten_power(2.0)) == doctest::Approx(14.0));
  CHECK(s.near_threshold(1.0) == 1);
  CHECK_THROWS_AS(s.n_plus(0.0), std::invalid_argument);
}

TEST_CASE("averaged count of a scalar pencil") {
  // n_+(s; a + t b) = 1 exactly for t > (s - a)/b.
  for (double a : {-1.0, 0.3, 2.0}) {
    for (double b : {0.5, 3.0}) {
      Eigen::MatrixXcd A(1, 1), B(1, 1);
      A(0, 0) = a;
      B(0, 0) = b;
      const double oracle = 0.5 - std::atan((1.0 - a) / b) / kPi;
      CHECK(mu_average_counting(1.0, A, B).value == doctest::Approx(oracle).epsilon(1e-12));
      const double oracle_minus = 0.5 - std::atan((1.0 + a) / b) / kPi;
      CHECK(mu_average_counting(1.0, A, B, CountSign::Minus).value == doctest::Approx(oracle_minus).epsilon(1e-12));
    }
  }
}

TEST_CASE("averaged count with A = 0 is the arctan trace") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.01, 5.0);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> vals(2 + trial);
    double oracle = 0.0;
    for (double& v : vals) {
      v = u(rng);
      oracle += std::atan(v / 0.7) / kPi;
    }
    const auto t = with_spectrum(rng, vals);
    const auto z = Eigen::MatrixXcd::Zero(t.rows(), t.cols()).eval();
    CHECK(mu_average_counting(0.7, z, t).value == doctest::Approx(oracle).epsilon(1e-11));
    const auto id = arctan_trace_identity(0.7, LogSpectrum::from_values(vals));
    CHECK(id.rhs == doctest::Approx(oracle).epsilon(1e-13));
    CHECK(id.lhs == doctest::Approx(oracle).epsilon(1e-12));
  }
}

TEST_CASE("averaged count of a non-commuting pencil against angular sampling") {
  std::mt19937_64 rng(5);
  const auto a = random_hermitian(rng, 6);
  const auto g = random_matrix(rng, 6, 3);
  const Eigen::MatrixXcd b = g * g.adjoint();
  const double s = 0.8;
  // Midpoint rule in theta = atan t: dmu = dtheta / pi.
  const int n = 20000;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const double th = -kPi / 2 + (i + 0.5) * kPi / n;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a + std::tan(th) * b);
    acc += static_cast<double>((es.eigenvalues().array() > s).count());
  }
  const double sampled = acc / n;
  const auto r = mu_average_counting(s, a, b);
  CHECK(r.value == doctest::Approx(sampled).epsilon(2e-3));
}

TEST_CASE("random flip, Weyl and p-bound checks") {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 30; ++t) {
    CHECK(check_flip(random_matrix(rng, 3 + t % 5, 2 + t % 7), 0.5));
    const auto t1 = random_hermitian(rng, 6), t2 = random_hermitian(rng, 6);
    CHECK(check_weyl(0.3, 0.9, t1, t2));
    CHECK(check_pbound(0.4, LogSpectrum::from_matrix(t1), 1 + t % 3));
  }
}

TEST_CASE("averaged count bound") {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 10; ++t) {
    const auto t1 = random_hermitian(rng, 5);
    const auto g = random_matrix(rng, 5, 2);
    const Eigen::MatrixXcd t2 = g * g.adjoint();
    CHECK(check_pushnitski_bound(0.5, 0.5, t1, t2));
    CHECK(check_pushnitski_bound(0.5, 0.5, t1, t2, CountSign::Minus));
  }
}

TEST_CASE("guards") {
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Identity(2, 2), b = -Eigen::MatrixXcd::Identity(2, 2);
  CHECK_THROWS_AS(mu_average_counting(1.0, a, b), std::invalid_argument);
  CHECK_THROWS_AS(arctan_trace_identity(1.0, LogSpectrum::from_values({1.0, -1.0})), std::invalid_argument);
}
