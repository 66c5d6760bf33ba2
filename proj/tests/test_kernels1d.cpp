#include <doctest.h>

#include <cmath>
#include <numbers>

#include <Eigen/SVD>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "dssf/kernels1d.hpp"

using namespace dssf;

namespace {

constexpr double kPi = std::numbers::pi;

// int_R <x>^{-nu} cos(xi x) dx = 2 sqrt(pi)/Gamma(nu/2) (xi/2)^{(nu-1)/2} K_{(nu-1)/2}(xi)
double bessel_oracle(double nu, double xi) {
  if (xi == 0.0) return std::sqrt(kPi) * std::tgamma(0.5 * (nu - 1.0)) / std::tgamma(0.5 * nu);
  return 2.0 * std::sqrt(kPi) / std::tgamma(0.5 * nu) * std::pow(0.5 * xi, 0.5 * (nu - 1.0)) *
         boost::math::cyl_bessel_k(0.5 * (nu - 1.0), xi);
}

}  // namespace

TEST_CASE("weighted cosine integral against Bessel K") {
  for (double nu : {1.5, 2.0, 3.0, 4.5, 6.0}) {
    CHECK(weighted_mass(nu) == doctest::Approx(bessel_oracle(nu, 0.0)).epsilon(1e-12));
    for (double xi : {0.01, 0.3, 1.0, 4.0, 12.0}) {
      const double ref = bessel_oracle(nu, xi);
      CHECK(std::abs(weighted_cosine_integral(nu, xi) - ref) <= 1e-10 * std::max(1.0, std::abs(ref)));
    }
  }
  CHECK(weighted_cosine_integral(2.0, 3.0) == doctest::Approx(kPi * std::exp(-3.0)).epsilon(1e-10));
}

TEST_CASE("rank-two norms") {
  const double m = 1.0, nu = 2.0;
  for (double l : {1.01, 1.5, -2.0, 5.0}) {
    const auto r = make_rank_two_im_s(l, m, nu);
    const double k = std::sqrt(l * l - m * m);
    const double mass = kPi, c2 = kPi * std::exp(-2.0 * k);
    CHECK(r.norm_u == doctest::Approx(std::sqrt(0.5 * (mass - c2))).epsilon(1e-10));
    CHECK(r.norm_v == doctest::Approx(0.5 * std::sqrt(0.5 * (mass + c2))).epsilon(1e-10));
    CHECK(r.inner_vu < 1e-10);
    for (double p : {1.0, 2.0, 4.0})
      CHECK(r.schatten(p) == doctest::Approx(std::pow(2.0, 1.0 / p) * r.norm_u * r.norm_v).epsilon(1e-14));
  }
  CHECK_THROWS_AS(make_rank_two_im_s(0.5, 1.0, 2.0), std::invalid_argument);
}

TEST_CASE("grid singular values against a dense SVD") {
  const Grid1D g(10.0, 201);
  const double l = 1.5, m = 1.0, nu = 2.0, k = std::sqrt(l * l - m * m);
  Eigen::MatrixXd a(g.N, g.N);
  for (long long i = 0; i < g.N; ++i) {
    for (long long j = 0; j < g.N; ++j) {
      const double xi = g.node(i), xj = g.node(j);
      const double wi = (i == 0 || i == g.N - 1 ? 0.5 : 1.0) * g.h();
      const double wj = (j == 0 || j == g.N - 1 ? 0.5 : 1.0) * g.h();
      a(i, j) = 0.5 * std::sqrt(wi * wj) * std::pow(japanese(xi), -0.5 * nu) * std::pow(japanese(xj), -0.5 * nu) *
                std::sin(k * (xi - xj));
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const auto sv = im_s_grid_singular_values(l, m, nu, g);
  CHECK(sv.sigma1 == doctest::Approx(svd.singularValues()(0)).epsilon(1e-11));
  CHECK(sv.sigma2 == doctest::Approx(svd.singularValues()(1)).epsilon(1e-11));
  CHECK(svd.singularValues()(2) < 1e-12 * svd.singularValues()(0));
}

TEST_CASE("resolvent and S kernels pick the decaying or outgoing branch") {
  // inside the gap q = i sqrt(m^2 - z^2)
  const cplx in = s_kernel(0.6, 1.0, 0.0, 2.0, 0.0);
  CHECK(std::abs(in - cplx(0.0, 0.5 * std::exp(-0.8 * 2.0))) < 1e-15);
  CHECK(std::abs(s_kernel(0.6, 1.0, 0.0, 0.0, 2.0) + in) < 1e-15);
  // outside: q = sgn(z) sqrt(z^2 - m^2)
  const cplx up = s_kernel(1.25, 1.0, 0.0, 1.0, 0.0), down = s_kernel(-1.25, 1.0, 0.0, 1.0, 0.0);
  CHECK(std::abs(up - 0.5 * cplx(0.0, 1.0) * std::polar(1.0, 0.75)) < 1e-15);
  CHECK(std::abs(down - 0.5 * cplx(0.0, 1.0) * std::polar(1.0, -0.75)) < 1e-15);
  // off the axis Im q > 0
  CHECK(std::abs(s_kernel(cplx(1.25, 0.1), 1.0, 0.0, 40.0, 0.0)) < std::abs(s_kernel(cplx(1.25, 0.1), 1.0, 0.0, 1.0, 0.0)));
  CHECK(std::abs(resolvent_kernel(-4.0, 1.0) - cplx(std::exp(-2.0) / 4.0)) < 1e-15);
  CHECK(std::abs(resolvent_kernel(4.0, 1.0) - cplx(0.0, 1.0) * std::polar(1.0, 2.0) / 4.0) < 1e-15);
}

TEST_CASE("HS distance against nested adaptive quadrature") {
  const double lambda = 0.5, m = 1.0, nu = 4.0, X = 6.0;
  const double kappa = std::sqrt(m * m - lambda * lambda);
  auto diff = [&](double d) { return 0.5 * d - (1.0 - std::exp(-kappa * d)) / (2.0 * kappa); };
  using boost::math::quadrature::gauss_kronrod;
  auto inner = [&](double x) {
    auto f = [&](double y) {
      const double v = diff(std::abs(x - y));
      return std::pow(1.0 + y * y, -0.5 * nu) * v * v;
    };
    return std::pow(1.0 + x * x, -0.5 * nu) *
           (gauss_kronrod<double, 31>::integrate(f, -X, x, 12, 1e-13) +
            gauss_kronrod<double, 31>::integrate(f, x, X, 12, 1e-13));
  };
  const double oracle = std::sqrt(gauss_kronrod<double, 31>::integrate(inner, -X, X, 12, 1e-12));
  const auto r = j_kernel_hs_distance(lambda, m, nu, Grid1D(X, 6001));
  CHECK(r.value == doctest::Approx(oracle).epsilon(1e-6));
  CHECK_THROWS_AS(j_kernel_hs_distance(lambda, m, nu, Grid1D(X, 11)), ConvergenceError);
  CHECK_THROWS_AS(j_kernel_hs_distance(1.5, m, nu, Grid1D(X, 101)), std::invalid_argument);
}
