#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "bgrmt/quadrature.hpp"
#include "support/oracles.hpp"

using namespace bgrmt;

TEST_CASE("gauss-legendre integrates polynomials exactly", "[quadrature]") {
  auto f = [](double x) { return 5.0 * x * x * x * x - x * x + 3.0; };
  // int over [-1,1]: 1 - 2/3 + 6 = 5 + ... -> 5*2/5 - 2/3 + 6 = 2 - 2/3 + 6
  const double exact = 2.0 - 2.0 / 3.0 + 6.0;
  CHECK(integrate_gl(f, -1.0, 1.0, 3) == Catch::Approx(exact).epsilon(1e-14));
  CHECK(integrate_gl(f, -1.0, 1.0, 64) == Catch::Approx(exact).epsilon(1e-14));

  // smooth non-polynomial on a shifted interval
  const double val = integrate_gl([](double x) { return std::exp(x); }, 0.0, 2.0, 24);
  CHECK(val == Catch::Approx(std::exp(2.0) - 1.0).epsilon(1e-14));
}

TEST_CASE("chebyshev-2 rule integrates the sqrt weight exactly", "[quadrature]") {
  const QuadRule r = gauss_chebyshev2(16);
  double m0 = 0.0, m2 = 0.0;
  for (std::size_t k = 0; k < r.x.size(); ++k) {
    m0 += r.w[k];
    m2 += r.w[k] * r.x[k] * r.x[k];
  }
  // int sqrt(1-x^2) = pi/2, int x^2 sqrt(1-x^2) = pi/8
  CHECK(m0 == Catch::Approx(M_PI / 2.0).epsilon(1e-14));
  CHECK(m2 == Catch::Approx(M_PI / 8.0).epsilon(1e-14));
}

TEST_CASE("graded panels resolve endpoint singularities", "[quadrature]") {
  // int_0^1 log(x) dx = -1
  const double v1 = integrate_graded([](double x) { return std::log(x); }, 0.0,
                                     1.0, 0.0);
  CHECK(v1 == Catch::Approx(-1.0).epsilon(1e-13));

  // int_0^1 1/sqrt(x) dx = 2
  const double v2 = integrate_graded(
      [](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, 0.0);
  CHECK(v2 == Catch::Approx(2.0).epsilon(1e-12));

  // singularity at the right end: int_0^1 log(1-x) dx = -1
  const double v3 = integrate_graded([](double x) { return std::log(1.0 - x); },
                                     0.0, 1.0, 1.0);
  CHECK(v3 == Catch::Approx(-1.0).epsilon(1e-13));

  // smooth integrand is still handled correctly
  const double v4 =
      integrate_graded([](double x) { return std::cos(x); }, 0.0, 1.0, 0.0);
  CHECK(v4 == Catch::Approx(std::sin(1.0)).epsilon(1e-13));
}

TEST_CASE("adaptive simpson oracle sanity", "[quadrature]") {
  const double v = oracles::adaptive_simpson(
      [](double x) { return std::sqrt(std::max(1.0 - x * x, 0.0)); }, -1.0, 1.0,
      1e-12);
  CHECK(v == Catch::Approx(M_PI / 2.0).epsilon(1e-9));
}
