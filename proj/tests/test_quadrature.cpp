#include <doctest.h>

#include <cmath>
#include <numbers>

#include "iclt/quadrature.hpp"
#include "iclt/specfun.hpp"

using namespace iclt::quadrature;
constexpr double kPi = std::numbers::pi;

TEST_CASE("PeriodicGrid") {
  const PeriodicGrid grid(8);
  CHECK(grid.size() == 9);
  CHECK(grid.node(0) == 0.0);
  CHECK(grid.node(8) == kPi);
  const auto nodes = grid.nodes();
  for (std::size_t j = 1; j < nodes.size(); ++j) CHECK(nodes[j] > nodes[j - 1]);
  CHECK(grid.refined().intervals() == 16);
  CHECK_THROWS_AS(PeriodicGrid(2), std::invalid_argument);
  CHECK_THROWS_AS(PeriodicGrid(7), std::invalid_argument);
}

TEST_CASE("integrate_periodic") {
  SUBCASE("constant") {
    for (int m : {4, 16, 100}) CHECK(integrate_periodic([](double) { return 1.0; }, PeriodicGrid(m)) == doctest::Approx(kPi).epsilon(1e-15));
  }
  SUBCASE("orthogonal mode") {
    CHECK(std::abs(integrate_periodic([](double t) { return std::cos(2 * t); }, PeriodicGrid(16))) <= 1e-15);
  }
  SUBCASE("exponential weight integrates to pi I_0") {
    const double c = -3.0;
    const double got = integrate_periodic([&](double t) { return std::exp(-0.5 * c * std::cos(2 * t)); },
                                          PeriodicGrid(64));
    CHECK(std::abs(got - kPi * iclt::specfun::bessel_i(0, -0.5 * c)) <= 1e-13);
  }
  SUBCASE("linearity") {
    const PeriodicGrid grid(128);
    const auto f = [](double t) { return std::exp(std::sin(2 * t)); };
    const auto g = [](double t) { return t * t; };
    const double lhs = integrate_periodic([&](double t) { return 2.5 * f(t) - 0.75 * g(t); }, grid);
    const double rhs = 2.5 * integrate_periodic(f, grid) - 0.75 * integrate_periodic(g, grid);
    CHECK(std::abs(lhs - rhs) <= 1e-14 * std::abs(lhs));
  }
  SUBCASE("non-finite value names the node") {
    try {
      integrate_periodic([](double t) { return t > 1.0 ? NAN : 1.0; }, PeriodicGrid(8));
      FAIL("expected EvaluationError");
    } catch (const EvaluationError& e) {
      CHECK(e.node() == 3);
    }
  }
}

TEST_CASE("cumulative_integral") {
  SUBCASE("zero integrand") {
    for (double v : cumulative_integral([](double) { return 0.0; }, PeriodicGrid(16))) CHECK(v == 0.0);
  }
  SUBCASE("antiderivative of sin 2t") {
    const PeriodicGrid grid(64);
    const auto F = cumulative_integral([](double t) { return std::sin(2 * t); }, grid);
    CHECK(F[0] == 0.0);
    double worst = 0.0;
    for (std::size_t j = 0; j < F.size(); ++j)
      worst = std::max(worst, std::abs(F[j] - 0.5 * (1 - std::cos(2 * grid.node(j)))));
    CHECK(worst <= 1e-6);
  }
  SUBCASE("fourth-order convergence") {
    const auto f = [](double t) { return std::exp(std::cos(t)) * std::sin(3 * t); };
    const auto err = [&](int m) {
      // Reference from a much finer grid.
      const PeriodicGrid fine(64 * m), grid(m);
      const auto ref = cumulative_integral(f, fine);
      const auto F = cumulative_integral(f, grid);
      double worst = 0.0;
      for (std::size_t j = 0; j < F.size(); ++j) worst = std::max(worst, std::abs(F[j] - ref[64 * j]));
      return worst;
    };
    const double ratio = err(64) / err(128);
    CHECK(ratio > 12.0);
    CHECK(ratio < 20.0);
  }
  SUBCASE("full-period value of cos 2t") {
    const auto F = cumulative_integral([](double t) { return std::cos(2 * t); }, PeriodicGrid(64));
    CHECK(std::abs(F.back()) <= 1e-15);
  }
  SUBCASE("last node matches integrate_periodic") {
    const PeriodicGrid grid(512);
    const auto f = [](double t) { return std::exp(1.5 * std::cos(2 * t)) * (2 + std::sin(4 * t)); };
    const double total = integrate_periodic(f, grid);
    CHECK(std::abs(cumulative_integral(f, grid).back() - total) <= 1e-14 * std::abs(total));
  }
}

TEST_CASE("integrate_adaptive stops once doubling no longer changes the result") {
  const auto f = [](double t) { return std::exp(4.0 * std::cos(2 * t)); };
  const auto res = integrate_adaptive(f, 1e-13, 8);
  CHECK(std::abs(res.value - res.previous) <= 1e-13 * res.value);
  CHECK(res.value == doctest::Approx(kPi * iclt::specfun::bessel_i(0, 4.0)).epsilon(1e-13));
  CHECK_THROWS(integrate_adaptive([](double t) { return std::sqrt(t); }, 1e-15, 8, 64));
}
