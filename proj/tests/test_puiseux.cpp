#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "isl/puiseux.hpp"

using namespace isl;

TEST_CASE("fit recovers 3 + 2 sqrt(t) with ramification 2") {
  std::vector<std::pair<double, double>> samples;
  for (int i = 0; i < 24; ++i) {
    double t = 0.01 + (0.5 - 0.01) * i / 23.0;
    samples.emplace_back(t, 3.0 + 2.0 * std::sqrt(t));
  }
  auto res = puiseux_fit(samples, 2, 4);
  REQUIRE(res.accepted);
  CHECK(res.series.coefficients[0] == doctest::Approx(3.0).epsilon(1e-6));
  CHECK(res.series.coefficients[1] == doctest::Approx(2.0).epsilon(1e-6));
  for (std::size_t j = 2; j < res.series.coefficients.size(); ++j)
    CHECK(std::abs(res.series.coefficients[j]) < 1e-5);
}

TEST_CASE("fit recovers exact polynomial coefficients with k = 1") {
  std::vector<std::pair<double, double>> samples;
  for (int i = 0; i < 30; ++i) {
    double t = -1.0 + 2.0 * i / 29.0;
    samples.emplace_back(t, 1.5 - 0.25 * t + 0.125 * t * t * t);
  }
  auto res = puiseux_fit(samples, 1, 4);
  REQUIRE(res.accepted);
  CHECK(res.residual < 1e-8);
  CHECK(res.series.coefficients[0] == doctest::Approx(1.5).epsilon(1e-10));
  CHECK(res.series.coefficients[1] == doctest::Approx(-0.25).epsilon(1e-10));
  CHECK(res.series.coefficients[3] == doctest::Approx(0.125).epsilon(1e-10));
}

TEST_CASE("mis-specified model is rejected") {
  // sqrt(t) data fitted with integer powers only: residual stays large
  std::vector<std::pair<double, double>> samples;
  for (int i = 0; i < 40; ++i) {
    double t = 1e-4 + (0.5 - 1e-4) * i / 39.0;
    samples.emplace_back(t, std::sqrt(t));
  }
  auto res = puiseux_fit(samples, 1, 3, 1e-4);
  CHECK_FALSE(res.accepted);
}

TEST_CASE("odd ramification handles negative arguments") {
  auto res = puiseux_fit(
      {
          {-0.4, std::cbrt(-0.4)}, {-0.3, std::cbrt(-0.3)}, {-0.2, std::cbrt(-0.2)},
          {-0.1, std::cbrt(-0.1)}, {0.1, std::cbrt(0.1)},   {0.2, std::cbrt(0.2)},
          {0.3, std::cbrt(0.3)},   {0.4, std::cbrt(0.4)},
      },
      3, 1, 1e-6);
  REQUIRE(res.accepted);
  CHECK(res.series.coefficients[1] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("approx_equal compares across ramification lifts") {
  PuiseuxSeries a{"F", 1, {1.0, 2.0}, 0};
  PuiseuxSeries b{"F", 2, {1.0, 0.0, 2.0}, 0};
  CHECK(PuiseuxSeries::approx_equal(a, b, 1e-12));
  PuiseuxSeries c{"F", 2, {1.0, 0.5, 2.0}, 0};
  CHECK_FALSE(PuiseuxSeries::approx_equal(a, c, 1e-12));
}

TEST_CASE("compose_base against numeric composition") {
  PuiseuxSeries s{"F", 2, {0.5, 1.0, -0.5, 0.25, 0.0, 0.0, 0.0}, 0};
  std::vector<double> psi = {0.0, 1.0, 0.3, -0.1};  // psi(t) = t + 0.3 t^2 - 0.1 t^3
  PuiseuxSeries comp = s.compose_base(psi);
  for (double t : {0.01, 0.05, 0.1}) {
    double u = psi[1] * t + psi[2] * t * t + psi[3] * t * t * t;
    CHECK(comp(t) == doctest::Approx(s(u)).epsilon(1e-5));
  }
}

TEST_CASE("series reciprocal") {
  PuiseuxSeries s{"F", 1, {2.0, 1.0, 0.5}, 0};
  PuiseuxSeries r = puiseux_reciprocal(s);
  for (double t : {0.01, 0.1, 0.2}) {
    CHECK(r(t) == doctest::Approx(1.0 / s(t)).epsilon(5e-3));
  }
  CHECK(r.coefficients[0] == doctest::Approx(0.5));
}

TEST_CASE("log fit separates the singular channel") {
  // value = (2 + t) log(t) + (1 - 0.5 t)
  std::vector<std::pair<double, double>> samples;
  for (int i = 0; i < 40; ++i) {
    double t = 0.001 * std::pow(300.0, i / 39.0);
    samples.emplace_back(t, (2.0 + t) * std::log(t) + 1.0 - 0.5 * t);
  }
  auto res = puiseux_log_fit(samples, 1, 3);
  REQUIRE(res.accepted);
  CHECK(res.log_part.coefficients[0] == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(res.log_part.coefficients[1] == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(res.regular.coefficients[0] == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(res.regular.coefficients[1] == doctest::Approx(-0.5).epsilon(1e-3));
}
