#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "isl/numerics.hpp"

using namespace isl;

TEST_CASE("cubic spline reproduces cubics and derivatives") {
  std::vector<double> t, v;
  auto f = [](double x) { return 2.0 + x - 0.5 * x * x + 0.25 * x * x * x; };
  auto fp = [](double x) { return 1.0 - x + 0.75 * x * x; };
  for (int i = 0; i <= 20; ++i) {
    double x = -1.0 + 0.1 * i;
    t.push_back(x);
    v.push_back(f(x));
  }
  CubicSpline s(t, v);
  for (double x : {-0.95, -0.33, 0.0, 0.41, 0.87}) {
    CHECK(s(x) == doctest::Approx(f(x)).epsilon(1e-12));
    CHECK(s.derivative(x) == doctest::Approx(fp(x)).epsilon(1e-10));
  }
}

TEST_CASE("spline interpolates smooth data accurately") {
  std::vector<double> t, v;
  for (int i = 0; i <= 60; ++i) {
    double x = i / 60.0 * 3.14159;
    t.push_back(x);
    v.push_back(std::sin(x));
  }
  CubicSpline s(t, v);
  double max_err = 0;
  for (int i = 0; i < 500; ++i) {
    double x = i / 499.0 * 3.14159;
    max_err = std::max(max_err, std::abs(s(x) - std::sin(x)));
  }
  CHECK(max_err < 1e-7);
}

TEST_CASE("adaptive quadrature") {
  double v = integrate_adaptive([](double x) { return std::exp(-x * x); }, 0.0, 1.0);
  CHECK(v == doctest::Approx(0.7468241328124270).epsilon(1e-12));
  double w = integrate_adaptive([](double x) { return 1.0 / (1.0 + x * x); }, 0.0, 1.0);
  CHECK(w == doctest::Approx(M_PI / 4).epsilon(1e-12));
  // near-singular but bounded integrand
  double u = integrate_adaptive([](double x) { return std::log(x + 1e-8); }, 0.0, 1.0,
                                1e-12, 1e-10, 48);
  CHECK(u == doctest::Approx(-1.0).epsilon(1e-5));
}

TEST_CASE("least squares recovers exact polynomial coefficients") {
  // fit y = 3 - 2 t + 0.5 t^2 on 20 points
  std::size_t m = 20, n = 3;
  std::vector<double> A(m * n), b(m);
  for (std::size_t i = 0; i < m; ++i) {
    double t = 0.1 * static_cast<double>(i);
    A[i * n + 0] = 1;
    A[i * n + 1] = t;
    A[i * n + 2] = t * t;
    b[i] = 3 - 2 * t + 0.5 * t * t;
  }
  double res = -1;
  auto x = solve_least_squares(A, m, n, b, &res);
  CHECK(x[0] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(x[1] == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(x[2] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(res < 1e-12);
}

TEST_CASE("find_root and refine_root") {
  double r = find_root([](double x) { return std::cos(x) - x; }, 0.0, 1.0);
  CHECK(std::abs(std::cos(r) - r) < 1e-12);
  double s = refine_root([](double x) { return x * x - 2; }, [](double x) { return 2 * x; },
                         1.0, 0.0, 2.0);
  CHECK(s == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("halton points are deterministic and fill the square") {
  auto a = halton_2d(64);
  auto b = halton_2d(64);
  REQUIRE(a.size() == 64);
  CHECK(a == b);
  for (auto& [x, y] : a) {
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
    CHECK(y >= 0.0);
    CHECK(y < 1.0);
  }
}

TEST_CASE("gcd_list") {
  CHECK(gcd_list({4, 6}) == 2);
  CHECK(gcd_list({2, 2}) == 2);
  CHECK(gcd_list({3, 5}) == 1);
  CHECK(gcd_list({}) == 0);
}

TEST_CASE("monotone cubic stays monotone") {
  std::vector<double> t = {0, 0.2, 0.5, 0.8, 1.0};
  std::vector<double> v = {0, 0.01, 0.4, 0.99, 1.0};
  MonotoneCubic mc(t, v);
  double prev = mc(0.0);
  for (int i = 1; i <= 200; ++i) {
    double cur = mc(i / 200.0);
    CHECK(cur >= prev - 1e-14);
    prev = cur;
  }
}
