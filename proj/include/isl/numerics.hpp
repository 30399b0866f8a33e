// Shared numerical kernels: cubic splines, adaptive quadrature, linear least
// squares via Householder QR, bracketed root finding, Halton sequences.
#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

namespace isl {

struct NumericsError : std::runtime_error {
  explicit NumericsError(const std::string& msg) : std::runtime_error(msg) {}
};

// Natural parametric cubic spline through (t_i, v_i), not-a-knot ends.
class CubicSpline {
 public:
  CubicSpline() = default;
  CubicSpline(std::vector<double> t, std::vector<double> v);

  double operator()(double t) const;
  double derivative(double t) const;
  double second_derivative(double t) const;

  double t_min() const { return t_.front(); }
  double t_max() const { return t_.back(); }
  std::size_t size() const { return t_.size(); }

 private:
  std::size_t segment(double t) const;
  std::vector<double> t_, a_, b_, c_, d_;  // a + b dt + c dt^2 + d dt^3
};

// Adaptive Gauss-Kronrod (G7,K15) quadrature of a bounded integrand.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double abs_tol = 1e-12, double rel_tol = 1e-10,
                          int max_depth = 40);

// Least squares min ||A x - b||_2 by Householder QR with column scaling.
// A is row-major m x n, m >= n. Returns x (size n); residual out-param optional.
std::vector<double> solve_least_squares(const std::vector<double>& a, std::size_t m,
                                        std::size_t n, const std::vector<double>& b,
                                        double* residual_norm = nullptr);

// Brent-style bracketed root of f on [a, b] with f(a) f(b) <= 0.
double find_root(const std::function<double(double)>& f, double a, double b,
                 double tol = 1e-13, int max_iter = 200);

// Newton refinement with bisection fallback inside a bracket.
double refine_root(const std::function<double(double)>& f,
                   const std::function<double(double)>& df, double x0, double lo,
                   double hi, double tol = 1e-13, int max_iter = 60);

// Deterministic quasi-random points in [0,1)^2 (Halton bases 2 and 3).
std::vector<std::pair<double, double>> halton_2d(std::size_t count, std::uint32_t seed_offset = 0);

// Greatest common divisor of a list (empty list -> 0).
long long gcd_list(const std::vector<long long>& values);

// Monotone cubic interpolant (Fritsch-Carlson); stays monotone if data is.
class MonotoneCubic {
 public:
  MonotoneCubic() = default;
  MonotoneCubic(std::vector<double> t, std::vector<double> v);
  double operator()(double t) const;
  double derivative(double t) const;
  double t_min() const { return t_.front(); }
  double t_max() const { return t_.back(); }

 private:
  std::vector<double> t_, v_, m_;  // nodes, values, node slopes
};

}  // namespace isl
