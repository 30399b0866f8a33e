// Truncated Puiseux series: expansions in fractional powers t^(j/k). The
// carrier of the continuous invariants (frequency functions, period cocycles,
// double-valued eigenvalue branches).
#pragma once

#include <string>
#include <vector>

#include "isl/numerics.hpp"

namespace isl {

struct PuiseuxSeries {
  std::string base_variable;     // which coordinate function it expands in
  int ramification = 1;          // k >= 1
  std::vector<double> coefficients;  // c_j for exponent j/k, j = 0..J
  int branch_id = 0;             // for multi-branched data

  int order() const { return static_cast<int>(coefficients.size()) - 1; }
  double exponent(std::size_t j) const {
    return static_cast<double>(j) / static_cast<double>(ramification);
  }

  // Evaluate at t >= 0 (or any t when k is odd: real root convention).
  double operator()(double t) const;

  // Coefficient-wise comparison up to the common truncation order.
  static bool approx_equal(const PuiseuxSeries& a, const PuiseuxSeries& b, double tol);

  // Compose with psi(t) = sum_j psi_j t^j (psi_0 = 0, psi_1 != 0) acting on
  // the base variable; valid for k = 1 bases of psi. Truncates to this order.
  PuiseuxSeries compose_base(const std::vector<double>& psi_jet) const;

  // Re-express in a base with ramification multiplied by m (pads exponents).
  PuiseuxSeries with_ramification(int new_k) const;
};

struct PuiseuxFitResult {
  PuiseuxSeries series;
  double residual = 0.0;   // max |fit - sample|
  double scale = 0.0;      // max |sample value|
  bool accepted = false;
};

// Least-squares fit of sum_j c_j t^(j/k) to samples (t, value); rejects when
// the residual exceeds tol_rel * scale. For even k all t must be >= 0; for
// odd k negative t uses the real root.
PuiseuxFitResult puiseux_fit(const std::vector<std::pair<double, double>>& samples,
                             int ramification, int order, double tol_rel = 1e-4);

// Fit with a logarithmic channel: value = A(t) * log|t| + B(t), both A and B
// truncated series in t^(1/k). Used for corner transit asymptotics.
struct LogFitResult {
  PuiseuxSeries log_part;   // A
  PuiseuxSeries regular;    // B
  double residual = 0.0;
  bool accepted = false;
};

LogFitResult puiseux_log_fit(const std::vector<std::pair<double, double>>& samples,
                             int ramification, int order, double tol_rel = 1e-3);

// Series reciprocal 1 / (c_0 + c_1 t + ...) truncated to the input order
// (requires c_0 != 0, ramification preserved).
PuiseuxSeries puiseux_reciprocal(const PuiseuxSeries& s);

}  // namespace isl
