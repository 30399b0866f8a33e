#include "isl/puiseux.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace isl {

namespace {
double frac_power(double t, std::size_t j, int k) {
  if (j == 0) return 1.0;
  double e = static_cast<double>(j) / static_cast<double>(k);
  if (t >= 0.0) return std::pow(t, e);
  // negative base: defined only for odd ramification (real root)
  if (k % 2 == 0) throw NumericsError("negative base with even ramification");
  double root = -std::pow(-t, 1.0 / k);  // real k-th root of t
  return std::pow(root, static_cast<double>(j));
}
}  // namespace

double PuiseuxSeries::operator()(double t) const {
  double acc = 0.0;
  for (std::size_t j = coefficients.size(); j-- > 0;)
    acc += coefficients[j] * frac_power(t, j, ramification);
  return acc;
}

bool PuiseuxSeries::approx_equal(const PuiseuxSeries& a, const PuiseuxSeries& b, double tol) {
  int lcm_k = std::lcm(a.ramification, b.ramification);
  std::vector<double> ca = a.with_ramification(lcm_k).coefficients;
  std::vector<double> cb = b.with_ramification(lcm_k).coefficients;
  std::size_t n = std::min(ca.size(), cb.size());
  for (std::size_t j = 0; j < n; ++j)
    if (std::abs(ca[j] - cb[j]) > tol) return false;
  return true;
}

PuiseuxSeries PuiseuxSeries::with_ramification(int new_k) const {
  if (new_k % ramification != 0) throw NumericsError("incompatible ramification lift");
  int m = new_k / ramification;
  PuiseuxSeries out;
  out.base_variable = base_variable;
  out.ramification = new_k;
  out.branch_id = branch_id;
  if (coefficients.empty()) return out;
  out.coefficients.assign((coefficients.size() - 1) * m + 1, 0.0);
  for (std::size_t j = 0; j < coefficients.size(); ++j)
    out.coefficients[j * m] = coefficients[j];
  return out;
}

PuiseuxSeries PuiseuxSeries::compose_base(const std::vector<double>& psi_jet) const {
  // this(u) = sum c_j u^(j/k) with u = psi(t): write psi = psi_1 t (1 + r(t))
  // and expand u^(j/k) = psi_1^(j/k) t^(j/k) (1+r)^(j/k) binomially.
  if (psi_jet.size() < 2 || psi_jet[0] != 0.0 || psi_jet[1] == 0.0)
    throw NumericsError("compose_base needs psi(0) = 0, psi'(0) != 0");
  const int k = ramification;
  const int J = order();
  std::vector<double> r(J + 1, 0.0);
  for (std::size_t i = 2; i < psi_jet.size() && i <= static_cast<std::size_t>(J) + 1; ++i)
    r[i - 1] = psi_jet[i] / psi_jet[1];

  auto mul_trunc = [&](const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> out(J + 1, 0.0);
    for (std::size_t i = 0; i < a.size() && i <= static_cast<std::size_t>(J); ++i)
      for (std::size_t l = 0; l + i <= static_cast<std::size_t>(J) && l < b.size(); ++l)
        out[i + l] += a[i] * b[l];
    return out;
  };

  PuiseuxSeries out;
  out.base_variable = base_variable;
  out.ramification = k;
  out.branch_id = branch_id;
  out.coefficients.assign(J + 1, 0.0);
  if (psi_jet[1] < 0 && k % 2 == 0)
    throw NumericsError("compose_base: negative psi' with even ramification");

  for (int j = 0; j <= J; ++j) {
    if (coefficients[j] == 0.0) continue;
    if (j == 0) {
      out.coefficients[0] += coefficients[0];
      continue;
    }
    double e = static_cast<double>(j) / k;
    double lead = std::pow(std::abs(psi_jet[1]), e);
    if (psi_jet[1] < 0 && j % 2 != 0) lead = -lead;  // odd k only
    std::vector<double> acc(J + 1, 0.0);
    acc[0] = 1.0;
    std::vector<double> rpow(J + 1, 0.0);
    rpow[0] = 1.0;
    double binom = 1.0;
    for (int m = 1; m <= J; ++m) {
      binom *= (e - (m - 1)) / m;
      rpow = mul_trunc(rpow, r);
      for (int i = 0; i <= J; ++i) acc[i] += binom * rpow[i];
    }
    for (int i = 0; i <= J; ++i) {
      int idx = j + i * k;
      if (idx > J) break;
      out.coefficients[idx] += coefficients[j] * lead * acc[i];
    }
  }
  return out;
}

PuiseuxSeries puiseux_reciprocal(const PuiseuxSeries& s) {
  if (s.coefficients.empty() || s.coefficients[0] == 0.0)
    throw NumericsError("series reciprocal needs a nonzero constant term");
  const int J = s.order();
  PuiseuxSeries out;
  out.base_variable = s.base_variable;
  out.ramification = s.ramification;
  out.branch_id = s.branch_id;
  out.coefficients.assign(J + 1, 0.0);
  out.coefficients[0] = 1.0 / s.coefficients[0];
  for (int j = 1; j <= J; ++j) {
    double acc = 0.0;
    for (int i = 1; i <= j; ++i) acc += s.coefficients[i] * out.coefficients[j - i];
    out.coefficients[j] = -acc / s.coefficients[0];
  }
  return out;
}

PuiseuxFitResult puiseux_fit(const std::vector<std::pair<double, double>>& samples,
                             int ramification, int order, double tol_rel) {
  PuiseuxFitResult res;
  const std::size_t m = samples.size();
  const std::size_t n = static_cast<std::size_t>(order) + 1;
  if (m < 2 * n)
    throw NumericsError("puiseux_fit needs at least 2(J+1) samples");
  std::vector<double> A(m * n), b(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j)
      A[i * n + j] = frac_power(samples[i].first, j, ramification);
    b[i] = samples[i].second;
  }
  auto x = solve_least_squares(A, m, n, b);
  res.series.ramification = ramification;
  res.series.coefficients = x;
  double max_err = 0.0, scale = 0.0;
  for (const auto& [t, v] : samples) {
    max_err = std::max(max_err, std::abs(res.series(t) - v));
    scale = std::max(scale, std::abs(v));
  }
  res.residual = max_err;
  res.scale = std::max(scale, 1.0);
  res.accepted = max_err <= tol_rel * res.scale;
  return res;
}

LogFitResult puiseux_log_fit(const std::vector<std::pair<double, double>>& samples,
                             int ramification, int order, double tol_rel) {
  LogFitResult res;
  const std::size_t m = samples.size();
  const std::size_t nc = static_cast<std::size_t>(order) + 1;
  const std::size_t n = 2 * nc;
  if (m < n + nc) throw NumericsError("puiseux_log_fit needs more samples");
  std::vector<double> A(m * n), b(m);
  for (std::size_t i = 0; i < m; ++i) {
    double t = samples[i].first;
    double lg = std::log(std::abs(t));
    for (std::size_t j = 0; j < nc; ++j) {
      double p = frac_power(t, j, ramification);
      A[i * n + j] = p * lg;  // A(t) log|t|
      A[i * n + nc + j] = p;  // B(t)
    }
    b[i] = samples[i].second;
  }
  auto x = solve_least_squares(A, m, n, b);
  res.log_part.ramification = ramification;
  res.log_part.coefficients.assign(x.begin(), x.begin() + nc);
  res.regular.ramification = ramification;
  res.regular.coefficients.assign(x.begin() + nc, x.end());
  double max_err = 0.0, scale = 0.0;
  for (const auto& [t, v] : samples) {
    double fit = res.log_part(t) * std::log(std::abs(t)) + res.regular(t);
    max_err = std::max(max_err, std::abs(fit - v));
    scale = std::max(scale, std::abs(v));
  }
  res.residual = max_err;
  res.accepted = max_err <= tol_rel * std::max(scale, 1.0);
  return res;
}

}  // namespace isl
