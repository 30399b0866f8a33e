#include "isl/ode.hpp"

#include <algorithm>
#include <cmath>

#include "isl/numerics.hpp"

namespace isl {

double Vec2::norm() const { return std::hypot(x, y); }

Vec2 Vec2::normalized() const {
  double n = norm();
  if (n == 0.0) return {0.0, 0.0};
  return {x / n, y / n};
}

namespace {

// Dormand-Prince coefficients.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
// Dense output (Hairer-Norsett-Wanner DOPRI5 interpolant).
constexpr double d1 = -12715105075.0 / 11282082432.0;
constexpr double d3 = 87487479700.0 / 32700410799.0;
constexpr double d4 = -10690763975.0 / 1880347072.0;
constexpr double d5 = 701980252875.0 / 199316789632.0;
constexpr double d6 = -1453857185.0 / 822651844.0;
constexpr double d7 = 69997945.0 / 29380423.0;

}  // namespace

Vec2 Dopri5::DenseSeg::at(double theta) const {
  double th1 = 1.0 - theta;
  return y0 + theta * (r1 + th1 * (r2 + theta * (r3 + th1 * (r4 + theta * r5))));
}

bool Dopri5::step(Vec2& y, double& t, double& h, double direction, DenseSeg* dense) const {
  const double hd = h * direction;
  Vec2 k1 = f_(y);
  Vec2 k2 = f_(y + hd * a21 * k1);
  Vec2 k3 = f_(y + hd * (a31 * k1 + a32 * k2));
  Vec2 k4 = f_(y + hd * (a41 * k1 + a42 * k2 + a43 * k3));
  Vec2 k5 = f_(y + hd * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
  Vec2 k6 = f_(y + hd * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
  Vec2 ynew = y + hd * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
  Vec2 k7 = f_(ynew);
  Vec2 err = hd * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

  double sk_x = opts_.abs_tol + opts_.rel_tol * std::max(std::abs(y.x), std::abs(ynew.x));
  double sk_y = opts_.abs_tol + opts_.rel_tol * std::max(std::abs(y.y), std::abs(ynew.y));
  double err_norm = std::sqrt(0.5 * ((err.x / sk_x) * (err.x / sk_x) +
                                     (err.y / sk_y) * (err.y / sk_y)));

  double factor = (err_norm == 0.0)
                      ? 5.0
                      : std::clamp(0.9 * std::pow(err_norm, -0.2), 0.2, 5.0);
  if (err_norm <= 1.0) {
    if (dense) {
      dense->t0 = t;
      dense->h = hd;
      dense->y0 = y;
      dense->r1 = ynew - y;
      dense->r2 = hd * k1 - dense->r1;
      dense->r3 = dense->r1 - hd * k7 - dense->r2;
      dense->r4 = hd * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
      dense->r5 = {0.0, 0.0};
    }
    t += hd;
    y = ynew;
    h = std::min(h * factor, opts_.max_step);
    return true;
  }
  h *= factor;
  return false;
}

Vec2 Dopri5::integrate(const Vec2& p0, double t) const {
  if (t == 0.0) return p0;
  const double direction = t > 0 ? 1.0 : -1.0;
  const double t_end = std::abs(t);
  Vec2 y = p0;
  double tau = 0.0;  // signed internal time
  double h = std::min(opts_.initial_step, t_end);
  for (std::size_t n = 0; n < opts_.max_steps; ++n) {
    double elapsed = std::abs(tau);
    if (elapsed >= t_end) return y;
    h = std::min(h, t_end - elapsed);
    if (h < opts_.min_step)
      throw OdeError("step underflow near a singular point", y);
    step(y, tau, h, direction, nullptr);
    if (std::abs(tau) >= t_end * (1.0 - 1e-15)) return y;
  }
  throw OdeError("max step count exceeded", y);
}

std::optional<EventHit> Dopri5::integrate_until(const Vec2& p0, double t_max,
                                                const EventSpec& event) const {
  const double direction = t_max > 0 ? 1.0 : -1.0;
  const double t_end = std::abs(t_max);
  Vec2 y = p0;
  double tau = 0.0;  // signed internal time
  double h = opts_.initial_step;
  double g_prev = event.g(p0);
  DenseSeg seg;
  for (std::size_t n = 0; n < opts_.max_steps; ++n) {
    double elapsed = std::abs(tau);
    if (elapsed >= t_end) return std::nullopt;
    h = std::min(h, t_end - elapsed);
    if (h < opts_.min_step) throw OdeError("step underflow near a singular point", y);
    double t_before = tau;
    if (!step(y, tau, h, direction, &seg)) continue;
    double g_now = event.g(y);
    bool crossed = (g_prev < 0 && g_now >= 0) || (g_prev > 0 && g_now <= 0);
    if (crossed) {
      bool dir_ok = event.direction == 0 || (event.direction > 0 && g_prev < g_now) ||
                    (event.direction < 0 && g_prev > g_now);
      if (dir_ok) {
        auto gd = [&](double theta) { return event.g(seg.at(theta)); };
        double theta = find_root(gd, 0.0, 1.0, 1e-15);
        double t_hit = t_before + theta * (tau - t_before);  // signed
        if (std::abs(t_hit) >= event.min_time) return EventHit{t_hit, seg.at(theta)};
      }
    }
    g_prev = g_now;
  }
  throw OdeError("max step count exceeded in event search", y);
}

std::vector<std::pair<double, Vec2>> Dopri5::sample(const Vec2& p0, double t) const {
  std::vector<std::pair<double, Vec2>> out;
  const double direction = t > 0 ? 1.0 : -1.0;
  const double t_end = std::abs(t);
  Vec2 y = p0;
  double tau = 0.0;
  double h = std::min(opts_.initial_step, t_end);
  out.emplace_back(0.0, y);
  for (std::size_t n = 0; n < opts_.max_steps && std::abs(tau) < t_end; ++n) {
    h = std::min(h, t_end - std::abs(tau));
    if (h < opts_.min_step) throw OdeError("step underflow near a singular point", y);
    if (step(y, tau, h, direction, nullptr)) out.emplace_back(tau, y);
  }
  return out;
}

}  // namespace isl
