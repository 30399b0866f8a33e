// Adaptive Dormand-Prince 5(4) integration in the plane, with 4th-order dense
// output and event crossing detection.
#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

namespace isl {

struct Vec2 {
  double x = 0.0, y = 0.0;
  Vec2() = default;
  Vec2(double xx, double yy) : x(xx), y(yy) {}
  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double norm() const;
  Vec2 normalized() const;
  Vec2 perp() const { return {-y, x}; }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

struct OdeError : std::runtime_error {
  Vec2 where;
  OdeError(const std::string& msg, Vec2 at) : std::runtime_error(msg), where(at) {}
};

using VectorField2 = std::function<Vec2(const Vec2&)>;

// Scalar event function g; a crossing is g changing sign in the requested
// direction (+1 rising, -1 falling, 0 any).
struct EventSpec {
  std::function<double(const Vec2&)> g;
  int direction = 0;
  // Crossings with |t| below this are ignored (lets trajectories leave the
  // section they start on).
  double min_time = 0.0;
};

struct OdeOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double initial_step = 1e-3;
  double max_step = 0.5;
  double min_step = 1e-14;
  std::size_t max_steps = 2000000;
};

struct EventHit {
  double time;
  Vec2 state;
};

class Dopri5 {
 public:
  explicit Dopri5(VectorField2 f, OdeOptions opts = {}) : f_(std::move(f)), opts_(opts) {}

  // Integrate from p0 over duration t (sign gives direction). Throws OdeError
  // on step underflow (stagnation near a singular point).
  Vec2 integrate(const Vec2& p0, double t) const;

  // Integrate until the event fires or |t| exceeds t_max. Returns nullopt on
  // timeout. The crossing is located on the dense output to ~1e-13 in time.
  std::optional<EventHit> integrate_until(const Vec2& p0, double t_max,
                                          const EventSpec& event) const;

  // Integrate for duration t, recording the trajectory at internal steps.
  std::vector<std::pair<double, Vec2>> sample(const Vec2& p0, double t) const;

 private:
  struct DenseSeg {
    double t0, h;
    Vec2 y0;
    Vec2 r1, r2, r3, r4, r5;  // dense-output coefficients
    Vec2 at(double theta) const;
  };

  bool step(Vec2& y, double& t, double& h, double direction, DenseSeg* dense) const;

  VectorField2 f_;
  OdeOptions opts_;
};

}  // namespace isl
