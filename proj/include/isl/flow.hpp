// Numerical flow of X: adaptive integration with events, level-curve tracing
// by predictor-corrector continuation on grad F, reduction to 1D flows along
// level curves, linearizing coordinates at simple zeros, and compensated
// (principal-value) time quadrature across those zeros.
#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "isl/geometry.hpp"
#include "isl/numerics.hpp"
#include "isl/ode.hpp"

namespace isl {

struct FlowError : std::runtime_error {
  explicit FlowError(const std::string& msg) : std::runtime_error(msg) {}
};

struct SingularHit {
  double s = 0.0;   // arclength along the curve
  Vec2 location;    // wrapped surface coordinates
};

// A traced connected piece of a level set, parametrized by arclength. Points
// are stored in covering-space coordinates (no wrapping mid-curve), so closed
// curves on periodic surfaces end at start + deck shift.
class LevelCurve {
 public:
  double level = 0.0;
  std::vector<Vec2> points;
  std::vector<double> arclength;
  bool closed = false;
  bool hits_boundary = false;
  bool starts_at_critical = false;
  bool ends_at_critical = false;
  Vec2 start_critical, end_critical;  // snap targets when flagged
  int deck_wraps = 0;
  bool twisted = false;
  int orientation_sign = +1;
  std::vector<SingularHit> singular_hits;

  double length() const { return arclength.empty() ? 0.0 : arclength.back(); }
  Vec2 at(double s) const;        // cover coordinates; closed curves wrap in s
  Vec2 tangent(double s) const;   // unit tangent
  Vec2 velocity(double s) const;  // d(gamma)/ds of the chord parametrization
  Vec2 curvature_vector(double s) const;
  void finalize();                // build splines; call after points are set

 private:
  double wrap_s(double s) const;
  CubicSpline sx_, sy_;
  Vec2 deck_shift_;  // end - start when closed
};

struct TraceResult {
  std::vector<LevelCurve> curves;  // one for regular levels
};

// Traces the connected component of {F = F(seed)} through seed. The seed must
// be a regular point of F. If the curve runs into a point where dF = 0 (a
// Type I/III vertex of the fibration) the trace stops there and flags it.
LevelCurve trace_level_curve(const SystemSpec& spec, Vec2 seed, const Tolerances& tol = {});

// Embedded graph of a singular level set: vertices are the given critical
// points of F (Type III saddles of the fibration), edges are separatrix
// branches traced from their eigen-directions.
struct LevelGraphEdge {
  LevelCurve curve;
  int from_vertex = -1;  // -1: open end (boundary)
  int to_vertex = -1;
};

struct LevelSetGraph {
  double level = 0.0;
  std::vector<Vec2> vertices;
  std::vector<LevelGraphEdge> edges;
};

LevelSetGraph trace_level_graph(const SystemSpec& spec, const std::vector<Vec2>& critical_points,
                                double level, const Tolerances& tol = {});

// Reduced 1D flow ds/dt = V(s) along a level curve. V = X . unit tangent.
class ReducedFlow {
 public:
  struct Zero {
    double s;
    double lambda;  // V'(s*), the 1D eigenvalue
    Vec2 location;
    bool simple;
    double jacobian_eigenvalue;  // tr J at the hit singular point (cross-check)
  };

  ReducedFlow(const SystemSpec& spec, const LevelCurve& curve, const Tolerances& tol = {});

  double V(double s) const;
  double dVds(double s) const;
  double d2Vds2(double s) const;
  const std::vector<Zero>& zeros() const { return zeros_; }
  const LevelCurve& curve() const { return *curve_; }
  bool closed() const { return curve_->closed; }
  double length() const { return curve_->length(); }

 private:
  void locate_zeros(const Tolerances& tol);
  const SystemSpec* spec_;
  const LevelCurve* curve_;
  std::vector<Zero> zeros_;
};

// Linearizing coordinate xi at a simple zero: xi' = lambda*xi, unique up to
// scale. jump realizes the reflection xi -> -xi on the isolating window.
class LinearizingCoordinate {
 public:
  LinearizingCoordinate(const ReducedFlow& rf, std::size_t zero_index,
                        double window_scale = 1.0);

  double xi(double s) const;
  double inverse(double xi_value) const;
  double jump(double s) const;  // inverse(-xi(s))
  double window() const { return window_; }
  double zero_location() const { return s_star_; }

 private:
  const ReducedFlow* rf_;
  double s_star_, lambda_, window_;
};

// Principal-value time integral of ds/V over [s_a, s_b] with pole subtraction
// at every simple zero strictly inside. Returns the finite part plus the
// per-zero singular coefficients 1/lambda.
struct CompensatedTime {
  double finite = 0.0;
  std::vector<std::pair<std::size_t, double>> coefficients;  // (zero index, 1/lambda)
};

CompensatedTime compensated_time(const ReducedFlow& rf, double s_a, double s_b,
                                 const Tolerances& tol = {});

// Flow map of X with domain exit detection.
Vec2 integrate(const SystemSpec& spec, Vec2 p0, double t, const OdeOptions& opts = {});

// Time (and point) of the next crossing of the section {n . (p - base) = 0}.
std::optional<EventHit> section_crossing(const SystemSpec& spec, Vec2 p0, Vec2 base, Vec2 normal,
                                         double t_max, double min_time = 0.0,
                                         int direction = 0, const OdeOptions& opts = {});

// Period of the closed orbit through p0 (first return to the transversal
// through p0 normal to the flow, same crossing direction).
std::optional<double> orbit_period(const SystemSpec& spec, Vec2 p0, double t_max,
                                   const OdeOptions& opts = {});

// CSV export: s, x, y, V per sample row.
std::string level_curve_csv(const ReducedFlow& rf, std::size_t samples = 400);
// SVG polyline export of the curve.
std::string level_curve_svg(const LevelCurve& curve, std::size_t samples = 400);

}  // namespace isl
