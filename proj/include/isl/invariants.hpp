// Semi-local continuous invariants: monodromy functions along edge families,
// period cocycles at Type III level sets with coboundary normalization, and
// the regularized/truncated monodromy at generic nilpotent level sets.
#pragma once

#include <optional>
#include <vector>

#include "isl/puiseux.hpp"
#include "isl/reeb.hpp"

namespace isl {

struct InvariantError : std::runtime_error {
  explicit InvariantError(const std::string& m) : std::runtime_error(m) {}
};

struct MonodromyRecord {
  int edge_id = -1;
  int orientation = +1;
  std::vector<std::pair<double, double>> samples;  // (level, mu)
  PuiseuxSeries fit;                               // polynomial in the level value
  bool fitted = false;
};

// Monodromy of the circle at a single level: principal-value transit time
// once around, jumping over the simple zeros of the reduced flow.
double monodromy_of_curve(const SystemSpec& spec, const LevelCurve& curve,
                          int orientation = +1, const Tolerances& tol = {});

// Same number computed through the reflection construction in the
// linearizing coordinates (window_scale shrinks every isolating window).
double monodromy_by_jumps(const SystemSpec& spec, const LevelCurve& curve,
                          double window_scale = 1.0, int orientation = +1,
                          const Tolerances& tol = {});

MonodromyRecord monodromy_function(const SystemSpec& spec, const ReebGraph& graph, int edge_id,
                                   int orientation = +1, int levels = 10,
                                   const Tolerances& tol = {});

// Period cocycle of a Type III vertex: per-separatrix-edge transit times
// between sections near the two endpoints, as Puiseux series in the level.
struct CocyclePointData {
  int a = 1, b = 1;
  int k = 1;                              // F ~ (x^a y^b)^k at this point
  std::vector<std::pair<int, int>> u_ends;  // (edge index, end 0|1) on the unstable pair
  std::vector<std::pair<int, int>> s_ends;  // on the stable pair
};

struct PeriodCocycle {
  int vertex_id = -1;
  std::vector<PuiseuxSeries> components;       // one per graph edge of the vertex
  std::vector<int> ramifications;              // m_E per edge
  std::vector<CocyclePointData> points;        // per Type III point of the level set
  double section_offset = 1.0;                 // arc distance of A_E, B_E from the endpoints
};

PeriodCocycle period_cocycle(const SystemSpec& spec, const ReebGraph& graph, int vertex_id,
                             double section_offset = 1.0, int levels = 14,
                             const Tolerances& tol = {});

// Canonical representative modulo the coboundary space generated by the
// per-point u/s series (deterministic pivot elimination). Entries align with
// cocycle.components.
std::vector<PuiseuxSeries> normalize_cocycle(const PeriodCocycle& cocycle, int order = -1);

// Applies a coboundary (one series per point and pair) to a cocycle; used by
// exactness tests.
PeriodCocycle apply_coboundary(const PeriodCocycle& base,
                               const std::vector<std::pair<PuiseuxSeries, PuiseuxSeries>>&
                                   per_point_series);

// Regularized time across a Type IV point between two transversal sections.
struct RegularizedTime {
  std::vector<std::pair<double, double>> raw;          // (y, T) measured
  std::vector<std::pair<double, double>> regularized;  // (y, T_hat)
  PuiseuxSeries smooth_fit;                            // polynomial in y
  double at_zero = 0.0;
  double slope = 0.0;
  int integral_sign = +1;  // y = integral_sign * (F - F(p))
};

RegularizedTime regularized_time(const SystemSpec& spec, const SingularPointRecord& rec,
                                 double section_distance = 1.0, double y_max = 0.3,
                                 int levels = 16, const Tolerances& tol = {},
                                 const std::vector<double>* explicit_y = nullptr);

// Evaluate Re(2 pi i / lambda(q1)) from the fitted eigenvalue branches,
// continued to y < 0.
double singular_time_part(const NilpotentData& nil, double y);

struct RegularizedMonodromy {
  RegularizedTime transit;
  std::vector<std::pair<double, double>> monodromy;  // (y, M_hat)
  std::vector<std::pair<double, double>> truncated;  // y >= 0 part
  PuiseuxSeries smooth_fit;
  std::vector<double> taylor_at_zero;  // reported for twisted neighborhoods
  int orientation = +1;
};

RegularizedMonodromy regularized_monodromy(const SystemSpec& spec, const ReebGraph& graph,
                                           int vertex_id, double section_distance = 0.25,
                                           double y_max = 0.25, int levels = 12,
                                           int orientation = +1, const Tolerances& tol = {});

}  // namespace isl
