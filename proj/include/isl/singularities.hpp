// Locating and classifying singular points of X (types I-IV), extracting the
// local continuous invariants: period functions, eigenvalue functions along
// singular curves, resonances with frequency series, nilpotent eigenvalue
// branches.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "isl/flow.hpp"
#include "isl/geometry.hpp"
#include "isl/puiseux.hpp"

namespace isl {

enum class SingularityType { I, II, III, IV, Degenerate };

const char* to_string(SingularityType t);

struct SingularPointRecord {
  Vec2 location;
  double jacobian[4] = {0, 0, 0, 0};
  double eig_re[2] = {0, 0};
  double eig_im[2] = {0, 0};
  SingularityType type = SingularityType::Degenerate;
  std::string degenerate_reason;
  double integral_value = 0.0;
  bool on_curve = false;  // lies on a 1-dimensional zero set
};

struct SingularCurveRecord {
  std::vector<Vec2> points;
  bool closed = false;
  std::vector<int> special_point_indices;  // indices into Classification::points (Type IV etc.)
};

struct Classification {
  std::vector<SingularPointRecord> points;  // isolated points and special curve points
  std::vector<SingularCurveRecord> curves;  // Type II / IV curves
  bool any_degenerate() const {
    for (const auto& r : points)
      if (r.type == SingularityType::Degenerate) return true;
    return false;
  }
};

struct ClassifyError : std::runtime_error {
  explicit ClassifyError(const std::string& m) : std::runtime_error(m) {}
};

SingularPointRecord classify(const SystemSpec& spec, Vec2 p, const Tolerances& tol = {});

Classification find_singularities(const SystemSpec& spec, const Tolerances& tol = {},
                                  ExecMode mode = default_exec_mode());

// Type I: period of closed orbits as a function of the integral offset.
struct PeriodData {
  std::vector<std::pair<double, double>> samples;  // (F - F(p), period)
  PuiseuxSeries fit;                               // polynomial in F - F(p)
  double limit_period = 0.0;                       // extrapolation to the point
  double beta = 0.0;                               // |Im eigenvalue| at p
};

PeriodData period_function(const SystemSpec& spec, const SingularPointRecord& rec,
                           const Tolerances& tol = {});

// Type II: nonzero eigenvalue along the singular curve, as a function of F.
struct EigenvalueCurveData {
  std::vector<std::pair<double, double>> samples;  // (F(q), gamma(q))
  bool on_double_cover = false;                    // twisted case
};

EigenvalueCurveData eigenvalue_function(const SystemSpec& spec, const SingularCurveRecord& curve,
                                        const Tolerances& tol = {});

// Type III: resonance (a, b), frequency value and series.
struct ResonanceData {
  int a = 1, b = 1;  // coprime; model eigenvalues h0/a and -h0/b
  double h0 = 0.0;
  double trace = 0.0;
  double lambda1 = 0.0, lambda2 = 0.0;  // lambda1 > 0 > lambda2
  int ramification = 1;                 // k with F ~ (x^a y^b)^k
  PuiseuxSeries frequency;              // h as a series in t = |F - F(p)|^(1/k)
  double fit_residual = 0.0;
  bool frequency_fitted = false;
};

ResonanceData resonance_and_frequency(const SystemSpec& spec, const SingularPointRecord& rec,
                                      const Tolerances& tol = {}, bool fit_series = true);

// Type IV: eigenvalue function along the Morse-parametrized singular curve
// and its double-valued branches over the base.
struct NilpotentData {
  std::vector<std::pair<double, double>> eigenvalue_samples;  // (x, E(x))
  PuiseuxSeries eigencurve;                                   // E as polynomial in x
  PuiseuxSeries branch_plus, branch_minus;                    // E(+-sqrt y), ramification 2
  int integral_sign = +1;  // tau with tau*(F - F(p)) >= 0 along the curve
  double fit_residual = 0.0;
};

NilpotentData nilpotent_invariants(const SystemSpec& spec, const SingularPointRecord& rec,
                                   const Tolerances& tol = {});

// Short arc of the zero set of X through a point where DX has rank <= 1.
std::vector<Vec2> trace_singular_curve(const SystemSpec& spec, Vec2 p0, double max_arc,
                                       double step, bool* closed = nullptr);

}  // namespace isl
