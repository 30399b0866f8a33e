// Surfaces, integrable systems (X, F), manifest ingestion and validation.
#pragma once

#include <map>
#include <optional>
#include <string>

#include "isl/expr.hpp"
#include "isl/kernels.hpp"
#include "isl/ode.hpp"

namespace isl {

enum class SurfaceKind { PlaneWindow, FlatTorus, Strip };

// PlaneWindow: open rectangle. FlatTorus: [0,Lx) x [0,Ly) with both edges
// identified. Strip: x periodic with period `width`, y in [-height/2,
// height/2]; crossing the x-seam maps y to sign*y (sign=-1 gives a Mobius
// band, sign=+1 a cylinder).
struct SurfaceModel {
  SurfaceKind kind = SurfaceKind::PlaneWindow;
  double xmin = -1, xmax = 1, ymin = -1, ymax = 1;  // plane_window
  double period_x = 1, period_y = 1;                // flat_torus
  double width = 1, height = 1;                     // strip
  int strip_sign = 1;

  bool orientable() const { return !(kind == SurfaceKind::Strip && strip_sign < 0); }
  bool periodic_x() const { return kind != SurfaceKind::PlaneWindow; }
  bool periodic_y() const { return kind == SurfaceKind::FlatTorus; }

  double domain_xmin() const;
  double domain_xmax() const;
  double domain_ymin() const;
  double domain_ymax() const;

  // Canonical representative of a covering-space point.
  Vec2 wrap(const Vec2& p) const;
  // True if the canonical representatives coincide within tol.
  bool same_point(const Vec2& a, const Vec2& b, double tol) const;
  // Deck displacement a -> b: b = deck(a) + integer shifts; returns the
  // number of x-seam crossings (for twist parity) for the minimal shift.
  int seam_crossings(const Vec2& a, const Vec2& b) const;
  bool contains(const Vec2& p, double margin = 0.0) const;
};

struct SchemaError : std::runtime_error {
  explicit SchemaError(const std::string& msg) : std::runtime_error(msg) {}
};

struct Tolerances {
  double integrability = 1e-9;    // |X(F)| <= this * (1 + |grad F||X|)
  double zero_fraction = 0.01;    // X or dF may vanish on at most this fraction
  int validation_grid = 64;
  double newton = 1e-12;
  double dedupe_distance = 1e-6;
  double curve_step = 1e-2;
  double corrector = 1e-10;
  double zero_locate = 1e-12;
  double simple_zero_min_slope = 1e-8;
  double resonance = 1e-6;
  int resonance_max_den = 12;
  double fit_residual = 1e-4;
  int series_order = 8;
};

// The object (X, F): a surface, a vector field, a first integral.
class SystemSpec {
 public:
  SystemSpec(SurfaceModel surface, Expr dx, Expr dy, Expr first_integral, ParamMap params,
             std::string label);

  const SurfaceModel& surface() const { return surface_; }
  const std::string& label() const { return label_; }
  const ParamMap& params() const { return params_; }
  const Expr& dx_expr() const { return dx_; }
  const Expr& dy_expr() const { return dy_; }
  const Expr& integral_expr() const { return f_; }

  Vec2 field(const Vec2& p) const;
  double integral(const Vec2& p) const;
  Vec2 integral_gradient(const Vec2& p) const;
  // Jacobian of X: [[dXx/dx, dXx/dy], [dXy/dx, dXy/dy]].
  void jacobian(const Vec2& p, double j[4]) const;
  // Second directional derivative of X along unit v.
  Vec2 second_derivative(const Vec2& p, const Vec2& v) const;
  double integral_hessian_quad(const Vec2& p, const Vec2& v) const;

  VectorField2 field_fn() const;

 private:
  SurfaceModel surface_;
  Expr dx_, dy_, f_;
  // exact symbolic first and second derivatives, parameter-bound
  Expr fx_, fy_;
  Expr jxx_, jxy_, jyx_, jyy_;
  Expr hxx_[3], hxy_[3], hyy_[3];  // second derivatives of Xx, Xy, F
  ParamMap params_;
  std::string label_;
};

struct ValidationReport {
  double max_integrability_defect = 0.0;  // max |X(F)| / (1 + |grad F||X|)
  double fraction_field_zero = 0.0;
  double fraction_df_zero = 0.0;
  bool integrability_ok = false;
  bool field_nonzero_ok = false;
  bool df_nonzero_ok = false;
  bool pass() const { return integrability_ok && field_nonzero_ok && df_nonzero_ok; }
};

SystemSpec load_manifest(const std::string& path);
SystemSpec load_manifest_text(const std::string& json_text);
std::string save_manifest(const SystemSpec& spec);

ValidationReport validate(const SystemSpec& spec, const Tolerances& tol = {},
                          ExecMode mode = default_exec_mode());

}  // namespace isl
