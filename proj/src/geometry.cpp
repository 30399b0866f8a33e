#include "isl/geometry.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace isl {

using nlohmann::ordered_json;

double SurfaceModel::domain_xmin() const {
  switch (kind) {
    case SurfaceKind::PlaneWindow: return xmin;
    case SurfaceKind::FlatTorus: return 0.0;
    case SurfaceKind::Strip: return 0.0;
  }
  return 0.0;
}

double SurfaceModel::domain_xmax() const {
  switch (kind) {
    case SurfaceKind::PlaneWindow: return xmax;
    case SurfaceKind::FlatTorus: return period_x;
    case SurfaceKind::Strip: return width;
  }
  return 0.0;
}

double SurfaceModel::domain_ymin() const {
  switch (kind) {
    case SurfaceKind::PlaneWindow: return ymin;
    case SurfaceKind::FlatTorus: return 0.0;
    case SurfaceKind::Strip: return -0.5 * height;
  }
  return 0.0;
}

double SurfaceModel::domain_ymax() const {
  switch (kind) {
    case SurfaceKind::PlaneWindow: return ymax;
    case SurfaceKind::FlatTorus: return period_y;
    case SurfaceKind::Strip: return 0.5 * height;
  }
  return 0.0;
}

Vec2 SurfaceModel::wrap(const Vec2& p) const {
  switch (kind) {
    case SurfaceKind::PlaneWindow: return p;
    case SurfaceKind::FlatTorus: {
      double x = std::fmod(p.x, period_x);
      if (x < 0) x += period_x;
      double y = std::fmod(p.y, period_y);
      if (y < 0) y += period_y;
      return {x, y};
    }
    case SurfaceKind::Strip: {
      double n = std::floor(p.x / width);
      double x = p.x - n * width;
      double y = p.y;
      if (strip_sign < 0 && (static_cast<long long>(n) % 2 != 0)) y = -y;
      return {x, y};
    }
  }
  return p;
}

bool SurfaceModel::same_point(const Vec2& a, const Vec2& b, double tol) const {
  Vec2 wa = wrap(a), wb = wrap(b);
  double dx = std::abs(wa.x - wb.x);
  double dy = std::abs(wa.y - wb.y);
  if (periodic_x()) {
    double L = domain_xmax() - domain_xmin();
    dx = std::min(dx, L - dx);
    // points straddling the seam: compare the flipped representative too
    if (kind == SurfaceKind::Strip && strip_sign < 0 && std::abs(wa.x - wb.x) > 0.5 * L)
      dy = std::abs(wa.y + wb.y);
  }
  if (periodic_y()) {
    double L = domain_ymax() - domain_ymin();
    dy = std::min(dy, L - dy);
  }
  return dx <= tol && dy <= tol;
}

int SurfaceModel::seam_crossings(const Vec2& a, const Vec2& b) const {
  if (!periodic_x()) return 0;
  double L = domain_xmax() - domain_xmin();
  return static_cast<int>(std::llround((b.x - a.x) / L));
}

bool SurfaceModel::contains(const Vec2& p, double margin) const {
  Vec2 w = wrap(p);
  if (kind == SurfaceKind::PlaneWindow)
    return w.x >= xmin + margin && w.x <= xmax - margin && w.y >= ymin + margin &&
           w.y <= ymax - margin;
  if (kind == SurfaceKind::Strip)
    return w.y >= domain_ymin() + margin && w.y <= domain_ymax() - margin;
  return true;  // torus
}

// ---------------------------------------------------------------------------

SystemSpec::SystemSpec(SurfaceModel surface, Expr dx, Expr dy, Expr first_integral,
                       ParamMap params, std::string label)
    : surface_(surface), params_(std::move(params)), label_(std::move(label)) {
  params_.emplace("pi", M_PI);
  dx_ = bind_params(dx, params_);
  dy_ = bind_params(dy, params_);
  f_ = bind_params(first_integral, params_);
  for (const Expr* e : {&dx_, &dy_, &f_}) {
    auto frees = free_params(*e);
    if (!frees.empty()) throw SchemaError("unbound parameter '" + frees.front() + "'");
  }
  fx_ = differentiate(f_, 0);
  fy_ = differentiate(f_, 1);
  jxx_ = differentiate(dx_, 0);
  jxy_ = differentiate(dx_, 1);
  jyx_ = differentiate(dy_, 0);
  jyy_ = differentiate(dy_, 1);
  // second derivatives: [d2/dx2, d2/dxdy, d2/dy2]
  hxx_[0] = differentiate(jxx_, 0);
  hxx_[1] = differentiate(jxx_, 1);
  hxx_[2] = differentiate(jxy_, 1);
  hxy_[0] = differentiate(jyx_, 0);
  hxy_[1] = differentiate(jyx_, 1);
  hxy_[2] = differentiate(jyy_, 1);
  hyy_[0] = differentiate(fx_, 0);
  hyy_[1] = differentiate(fx_, 1);
  hyy_[2] = differentiate(fy_, 1);
}

namespace {
// Mobius deck transformations flip the y-axis; vectors and derivatives taken
// in covering-space coordinates must transform along.
double deck_flip(const SurfaceModel& m, const Vec2& p) {
  if (m.kind != SurfaceKind::Strip || m.strip_sign > 0) return 1.0;
  double n = std::floor(p.x / m.width);
  return (static_cast<long long>(n) % 2 != 0) ? -1.0 : 1.0;
}
}  // namespace

Vec2 SystemSpec::field(const Vec2& p) const {
  Vec2 w = surface_.wrap(p);
  double flip = deck_flip(surface_, p);
  return {eval(dx_, w.x, w.y, params_), flip * eval(dy_, w.x, w.y, params_)};
}

double SystemSpec::integral(const Vec2& p) const {
  Vec2 w = surface_.wrap(p);
  return eval(f_, w.x, w.y, params_);
}

Vec2 SystemSpec::integral_gradient(const Vec2& p) const {
  Vec2 w = surface_.wrap(p);
  double flip = deck_flip(surface_, p);
  return {eval(fx_, w.x, w.y, params_), flip * eval(fy_, w.x, w.y, params_)};
}

void SystemSpec::jacobian(const Vec2& p, double j[4]) const {
  Vec2 w = surface_.wrap(p);
  double flip = deck_flip(surface_, p);
  j[0] = eval(jxx_, w.x, w.y, params_);
  j[1] = flip * eval(jxy_, w.x, w.y, params_);
  j[2] = flip * eval(jyx_, w.x, w.y, params_);
  j[3] = eval(jyy_, w.x, w.y, params_);
}

Vec2 SystemSpec::second_derivative(const Vec2& p, const Vec2& v) const {
  Vec2 w = surface_.wrap(p);
  double flip = deck_flip(surface_, p);
  Vec2 vb{v.x, flip * v.y};  // pull the direction back to the base chart
  double qx = vb.x * vb.x * eval(hxx_[0], w.x, w.y, params_) +
              2 * vb.x * vb.y * eval(hxx_[1], w.x, w.y, params_) +
              vb.y * vb.y * eval(hxx_[2], w.x, w.y, params_);
  double qy = vb.x * vb.x * eval(hxy_[0], w.x, w.y, params_) +
              2 * vb.x * vb.y * eval(hxy_[1], w.x, w.y, params_) +
              vb.y * vb.y * eval(hxy_[2], w.x, w.y, params_);
  return {qx, flip * qy};
}

double SystemSpec::integral_hessian_quad(const Vec2& p, const Vec2& v) const {
  Vec2 w = surface_.wrap(p);
  double flip = deck_flip(surface_, p);
  Vec2 vb{v.x, flip * v.y};
  return vb.x * vb.x * eval(hyy_[0], w.x, w.y, params_) +
         2 * vb.x * vb.y * eval(hyy_[1], w.x, w.y, params_) +
         vb.y * vb.y * eval(hyy_[2], w.x, w.y, params_);
}

VectorField2 SystemSpec::field_fn() const {
  return [this](const Vec2& p) { return field(p); };
}

// ---------------------------------------------------------------------------
// Manifest I/O.
// ---------------------------------------------------------------------------

namespace {

void reject_unknown(const ordered_json& obj, std::initializer_list<const char*> allowed,
                    const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* name : allowed)
      if (it.key() == name) ok = true;
    if (!ok) throw SchemaError("unknown field '" + it.key() + "' in " + where);
  }
}

const ordered_json& require(const ordered_json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError("missing field '" + std::string(key) + "' in " + where);
  return *it;
}

SurfaceModel parse_surface(const ordered_json& s) {
  SurfaceModel m;
  std::string kind = require(s, "kind", "surface").get<std::string>();
  if (kind == "plane_window") {
    reject_unknown(s, {"kind", "bounds"}, "surface");
    auto b = require(s, "bounds", "surface");
    if (!b.is_array() || b.size() != 4)
      throw SchemaError("surface.bounds must be [xmin, xmax, ymin, ymax]");
    m.kind = SurfaceKind::PlaneWindow;
    m.xmin = b[0].get<double>();
    m.xmax = b[1].get<double>();
    m.ymin = b[2].get<double>();
    m.ymax = b[3].get<double>();
    if (!(m.xmin < m.xmax && m.ymin < m.ymax))
      throw SchemaError("surface.bounds must describe a nonempty rectangle");
  } else if (kind == "flat_torus") {
    reject_unknown(s, {"kind", "periods"}, "surface");
    auto p = require(s, "periods", "surface");
    if (!p.is_array() || p.size() != 2) throw SchemaError("surface.periods must be [Lx, Ly]");
    m.kind = SurfaceKind::FlatTorus;
    m.period_x = p[0].get<double>();
    m.period_y = p[1].get<double>();
    if (!(m.period_x > 0 && m.period_y > 0)) throw SchemaError("torus periods must be > 0");
  } else if (kind == "strip") {
    reject_unknown(s, {"kind", "width", "height", "sign"}, "surface");
    m.kind = SurfaceKind::Strip;
    m.width = require(s, "width", "surface").get<double>();
    m.height = require(s, "height", "surface").get<double>();
    m.strip_sign = require(s, "sign", "surface").get<int>();
    if (!(m.width > 0 && m.height > 0)) throw SchemaError("strip width/height must be > 0");
    if (m.strip_sign != 1 && m.strip_sign != -1)
      throw SchemaError("strip sign must be +1 or -1");
  } else {
    throw SchemaError("unknown surface kind '" + kind + "'");
  }
  return m;
}

Expr parse_expr_field(const ordered_json& j, const std::string& where) {
  if (!j.is_string()) throw SchemaError(where + " must be an expression string");
  try {
    return parse(j.get<std::string>());
  } catch (const ParseError& e) {
    throw SchemaError(where + ": parse error at offset " + std::to_string(e.offset) + ": " +
                      e.what());
  }
}

}  // namespace

SystemSpec load_manifest_text(const std::string& json_text) {
  ordered_json j;
  try {
    j = ordered_json::parse(json_text);
  } catch (const std::exception& e) {
    throw SchemaError(std::string("manifest is not valid JSON: ") + e.what());
  }
  reject_unknown(j, {"label", "surface", "vector_field", "first_integral", "params"},
                 "manifest");
  std::string label = require(j, "label", "manifest").get<std::string>();
  SurfaceModel surface = parse_surface(require(j, "surface", "manifest"));
  const auto& vf = require(j, "vector_field", "manifest");
  reject_unknown(vf, {"dx", "dy"}, "vector_field");
  Expr dx = parse_expr_field(require(vf, "dx", "vector_field"), "vector_field.dx");
  Expr dy = parse_expr_field(require(vf, "dy", "vector_field"), "vector_field.dy");
  Expr f = parse_expr_field(require(j, "first_integral", "manifest"), "first_integral");
  ParamMap params;
  if (j.contains("params")) {
    const auto& p = j.at("params");
    if (!p.is_object()) throw SchemaError("params must be an object of numbers");
    for (auto it = p.begin(); it != p.end(); ++it) {
      if (!it.value().is_number()) throw SchemaError("params." + it.key() + " must be a number");
      params[it.key()] = it.value().get<double>();
    }
  }
  return SystemSpec(surface, dx, dy, f, std::move(params), label);
}

SystemSpec load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open manifest '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return load_manifest_text(ss.str());
}

std::string save_manifest(const SystemSpec& spec) {
  ordered_json j;
  j["label"] = spec.label();
  ordered_json s;
  const SurfaceModel& m = spec.surface();
  switch (m.kind) {
    case SurfaceKind::PlaneWindow:
      s["kind"] = "plane_window";
      s["bounds"] = {m.xmin, m.xmax, m.ymin, m.ymax};
      break;
    case SurfaceKind::FlatTorus:
      s["kind"] = "flat_torus";
      s["periods"] = {m.period_x, m.period_y};
      break;
    case SurfaceKind::Strip:
      s["kind"] = "strip";
      s["width"] = m.width;
      s["height"] = m.height;
      s["sign"] = m.strip_sign;
      break;
  }
  j["surface"] = s;
  j["vector_field"] = {{"dx", print(spec.dx_expr())}, {"dy", print(spec.dy_expr())}};
  j["first_integral"] = print(spec.integral_expr());
  ordered_json p = ordered_json::object();
  for (const auto& [k, v] : spec.params())
    if (k != "pi") p[k] = v;
  j["params"] = p;
  return j.dump(2);
}

// ---------------------------------------------------------------------------
// Validation grid scan.
// ---------------------------------------------------------------------------

ValidationReport validate(const SystemSpec& spec, const Tolerances& tol, ExecMode mode) {
  const int n = tol.validation_grid;
  const SurfaceModel& m = spec.surface();
  const double x0 = m.domain_xmin(), x1 = m.domain_xmax();
  const double y0 = m.domain_ymin(), y1 = m.domain_ymax();

  // 3 channels per grid point: integrability defect, |X|, |dF|
  std::vector<double> defect, xmag, gmag;
  auto cell = [&](std::size_t i, std::size_t j) -> Vec2 {
    double fx = (static_cast<double>(i) + 0.5) / n;
    double fy = (static_cast<double>(j) + 0.5) / n;
    return {x0 + fx * (x1 - x0), y0 + fy * (y1 - y0)};
  };
  grid_map(
      n, n,
      [&](std::size_t i, std::size_t j) {
        Vec2 p = cell(i, j);
        Vec2 X = spec.field(p);
        Vec2 G = spec.integral_gradient(p);
        double xf = X.dot(G);
        return std::abs(xf) / (1.0 + G.norm() * X.norm());
      },
      defect, mode);
  grid_map(
      n, n, [&](std::size_t i, std::size_t j) { return spec.field(cell(i, j)).norm(); }, xmag,
      mode);
  grid_map(
      n, n,
      [&](std::size_t i, std::size_t j) { return spec.integral_gradient(cell(i, j)).norm(); },
      gmag, mode);

  ValidationReport rep;
  rep.max_integrability_defect = reduce_max(defect);
  double scale_x = reduce_max(xmag), scale_g = reduce_max(gmag);
  std::size_t zero_x = 0, zero_g = 0;
  for (double v : xmag)
    if (v <= 1e-9 * (1.0 + scale_x)) ++zero_x;
  for (double v : gmag)
    if (v <= 1e-9 * (1.0 + scale_g)) ++zero_g;
  rep.fraction_field_zero = static_cast<double>(zero_x) / xmag.size();
  rep.fraction_df_zero = static_cast<double>(zero_g) / gmag.size();
  rep.integrability_ok = rep.max_integrability_defect <= tol.integrability;
  rep.field_nonzero_ok = rep.fraction_field_zero <= tol.zero_fraction;
  rep.df_nonzero_ok = rep.fraction_df_zero <= tol.zero_fraction;
  return rep;
}

}  // namespace isl
