#include "isl/flow.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace isl {

// ---------------------------------------------------------------------------
// LevelCurve geometry.
// ---------------------------------------------------------------------------

void LevelCurve::finalize() {
  if (points.size() < 2) throw FlowError("level curve needs at least 2 points");
  arclength.assign(points.size(), 0.0);
  for (std::size_t i = 1; i < points.size(); ++i)
    arclength[i] = arclength[i - 1] + (points[i] - points[i - 1]).norm();
  std::vector<double> xs(points.size()), ys(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    xs[i] = points[i].x;
    ys[i] = points[i].y;
  }
  sx_ = CubicSpline(arclength, xs);
  sy_ = CubicSpline(arclength, ys);
  deck_shift_ = points.back() - points.front();
}

double LevelCurve::wrap_s(double s) const {
  if (!closed) return std::clamp(s, 0.0, length());
  double L = length();
  double w = std::fmod(s, L);
  if (w < 0) w += L;
  return w;
}

Vec2 LevelCurve::at(double s) const {
  double w = wrap_s(s);
  return {sx_(w), sy_(w)};
}

Vec2 LevelCurve::tangent(double s) const {
  double w = wrap_s(s);
  Vec2 d{sx_.derivative(w), sy_.derivative(w)};
  return d.normalized();
}

Vec2 LevelCurve::velocity(double s) const {
  double w = wrap_s(s);
  return {sx_.derivative(w), sy_.derivative(w)};
}

Vec2 LevelCurve::curvature_vector(double s) const {
  double w = wrap_s(s);
  return {sx_.second_derivative(w), sy_.second_derivative(w)};
}

// ---------------------------------------------------------------------------
// Continuation tracer.
// ---------------------------------------------------------------------------

namespace {

struct Corrector {
  const SystemSpec& spec;
  double level;
  double tol;

  // Newton along grad F; returns false on stall.
  bool operator()(Vec2& p, int max_iter = 30) const {
    for (int it = 0; it < max_iter; ++it) {
      double err = spec.integral(p) - level;
      if (std::abs(err) <= tol * (1.0 + std::abs(level))) return true;
      Vec2 g = spec.integral_gradient(p);
      double g2 = g.dot(g);
      if (g2 < 1e-28) return false;
      p = p - g * (err / g2);
    }
    return std::abs(spec.integral(p) - level) <= 10 * tol * (1.0 + std::abs(level));
  }
};

// Newton for a critical point of F near p (solves grad F = 0).
std::optional<Vec2> find_integral_critical(const SystemSpec& spec, Vec2 p, double radius) {
  Vec2 q = p;
  for (int it = 0; it < 40; ++it) {
    Vec2 g = spec.integral_gradient(q);
    if (g.norm() < 1e-13) break;
    double hxx = spec.integral_hessian_quad(q, {1, 0});
    double hyy = spec.integral_hessian_quad(q, {0, 1});
    double hsum = spec.integral_hessian_quad(q, {1, 1});
    double hxy = 0.5 * (hsum - hxx - hyy);
    double det = hxx * hyy - hxy * hxy;
    if (std::abs(det) < 1e-18) return std::nullopt;
    Vec2 step{(hyy * g.x - hxy * g.y) / det, (-hxy * g.x + hxx * g.y) / det};
    q = q - step;
    if ((q - p).norm() > radius) return std::nullopt;
    if (step.norm() < 1e-14) break;
  }
  if (spec.integral_gradient(q).norm() > 1e-9) return std::nullopt;
  return q;
}

struct TraceCore {
  const SystemSpec& spec;
  const Tolerances& tol;
  double level;
  Corrector correct;

  TraceCore(const SystemSpec& s, const Tolerances& t, double c)
      : spec(s), tol(t), level(c), correct{s, c, t.corrector} {}

  Vec2 tangent_at(const Vec2& p) const {
    return spec.integral_gradient(p).perp().normalized();
  }

  // Traces from `start` in direction sign * (grad F)-perp until closure,
  // boundary exit, or a critical point of F lying on this level.
  LevelCurve run(Vec2 start, int sign, const std::optional<Vec2>& start_vertex) const {
    LevelCurve curve;
    curve.level = level;
    curve.orientation_sign = sign;
    const SurfaceModel& surf = spec.surface();

    Vec2 p = start;
    if (!correct(p)) throw FlowError("continuation stall at seed");
    if (start_vertex) {
      curve.starts_at_critical = true;
      curve.start_critical = *start_vertex;
      curve.points.push_back(*start_vertex);
    }
    curve.points.push_back(p);

    double grad_scale = spec.integral_gradient(p).norm();
    Vec2 t_prev = tangent_at(p) * static_cast<double>(sign);
    double h = tol.curve_step;
    double s_total = 0.0;
    const double base_h = tol.curve_step;
    const Vec2 p0 = p;
    const Vec2 t0 = t_prev;
    double x_scale = std::max(1e-12, spec.field(p).norm());
    const std::size_t max_points = 400000;

    for (std::size_t step_i = 0; step_i < max_points; ++step_i) {
      Vec2 g = spec.integral_gradient(p);
      grad_scale = std::max(grad_scale, g.norm());

      // refine near zeros of X so the reduced flow geometry is well resolved
      double xmag = spec.field(p).norm();
      x_scale = std::max(x_scale, xmag);
      double refine = std::clamp(xmag / (0.25 * x_scale), 0.15, 1.0);
      double h_eff = std::min(h, base_h * refine);

      Vec2 t = tangent_at(p) * static_cast<double>(sign);
      if (t.dot(t_prev) < 0) t = t * -1.0;

      Vec2 q = p + t * h_eff;
      bool ok = correct(q);
      double turn = 1.0;
      if (ok) {
        Vec2 tq = tangent_at(q);
        if (tq.dot(t) < 0) tq = tq * -1.0;
        turn = std::acos(std::clamp(tq.dot(t), -1.0, 1.0));
      }
      if (!ok || (q - p).norm() > 1.6 * h_eff || turn > 0.35) {
        if (h_eff <= 2e-6) throw FlowError("continuation stall");
        h = 0.25 * h_eff;
        continue;
      }
      if (turn < 0.05) h = std::min(h * 1.3, base_h);

      // boundary exit: bisect the final segment onto the window edge
      if (!surf.contains(q)) {
        Vec2 in = p, out = q;
        for (int bi = 0; bi < 50; ++bi) {
          Vec2 mid = (in + out) * 0.5;
          Vec2 mc = mid;
          if (correct(mc) && surf.contains(mc))
            in = mc;
          else
            out = (in + out) * 0.5;
        }
        if ((in - p).norm() > 1e-12) curve.points.push_back(in);
        curve.hits_boundary = true;
        curve.finalize();
        return curve;
      }

      // critical endpoint: grad F collapsing on this level
      double gq = spec.integral_gradient(q).norm();
      if (gq < 2e-2 * std::max(1.0, grad_scale)) {
        auto crit = find_integral_critical(spec, q, 20.0 * base_h);
        if (crit && std::abs(spec.integral(*crit) - level) < 1e-6 * (1.0 + std::abs(level))) {
          Vec2 v = *crit;
          bool near_start_vertex =
              start_vertex && s_total < 6 * base_h && surf.same_point(v, *start_vertex, 1e-5);
          if (!near_start_vertex && (q - v).norm() < 10.0 * base_h) {
            // choose the cover representative of v nearest to q
            Vec2 vc = v;
            if (surf.periodic_x()) {
              double L = surf.domain_xmax() - surf.domain_xmin();
              double k = std::round((q.x - v.x) / L);
              vc.x += k * L;
              if (surf.kind == SurfaceKind::Strip && surf.strip_sign < 0 &&
                  static_cast<long long>(k) % 2 != 0)
                vc.y = -vc.y;
            }
            curve.points.push_back(q);
            curve.points.push_back(vc);
            curve.ends_at_critical = true;
            curve.end_critical = vc;
            curve.finalize();
            return curve;
          }
        }
        if (gq < 1e-5 * std::max(1.0, grad_scale))
          throw FlowError("continuation stall: vanishing gradient off critical level");
      }

      s_total += (q - p).norm();
      p = q;
      t_prev = t;
      curve.points.push_back(p);

      // closure test against the start point
      if (s_total > 6 * base_h && surf.same_point(p, p0, 1.8 * h_eff)) {
        Vec2 tn = tangent_at(p) * static_cast<double>(sign);
        if (tn.dot(t0) > 0.5) {
          Vec2 pc = p0;
          int wraps = 0;
          bool flip = false;
          if (surf.periodic_x()) {
            double L = surf.domain_xmax() - surf.domain_xmin();
            double k = std::round((p.x - p0.x) / L);
            pc.x += k * L;
            wraps = static_cast<int>(k);
            if (surf.kind == SurfaceKind::Strip && surf.strip_sign < 0 &&
                static_cast<long long>(k) % 2 != 0) {
              pc.y = -pc.y;
              flip = true;
            }
          }
          if (surf.periodic_y()) {
            double L = surf.domain_ymax() - surf.domain_ymin();
            pc.y += std::round((p.y - pc.y) / L) * L;
          }
          if ((p - pc).norm() < 2.5 * h_eff) {
            curve.points.back() = pc;
            curve.closed = true;
            curve.deck_wraps = wraps;
            curve.twisted = flip;
            curve.finalize();
            return curve;
          }
        }
      }
    }
    throw FlowError("continuation exceeded step budget");
  }
};

// Rotate a closed curve's start to the sample with the largest |X| so the
// spline joint sits away from zeros of the reduced flow.
void rotate_closed_start(const SystemSpec& spec, LevelCurve& curve) {
  if (!curve.closed || curve.points.size() < 8) return;
  std::size_t best = 0;
  double best_mag = -1.0;
  for (std::size_t i = 0; i + 1 < curve.points.size(); ++i) {
    double m = spec.field(curve.points[i]).norm();
    if (m > best_mag) {
      best_mag = m;
      best = i;
    }
  }
  if (best == 0) return;
  Vec2 shift = curve.points.back() - curve.points.front();  // deck displacement
  std::vector<Vec2> rotated;
  rotated.reserve(curve.points.size());
  for (std::size_t i = best; i + 1 < curve.points.size(); ++i)
    rotated.push_back(curve.points[i]);
  for (std::size_t i = 0; i <= best; ++i) rotated.push_back(curve.points[i] + shift);
  curve.points = std::move(rotated);
  curve.finalize();
}

void attach_singular_hits(const SystemSpec& spec, LevelCurve& curve, const Tolerances& tol) {
  ReducedFlow rf(spec, curve, tol);
  curve.singular_hits.clear();
  for (const auto& z : rf.zeros())
    curve.singular_hits.push_back({z.s, spec.surface().wrap(z.location)});
}

// Morse-Bott levels (dF = 0 along the level, X != 0): the level component is
// an orbit of X; trace it by integrating the flow.
LevelCurve trace_orbit_curve(const SystemSpec& spec, Vec2 seed, const Tolerances& tol) {
  LevelCurve curve;
  curve.level = spec.integral(seed);
  const SurfaceModel& surf = spec.surface();
  Vec2 p = seed;
  curve.points.push_back(p);
  double s_total = 0.0;
  const double h = tol.curve_step;
  OdeOptions opts;
  opts.max_step = 0.5;
  Dopri5 solver([&spec](const Vec2& q) { return spec.field(q); }, opts);
  for (std::size_t i = 0; i < 200000; ++i) {
    double speed = spec.field(p).norm();
    if (speed < 1e-12) throw FlowError("orbit trace stalled at a singular point");
    Vec2 q = solver.integrate(p, h / speed);
    if (!surf.contains(q)) {
      curve.points.push_back(q);
      curve.hits_boundary = true;
      curve.finalize();
      return curve;
    }
    s_total += (q - p).norm();
    p = q;
    curve.points.push_back(p);
    if (s_total > 6 * h && surf.same_point(p, seed, 1.8 * h)) {
      Vec2 pc = seed;
      int wraps = 0;
      bool flip = false;
      if (surf.periodic_x()) {
        double L = surf.domain_xmax() - surf.domain_xmin();
        double k = std::round((p.x - seed.x) / L);
        pc.x += k * L;
        wraps = static_cast<int>(k);
        if (surf.kind == SurfaceKind::Strip && surf.strip_sign < 0 &&
            static_cast<long long>(k) % 2 != 0) {
          pc.y = -pc.y;
          flip = true;
        }
      }
      if (surf.periodic_y()) {
        double L = surf.domain_ymax() - surf.domain_ymin();
        pc.y += std::round((p.y - pc.y) / L) * L;
      }
      if ((p - pc).norm() < 2.5 * h) {
        curve.points.back() = pc;
        curve.closed = true;
        curve.deck_wraps = wraps;
        curve.twisted = flip;
        curve.finalize();
        return curve;
      }
    }
  }
  throw FlowError("orbit trace exceeded step budget");
}

}  // namespace

LevelCurve trace_level_curve(const SystemSpec& spec, Vec2 seed, const Tolerances& tol) {
  double c = spec.integral(seed);
  if (spec.integral_gradient(seed).norm() < 1e-10) {
    if (spec.field(seed).norm() > 1e-8) {
      // Morse-Bott level: dF vanishes along it but the flow is regular
      LevelCurve orbit = trace_orbit_curve(spec, seed, tol);
      rotate_closed_start(spec, orbit);
      attach_singular_hits(spec, orbit, tol);
      return orbit;
    }
    throw FlowError("seed is a critical point of the integral; use trace_level_graph");
  }
  TraceCore core(spec, tol, c);
  LevelCurve curve = core.run(seed, +1, std::nullopt);
  if (!curve.closed) {
    // cover the other direction and join
    LevelCurve back = core.run(seed, -1, std::nullopt);
    std::vector<Vec2> pts;
    for (auto it = back.points.rbegin(); it != back.points.rend(); ++it) pts.push_back(*it);
    pts.pop_back();  // seed duplicated
    for (const auto& q : curve.points) pts.push_back(q);
    curve.points = std::move(pts);
    curve.starts_at_critical = back.ends_at_critical;
    curve.start_critical = back.end_critical;
    curve.hits_boundary = curve.hits_boundary || back.hits_boundary;
    curve.finalize();
  }
  rotate_closed_start(spec, curve);
  attach_singular_hits(spec, curve, tol);
  return curve;
}

// ---------------------------------------------------------------------------
// Singular-level graph tracing.
// ---------------------------------------------------------------------------

namespace {

// Eigen-directions of the saddle Jacobian (two real nonzero eigenvalues).
std::pair<Vec2, Vec2> saddle_directions(const SystemSpec& spec, const Vec2& v) {
  double j[4];
  spec.jacobian(v, j);
  double tr = j[0] + j[3];
  double det = j[0] * j[3] - j[1] * j[2];
  double disc = tr * tr - 4 * det;
  if (disc <= 0) throw FlowError("vertex Jacobian has no real eigenbasis");
  double sq = std::sqrt(disc);
  auto eigvec = [&](double l) -> Vec2 {
    double a = j[0] - l, b = j[1], c = j[2], d = j[3] - l;
    Vec2 w = (std::abs(a) + std::abs(b) >= std::abs(c) + std::abs(d)) ? Vec2{-b, a}
                                                                      : Vec2{-d, c};
    if (w.norm() < 1e-14) w = {1, 0};
    return w.normalized();
  };
  return {eigvec(0.5 * (tr + sq)), eigvec(0.5 * (tr - sq))};
}

}  // namespace

LevelSetGraph trace_level_graph(const SystemSpec& spec, const std::vector<Vec2>& critical_points,
                                double level, const Tolerances& tol) {
  LevelSetGraph graph;
  graph.level = level;
  graph.vertices = critical_points;
  const SurfaceModel& surf = spec.surface();

  auto vertex_index = [&](const Vec2& p) -> int {
    for (std::size_t i = 0; i < graph.vertices.size(); ++i)
      if (surf.same_point(p, graph.vertices[i], 1e-5)) return static_cast<int>(i);
    return -1;
  };

  TraceCore core(spec, tol, level);
  const double offset = std::max(4.0 * tol.curve_step, 0.04);

  // Two traces of the same separatrix differ by endpoint padding, so compare
  // geometry: every sample of one within reach of the other.
  auto curves_coincide = [&](const LevelCurve& a, const LevelCurve& b) {
    const double reach = 3.0 * offset;
    for (int i = 1; i < 16; ++i) {
      Vec2 pa = surf.wrap(a.at(a.length() * i / 16.0));
      double best = 1e300;
      for (int j = 0; j <= 64; ++j) {
        Vec2 pb = surf.wrap(b.at(b.length() * j / 64.0));
        best = std::min(best, (pa - pb).norm());
        if (surf.periodic_x()) {
          double L = surf.domain_xmax() - surf.domain_xmin();
          best = std::min(best, std::abs(std::abs(pa.x - pb.x) - L) + std::abs(pa.y - pb.y));
        }
      }
      if (best > reach) return false;
    }
    return true;
  };

  for (std::size_t vi = 0; vi < graph.vertices.size(); ++vi) {
    const Vec2 v = graph.vertices[vi];
    auto [u_dir, s_dir] = saddle_directions(spec, v);
    for (Vec2 ray : {u_dir, u_dir * -1.0, s_dir, s_dir * -1.0}) {
      Vec2 seed = v + ray * offset;
      if (!surf.contains(seed)) continue;
      // the separatrix tangent at the seed is parallel to the ray; pick the
      // continuation sign that traces away from the vertex
      Vec2 t0 = core.tangent_at(seed);
      int sign = t0.dot(ray) >= 0 ? +1 : -1;
      LevelCurve branch;
      try {
        branch = core.run(seed, sign, v);
      } catch (const FlowError&) {
        continue;
      }
      int from = static_cast<int>(vi);
      int to = branch.ends_at_critical ? vertex_index(branch.end_critical) : -1;
      bool dup = false;
      for (const auto& existing : graph.edges) {
        if (std::min(existing.from_vertex, existing.to_vertex) != std::min(from, to) ||
            std::max(existing.from_vertex, existing.to_vertex) != std::max(from, to))
          continue;
        if (curves_coincide(branch, existing.curve)) {
          dup = true;
          break;
        }
      }
      if (dup) continue;
      attach_singular_hits(spec, branch, tol);
      graph.edges.push_back({std::move(branch), from, to});
    }
  }
  return graph;
}

// ---------------------------------------------------------------------------
// Reduced flow.
// ---------------------------------------------------------------------------

ReducedFlow::ReducedFlow(const SystemSpec& spec, const LevelCurve& curve, const Tolerances& tol)
    : spec_(&spec), curve_(&curve) {
  locate_zeros(tol);
}

// ds/dt in the chord parametrization: p(t) = gamma(s(t)) with gamma' = X
// gives s' = X . gamma' / |gamma'|^2. Exact w.r.t. the stored geometry, so
// time integrals carry only the spline's position error.
double ReducedFlow::V(double s) const {
  Vec2 p = curve_->at(s);
  Vec2 g = curve_->velocity(s);
  return spec_->field(p).dot(g) / g.dot(g);
}

double ReducedFlow::dVds(double s) const {
  Vec2 p = curve_->at(s);
  Vec2 g = curve_->velocity(s);
  Vec2 gg = curve_->curvature_vector(s);
  double g2 = g.dot(g);
  double j[4];
  spec_->jacobian(p, j);
  Vec2 jg{j[0] * g.x + j[1] * g.y, j[2] * g.x + j[3] * g.y};
  Vec2 X = spec_->field(p);
  return jg.dot(g) / g2 + X.dot(gg) / g2 - X.dot(g) * 2.0 * g.dot(gg) / (g2 * g2);
}

double ReducedFlow::d2Vds2(double s) const {
  double d = 1e-3;
  return (V(s + d) - 2.0 * V(s) + V(s - d)) / (d * d);
}

void ReducedFlow::locate_zeros(const Tolerances& tol) {
  const auto& sgrid = curve_->arclength;
  if (sgrid.size() < 3) return;
  const double L = curve_->length();
  double vscale = 0.0;
  std::vector<double> vs(sgrid.size());
  for (std::size_t i = 0; i < sgrid.size(); ++i) {
    vs[i] = V(sgrid[i]);
    vscale = std::max(vscale, std::abs(vs[i]));
  }
  if (vscale == 0.0) return;

  // curves terminating at a critical point carry the trivial zero of V there;
  // exclude a margin so only interior (Type II) zeros are reported
  double margin = 5.0 * L / static_cast<double>(sgrid.size());
  double s_lo = curve_->starts_at_critical ? margin : -1.0;
  double s_hi = curve_->ends_at_critical ? L - margin : L + 1.0;

  auto add_zero = [&](double s_star) {
    if (s_star < s_lo || s_star > s_hi) return;
    for (const auto& z : zeros_)
      if (std::abs(z.s - s_star) < 1e-8 * (1 + L)) return;
    Zero z;
    z.s = s_star;
    z.lambda = dVds(s_star);
    z.location = curve_->at(s_star);
    z.simple = std::abs(z.lambda) > tol.simple_zero_min_slope;
    double j[4];
    spec_->jacobian(z.location, j);
    z.jacobian_eigenvalue = j[0] + j[3];
    zeros_.push_back(z);
  };

  std::size_t n = sgrid.size();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    double s0 = sgrid[i], s1 = sgrid[i + 1];
    double v0 = vs[i], v1 = vs[i + 1];
    if (v0 == 0.0) add_zero(s0);
    if (v0 * v1 < 0.0) {
      double s_star = find_root([this](double s) { return V(s); }, s0, s1, tol.zero_locate);
      s_star = refine_root([this](double s) { return V(s); },
                           [this](double s) { return dVds(s); }, s_star, s0, s1,
                           tol.zero_locate);
      add_zero(s_star);
    }
  }
  // touching (non-crossing) zero: local |V| minimum that dips to ~0
  for (std::size_t i = 1; i + 1 < n; ++i) {
    double a0 = std::abs(vs[i - 1]), a1 = std::abs(vs[i]), a2 = std::abs(vs[i + 1]);
    if (a1 < a0 && a1 < a2 && a1 < 1e-6 * vscale && vs[i - 1] * vs[i + 1] > 0) {
      double s_star = refine_root([this](double s) { return dVds(s); },
                                  [this](double s) { return d2Vds2(s); }, sgrid[i],
                                  sgrid[i - 1], sgrid[i + 1], tol.zero_locate);
      if (std::abs(V(s_star)) < 1e-6 * vscale) add_zero(s_star);
    }
  }
  std::sort(zeros_.begin(), zeros_.end(), [](const Zero& a, const Zero& b) { return a.s < b.s; });
}

// ---------------------------------------------------------------------------
// Linearizing coordinate.
// ---------------------------------------------------------------------------

LinearizingCoordinate::LinearizingCoordinate(const ReducedFlow& rf, std::size_t zero_index,
                                             double window_scale)
    : rf_(&rf) {
  const auto& zs = rf.zeros();
  if (zero_index >= zs.size()) throw FlowError("zero index out of range");
  const auto& z = zs[zero_index];
  if (!z.simple) throw FlowError("linearizing coordinate requires a simple zero");
  s_star_ = z.s;
  lambda_ = z.lambda;

  double L = rf.length();
  double w = rf.closed() ? 0.45 * L : 0.45 * std::min(s_star_, L - s_star_);
  for (const auto& other : zs) {
    if (other.s == z.s) continue;
    double d = std::abs(other.s - s_star_);
    if (rf.closed()) d = std::min(d, L - d);
    w = std::min(w, 0.45 * d);
  }
  window_ = w * window_scale;
  if (window_ <= 0) throw FlowError("empty isolating window");
}

double LinearizingCoordinate::xi(double s) const {
  double u = s - s_star_;
  if (std::abs(u) > window_ * 1.0001)
    throw FlowError("xi requested outside the isolating window");
  if (u == 0.0) return 0.0;
  auto integrand = [this](double sigma) {
    double du = sigma - s_star_;
    if (std::abs(du) < 1e-7) {
      double a = rf_->d2Vds2(s_star_);
      return -a / (2.0 * lambda_);
    }
    return lambda_ / rf_->V(sigma) - 1.0 / du;
  };
  double I = integrate_adaptive(integrand, s_star_, s, 1e-13, 1e-11);
  return u * std::exp(I);
}

double LinearizingCoordinate::inverse(double xi_value) const {
  if (xi_value == 0.0) return s_star_;
  double lo = s_star_ - window_, hi = s_star_ + window_;
  auto f = [&](double s) { return xi(s) - xi_value; };
  double flo = f(lo), fhi = f(hi);
  if (flo * fhi > 0) throw FlowError("xi inverse outside window");
  return find_root(f, lo, hi, 1e-13);
}

double LinearizingCoordinate::jump(double s) const { return inverse(-xi(s)); }

// ---------------------------------------------------------------------------
// Compensated (principal value) time.
// ---------------------------------------------------------------------------

CompensatedTime compensated_time(const ReducedFlow& rf, double s_a, double s_b,
                                 const Tolerances& tol) {
  (void)tol;
  CompensatedTime out;
  if (s_a == s_b) return out;
  double sign = 1.0;
  if (s_b < s_a) {
    std::swap(s_a, s_b);
    sign = -1.0;
  }
  const double L = rf.length();

  struct Pole {
    double s, lambda;
    std::size_t index;
  };
  std::vector<Pole> poles;
  const auto& zs = rf.zeros();
  for (std::size_t i = 0; i < zs.size(); ++i) {
    if (rf.closed()) {
      // replicate the zero at s + kL inside (s_a, s_b)
      double first = zs[i].s + std::ceil((s_a - zs[i].s) / L) * L;
      for (double sz = first; sz < s_b; sz += L) {
        if (sz > s_a && sz < s_b) {
          if (!zs[i].simple) throw FlowError("compensated time across a non-simple zero");
          poles.push_back({sz, zs[i].lambda, i});
        }
      }
    } else if (zs[i].s > s_a && zs[i].s < s_b) {
      if (!zs[i].simple) throw FlowError("compensated time across a non-simple zero");
      poles.push_back({zs[i].s, zs[i].lambda, i});
    }
  }
  for (const auto& p : poles) {
    if (std::min(std::abs(s_a - p.s), std::abs(s_b - p.s)) < 1e-6)
      throw FlowError("compensated time endpoint too close to a zero");
  }
  std::sort(poles.begin(), poles.end(), [](const Pole& a, const Pole& b) { return a.s < b.s; });

  auto integrand = [&](double s) {
    const Pole* nearp = nullptr;
    double unear = 0.0;
    for (const auto& p : poles) {
      double u = s - p.s;
      if (std::abs(u) < 2e-5 && (!nearp || std::abs(u) < std::abs(unear))) {
        nearp = &p;
        unear = u;
      }
    }
    double value;
    if (nearp) {
      double a = rf.d2Vds2(nearp->s);
      value = -a / (2.0 * nearp->lambda * nearp->lambda);
      for (const auto& p : poles) {
        if (&p == nearp) continue;
        value -= 1.0 / (p.lambda * (s - p.s));
      }
      return value;
    }
    value = 1.0 / rf.V(s);
    for (const auto& p : poles) value -= 1.0 / (p.lambda * (s - p.s));
    return value;
  };

  std::vector<double> knots{s_a};
  for (const auto& p : poles) knots.push_back(p.s);
  knots.push_back(s_b);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    double a = knots[i], b = knots[i + 1];
    double mid = 0.5 * (a + b);
    total += integrate_adaptive(integrand, a, mid, 1e-13, 1e-11);
    total += integrate_adaptive(integrand, mid, b, 1e-13, 1e-11);
  }
  for (const auto& p : poles) {
    total += (1.0 / p.lambda) * std::log(std::abs((s_b - p.s) / (s_a - p.s)));
    out.coefficients.emplace_back(p.index, 1.0 / p.lambda);
  }
  out.finite = sign * total;
  return out;
}

// ---------------------------------------------------------------------------
// Flow map and sections.
// ---------------------------------------------------------------------------

namespace {

VectorField2 guarded_field(const SystemSpec& spec) {
  const SurfaceModel surf = spec.surface();
  double margin_x = 0.2 * (surf.domain_xmax() - surf.domain_xmin());
  double margin_y = 0.2 * (surf.domain_ymax() - surf.domain_ymin());
  return [&spec, surf, margin_x, margin_y](const Vec2& p) {
    if (surf.kind == SurfaceKind::PlaneWindow) {
      if (p.x < surf.xmin - margin_x || p.x > surf.xmax + margin_x ||
          p.y < surf.ymin - margin_y || p.y > surf.ymax + margin_y)
        throw OdeError("trajectory exits the surface window", p);
    } else if (surf.kind == SurfaceKind::Strip) {
      if (p.y < surf.domain_ymin() - margin_y || p.y > surf.domain_ymax() + margin_y)
        throw OdeError("trajectory exits the strip", p);
    }
    return spec.field(p);
  };
}

}  // namespace

Vec2 integrate(const SystemSpec& spec, Vec2 p0, double t, const OdeOptions& opts) {
  Dopri5 solver(guarded_field(spec), opts);
  return solver.integrate(p0, t);
}

std::optional<EventHit> section_crossing(const SystemSpec& spec, Vec2 p0, Vec2 base, Vec2 normal,
                                         double t_max, double min_time, int direction,
                                         const OdeOptions& opts) {
  Dopri5 solver(guarded_field(spec), opts);
  EventSpec ev;
  ev.g = [base, normal](const Vec2& p) { return (p - base).dot(normal); };
  ev.direction = direction;
  ev.min_time = min_time;
  return solver.integrate_until(p0, t_max, ev);
}

std::optional<double> orbit_period(const SystemSpec& spec, Vec2 p0, double t_max,
                                   const OdeOptions& opts) {
  Vec2 v = spec.field(p0);
  if (v.norm() == 0.0) return std::nullopt;
  Vec2 n = v.normalized();
  auto hit = section_crossing(spec, p0, p0, n, t_max, 1e-9, +1, opts);
  if (!hit) return std::nullopt;
  return hit->time;
}

// ---------------------------------------------------------------------------
// Exports.
// ---------------------------------------------------------------------------

std::string level_curve_csv(const ReducedFlow& rf, std::size_t samples) {
  std::ostringstream out;
  out << "s,x,y,V\n";
  const LevelCurve& c = rf.curve();
  for (std::size_t i = 0; i <= samples; ++i) {
    double s = c.length() * static_cast<double>(i) / static_cast<double>(samples);
    Vec2 p = c.at(s);
    out << s << ',' << p.x << ',' << p.y << ',' << rf.V(s) << '\n';
  }
  return out.str();
}

std::string level_curve_svg(const LevelCurve& curve, std::size_t samples) {
  std::ostringstream out;
  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  std::vector<Vec2> pts;
  for (std::size_t i = 0; i <= samples; ++i) {
    double s = curve.length() * static_cast<double>(i) / static_cast<double>(samples);
    Vec2 p = curve.at(s);
    pts.push_back(p);
    x0 = std::min(x0, p.x);
    x1 = std::max(x1, p.x);
    y0 = std::min(y0, p.y);
    y1 = std::max(y1, p.y);
  }
  double w = std::max(x1 - x0, 1e-9), h = std::max(y1 - y0, 1e-9);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 640 640\">\n";
  out << "<polyline fill=\"none\" stroke=\"#225\" stroke-width=\"1.5\" points=\"";
  for (const auto& p : pts) {
    double px = 20 + 600 * (p.x - x0) / w;
    double py = 620 - 600 * (p.y - y0) / h;
    out << px << ',' << py << ' ';
  }
  out << "\"/>\n</svg>\n";
  return out.str();
}

}  // namespace isl
