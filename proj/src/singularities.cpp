#include "isl/singularities.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace isl {

const char* to_string(SingularityType t) {
  switch (t) {
    case SingularityType::I: return "I";
    case SingularityType::II: return "II";
    case SingularityType::III: return "III";
    case SingularityType::IV: return "IV";
    case SingularityType::Degenerate: return "degenerate";
  }
  return "?";
}

namespace {

double jac_norm(const double j[4]) {
  return std::sqrt(j[0] * j[0] + j[1] * j[1] + j[2] * j[2] + j[3] * j[3]);
}

Vec2 kernel_direction(const double j[4]) {
  // null vector of a (near-)singular 2x2 matrix: take the larger row
  Vec2 r0{j[0], j[1]}, r1{j[2], j[3]};
  Vec2 row = (r0.norm() >= r1.norm()) ? r0 : r1;
  if (row.norm() < 1e-300) return {1, 0};
  return Vec2{-row.y, row.x}.normalized();
}

// Gauss-Newton step toward the zero set of X.
bool project_to_zero_set(const SystemSpec& spec, Vec2& p, double tol_x, int iters = 40) {
  for (int it = 0; it < iters; ++it) {
    Vec2 X = spec.field(p);
    if (X.norm() <= tol_x) return true;
    double j[4];
    spec.jacobian(p, j);
    // solve min |J d + X| with Tikhonov guard
    double a = j[0], b = j[1], c = j[2], d = j[3];
    double g11 = a * a + c * c, g12 = a * b + c * d, g22 = b * b + d * d;
    double eps = 1e-12 * (g11 + g22 + 1e-300);
    g11 += eps;
    g22 += eps;
    double r1 = -(a * X.x + c * X.y);
    double r2 = -(b * X.x + d * X.y);
    double det = g11 * g22 - g12 * g12;
    if (det == 0.0) return false;
    Vec2 step{(g22 * r1 - g12 * r2) / det, (-g12 * r1 + g11 * r2) / det};
    p = p + step;
    if (step.norm() < 1e-15) break;
  }
  return spec.field(p).norm() <= 10 * tol_x;
}

}  // namespace

std::vector<Vec2> trace_singular_curve(const SystemSpec& spec, Vec2 p0, double max_arc,
                                       double step, bool* closed_out) {
  const SurfaceModel& surf = spec.surface();
  if (closed_out) *closed_out = false;
  Vec2 p = p0;
  if (!project_to_zero_set(spec, p, 1e-12)) throw ClassifyError("singular curve seed stall");

  auto one_side = [&](int dir) {
    std::vector<Vec2> pts;
    Vec2 q = p;
    double j[4];
    spec.jacobian(q, j);
    Vec2 t_prev = kernel_direction(j) * static_cast<double>(dir);
    double arc = 0.0;
    while (arc < max_arc) {
      spec.jacobian(q, j);
      Vec2 t = kernel_direction(j);
      if (t.dot(t_prev) < 0) t = t * -1.0;
      Vec2 next = q + t * step;
      if (!project_to_zero_set(spec, next, 1e-11)) break;
      if (!surf.contains(next)) break;
      if ((next - q).norm() > 3 * step) break;  // jumped to a different branch
      arc += (next - q).norm();
      q = next;
      t_prev = t;
      pts.push_back(q);
      if (arc > 6 * step && surf.same_point(q, p, 1.5 * step)) {
        if (closed_out) *closed_out = true;
        break;
      }
    }
    return pts;
  };

  std::vector<Vec2> fwd = one_side(+1);
  bool closed = closed_out && *closed_out;
  std::vector<Vec2> out;
  if (!closed) {
    std::vector<Vec2> bwd = one_side(-1);
    for (auto it = bwd.rbegin(); it != bwd.rend(); ++it) out.push_back(*it);
  }
  out.push_back(p);
  for (const auto& q : fwd) out.push_back(q);
  return out;
}

// ---------------------------------------------------------------------------
// classify
// ---------------------------------------------------------------------------

SingularPointRecord classify(const SystemSpec& spec, Vec2 p, const Tolerances& tol) {
  SingularPointRecord rec;
  rec.location = spec.surface().wrap(p);
  rec.integral_value = spec.integral(p);
  if (spec.field(p).norm() > 1e-8)
    throw ClassifyError("classify called on a non-singular point");
  spec.jacobian(p, rec.jacobian);
  const double* j = rec.jacobian;
  double tr = j[0] + j[3];
  double det = j[0] * j[3] - j[1] * j[2];
  double scale = std::max(1.0, jac_norm(j));
  double disc = tr * tr - 4 * det;
  const double eig_tol = 1e-8 * scale;

  // compare |J| against the Jacobian scale nearby: a root located to 1e-6
  // cannot push |J| below that on a line of vanishing linear part
  double local_scale = 0.0;
  for (Vec2 probe : {Vec2{0.05, 0}, Vec2{-0.05, 0}, Vec2{0, 0.05}, Vec2{0, -0.05}}) {
    double jp[4];
    spec.jacobian(p + probe, jp);
    local_scale = std::max(local_scale, jac_norm(jp));
  }
  if (jac_norm(j) <= 1e-10 || jac_norm(j) <= 1e-4 * local_scale) {
    rec.type = SingularityType::Degenerate;
    rec.degenerate_reason = "zero linear part";
    rec.eig_re[0] = rec.eig_re[1] = 0;
    return rec;
  }

  if (disc < -eig_tol * eig_tol) {
    // complex pair tr/2 +- i sqrt(-disc)/2
    double re = 0.5 * tr, im = 0.5 * std::sqrt(-disc);
    rec.eig_re[0] = rec.eig_re[1] = re;
    rec.eig_im[0] = im;
    rec.eig_im[1] = -im;
    if (std::abs(re) <= eig_tol) {
      rec.type = SingularityType::I;
    } else {
      rec.type = SingularityType::Degenerate;
      rec.degenerate_reason = "complex eigenvalues with nonzero real part";
    }
    return rec;
  }

  double sq = std::sqrt(std::max(0.0, disc));
  double l1 = 0.5 * (tr + sq), l2 = 0.5 * (tr - sq);
  rec.eig_re[0] = l1;
  rec.eig_re[1] = l2;
  bool z1 = std::abs(l1) <= eig_tol, z2 = std::abs(l2) <= eig_tol;

  if (!z1 && !z2) {
    if (l1 * l2 < 0) {
      rec.type = SingularityType::III;
    } else {
      rec.type = SingularityType::Degenerate;
      rec.degenerate_reason = "node: nonzero eigenvalues of equal sign";
    }
    return rec;
  }
  if (z1 != z2) {
    rec.type = SingularityType::II;
    rec.on_curve = true;
    return rec;
  }

  // nilpotent nonzero linear part: Type IV candidacy
  Vec2 dF = spec.integral_gradient(p);
  if (dF.norm() <= 1e-8) {
    rec.type = SingularityType::Degenerate;
    rec.degenerate_reason = "nilpotent point with singular first integral";
    return rec;
  }
  Vec2 v = kernel_direction(j);
  Vec2 d2 = spec.second_derivative(p, v);
  if (d2.norm() <= 1e-8 * scale) {
    rec.type = SingularityType::Degenerate;
    rec.degenerate_reason = "vanishing second derivative along the kernel direction";
    return rec;
  }
  // Morse test: F restricted to the singular curve has a nondegenerate
  // quadratic critical point at p
  try {
    auto arc = trace_singular_curve(spec, p, 0.3, 5e-3);
    std::vector<double> A, bvec;
    std::size_t m = 0;
    double u = 0.0;
    Vec2 prev;
    bool first = true;
    for (const auto& q : arc) {
      if (!first) u += (q - prev).norm();
      prev = q;
      first = false;
      double w = spec.integral(q) - rec.integral_value;
      A.push_back(1.0);
      A.push_back(u);
      A.push_back(u * u);
      bvec.push_back(w);
      ++m;
    }
    if (m < 8) throw ClassifyError("singular curve too short for the Morse test");
    auto cfit = solve_least_squares(A, m, 3, bvec);
    double dF_scale = dF.norm();
    if (std::abs(cfit[2]) <= 1e-8 * std::max(1.0, dF_scale)) {
      rec.type = SingularityType::Degenerate;
      rec.degenerate_reason = "integral not Morse along the singular curve";
      return rec;
    }
  } catch (const ClassifyError&) {
    rec.type = SingularityType::Degenerate;
    rec.degenerate_reason = "singular curve not traceable for the Morse test";
    return rec;
  }
  (void)tol;
  rec.type = SingularityType::IV;
  rec.on_curve = true;
  return rec;
}

// ---------------------------------------------------------------------------
// find_singularities
// ---------------------------------------------------------------------------

Classification find_singularities(const SystemSpec& spec, const Tolerances& tol, ExecMode mode) {
  Classification out;
  const SurfaceModel& surf = spec.surface();
  const int n = tol.validation_grid;
  const double x0 = surf.domain_xmin(), x1 = surf.domain_xmax();
  const double y0 = surf.domain_ymin(), y1 = surf.domain_ymax();

  struct SeedResult {
    double x = 0, y = 0;
    int converged = 0;
  };
  std::vector<SeedResult> results;
  element_map<SeedResult>(
      static_cast<std::size_t>(n) * n,
      [&](std::size_t idx) {
        std::size_t i = idx % n, jj = idx / n;
        Vec2 seed{x0 + (static_cast<double>(i) + 0.5) / n * (x1 - x0),
                  y0 + (static_cast<double>(jj) + 0.5) / n * (y1 - y0)};
        SeedResult r;
        // plain Newton first (fast for isolated zeros), Gauss-Newton fallback
        Vec2 p = seed;
        bool ok = false;
        for (int it = 0; it < 30; ++it) {
          Vec2 X = spec.field(p);
          if (X.norm() < 1e-12) {
            ok = true;
            break;
          }
          double j[4];
          spec.jacobian(p, j);
          double det = j[0] * j[3] - j[1] * j[2];
          if (std::abs(det) < 1e-14) break;
          Vec2 step{(j[3] * X.x - j[1] * X.y) / det, (-j[2] * X.x + j[0] * X.y) / det};
          p = p - step;
          if ((p - seed).norm() > 0.35 * std::max(x1 - x0, y1 - y0)) break;
        }
        if (!ok) {
          p = seed;
          ok = project_to_zero_set(spec, p, 1e-12) &&
               (p - seed).norm() <= 0.35 * std::max(x1 - x0, y1 - y0);
        }
        if (ok && surf.contains(p, -1e-9)) {
          Vec2 w = surf.wrap(p);
          r.x = w.x;
          r.y = w.y;
          r.converged = 1;
        }
        return r;
      },
      results, mode);

  // dedupe converged zeros
  std::vector<Vec2> zeros;
  for (const auto& r : results) {
    if (!r.converged) continue;
    Vec2 z{r.x, r.y};
    bool dup = false;
    for (const auto& seen : zeros)
      if (surf.same_point(z, seen, tol.dedupe_distance)) dup = true;
    if (!dup) zeros.push_back(z);
  }

  // split into isolated zeros and curve points by the Jacobian rank
  std::vector<Vec2> curve_seeds;
  for (const auto& z : zeros) {
    double j[4];
    spec.jacobian(z, j);
    double det = j[0] * j[3] - j[1] * j[2];
    double scale = std::max(1.0, jac_norm(j));
    if (std::abs(det) > 1e-6 * scale * scale) {
      out.points.push_back(classify(spec, z, tol));
    } else {
      curve_seeds.push_back(z);
    }
  }

  // trace singular curves through the remaining seeds
  const double curve_step = 5e-3;
  auto near_existing_curve = [&](const Vec2& z) {
    for (const auto& c : out.curves)
      for (const auto& q : c.points)
        if (surf.same_point(z, q, 4 * curve_step)) return true;
    return false;
  };

  for (const auto& z : curve_seeds) {
    if (near_existing_curve(z)) continue;
    SingularCurveRecord curve;
    double span = std::max(x1 - x0, y1 - y0);
    try {
      curve.points = trace_singular_curve(spec, z, 4.0 * span, curve_step, &curve.closed);
    } catch (const ClassifyError&) {
      // isolated nilpotent-or-degenerate zero without a traceable curve
      out.points.push_back(classify(spec, z, tol));
      continue;
    }
    if (curve.points.size() < 4) {
      out.points.push_back(classify(spec, z, tol));
      continue;
    }
    // special points on the curve: zeros of the transverse eigenvalue tr(J)
    std::vector<double> trs(curve.points.size());
    double tr_scale = 0.0;
    for (std::size_t i = 0; i < curve.points.size(); ++i) {
      double j[4];
      spec.jacobian(curve.points[i], j);
      trs[i] = j[0] + j[3];
      tr_scale = std::max(tr_scale, std::abs(trs[i]));
    }
    for (std::size_t i = 0; i + 1 < curve.points.size(); ++i) {
      bool crossing = trs[i] * trs[i + 1] < 0.0 &&
                      std::max(std::abs(trs[i]), std::abs(trs[i + 1])) > 1e-7 * tr_scale;
      if (!crossing) continue;
      // bisect along the curve chord for the tr = 0 point
      Vec2 a = curve.points[i], b = curve.points[i + 1];
      for (int it = 0; it < 60; ++it) {
        Vec2 mid = (a + b) * 0.5;
        project_to_zero_set(spec, mid, 1e-13);
        double j[4];
        spec.jacobian(mid, j);
        if ((j[0] + j[3]) * trs[i] >= 0)
          a = mid;
        else
          b = mid;
      }
      Vec2 special = (a + b) * 0.5;
      project_to_zero_set(spec, special, 1e-13);
      bool dup = false;
      for (const auto& prec : out.points)
        if (surf.same_point(prec.location, special, tol.dedupe_distance)) dup = true;
      if (!dup) {
        SingularPointRecord rec = classify(spec, special, tol);
        rec.on_curve = true;
        curve.special_point_indices.push_back(static_cast<int>(out.points.size()));
        out.points.push_back(rec);
      }
    }
    // representative samples along the curve (ordinary Type II points, or
    // degenerate verdicts when the linear part dies along the whole curve)
    const std::size_t reps = 9;
    for (std::size_t r = 0; r < reps; ++r) {
      std::size_t i = (curve.points.size() - 1) * r / (reps - 1);
      Vec2 q = curve.points[i];
      bool dup = false;
      for (const auto& prec : out.points)
        if (surf.same_point(prec.location, q, 1e-4)) dup = true;
      if (dup) continue;
      SingularPointRecord rec = classify(spec, q, tol);
      rec.on_curve = true;
      out.points.push_back(rec);
    }
    out.curves.push_back(std::move(curve));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Type I: period function
// ---------------------------------------------------------------------------

PeriodData period_function(const SystemSpec& spec, const SingularPointRecord& rec,
                           const Tolerances& tol) {
  if (rec.type != SingularityType::I) throw ClassifyError("period_function needs a Type I point");
  PeriodData out;
  out.beta = std::abs(rec.eig_im[0]);
  const SurfaceModel& surf = spec.surface();
  const Vec2 p = rec.location;

  // radial ladder toward the point
  double r_max = 0.45 * std::min({std::abs(p.x - surf.domain_xmin()),
                                  std::abs(surf.domain_xmax() - p.x),
                                  std::abs(p.y - surf.domain_ymin()),
                                  std::abs(surf.domain_ymax() - p.y)});
  if (r_max <= 0) throw ClassifyError("Type I point too close to the domain boundary");
  const Vec2 dir{1.0, 0.0};
  double t_max = 400.0 / std::max(out.beta, 1e-3) + 100.0;
  for (int k = 0; k < 20; ++k) {
    double r = r_max * std::pow(0.77, k);
    Vec2 q = p + dir * r;
    auto T = orbit_period(spec, q, t_max);
    if (!T) continue;
    out.samples.emplace_back(spec.integral(q) - rec.integral_value, *T);
  }
  if (out.samples.size() < 12) throw ClassifyError("orbit failed to close on most levels");
  int order = 4;
  auto fit = puiseux_fit(out.samples, 1, order, 1e-3);
  out.fit = fit.series;
  out.fit.base_variable = "F";
  out.limit_period = fit.series.coefficients[0];
  return out;
}

// ---------------------------------------------------------------------------
// Type II: eigenvalue function along a singular curve
// ---------------------------------------------------------------------------

EigenvalueCurveData eigenvalue_function(const SystemSpec& spec, const SingularCurveRecord& curve,
                                        const Tolerances& tol) {
  (void)tol;
  EigenvalueCurveData out;
  for (const auto& q : curve.points) {
    double j[4];
    spec.jacobian(q, j);
    double tr = j[0] + j[3];
    double det = j[0] * j[3] - j[1] * j[2];
    double scale = std::max(1.0, jac_norm(j));
    if (std::abs(tr) <= 1e-8 * scale) continue;  // Type IV point on the curve
    if (std::abs(det) > 1e-6 * scale * scale)
      throw ClassifyError("eigenvalue collision: curve point not of Type II");
    out.samples.emplace_back(spec.integral(q), tr);
  }
  std::sort(out.samples.begin(), out.samples.end());
  // twisted detection: on a Mobius strip a closed singular curve with odd
  // wrap carries the eigenvalue function only on a double cover
  if (spec.surface().kind == SurfaceKind::Strip && spec.surface().strip_sign < 0 && curve.closed)
    out.on_double_cover = true;
  return out;
}

// ---------------------------------------------------------------------------
// Type III: resonance and frequency series
// ---------------------------------------------------------------------------

namespace {

// orient the eigenvector pair so the probe quadrant lies in the domain
std::pair<Vec2, Vec2> oriented_saddle_frame(const SystemSpec& spec, const Vec2& p, double d) {
  double j[4];
  spec.jacobian(p, j);
  double tr = j[0] + j[3];
  double det = j[0] * j[3] - j[1] * j[2];
  double sq = std::sqrt(std::max(0.0, tr * tr - 4 * det));
  double l1 = 0.5 * (tr + sq);  // positive eigenvalue
  auto eigvec = [&](double l) -> Vec2 {
    double a = j[0] - l, b = j[1], c = j[2], dd = j[3] - l;
    Vec2 w = (std::abs(a) + std::abs(b) >= std::abs(c) + std::abs(dd)) ? Vec2{-b, a}
                                                                       : Vec2{-dd, c};
    return w.normalized();
  };
  Vec2 eu = eigvec(l1), es = eigvec(0.5 * (tr - sq));
  const SurfaceModel& surf = spec.surface();
  for (int flip = 0; flip < 4; ++flip) {
    Vec2 u = (flip & 1) ? eu * -1.0 : eu;
    Vec2 s = (flip & 2) ? es * -1.0 : es;
    Vec2 probe = p + (u + s).normalized() * d;
    if (surf.contains(probe, 0.02) && surf.contains(p + u * d, 0.02) &&
        surf.contains(p + s * d, 0.02))
      return {u, s};
  }
  throw ClassifyError("no saddle quadrant fits in the domain");
}

}  // namespace

ResonanceData resonance_and_frequency(const SystemSpec& spec, const SingularPointRecord& rec,
                                      const Tolerances& tol, bool fit_series) {
  if (rec.type != SingularityType::III)
    throw ClassifyError("resonance_and_frequency needs a Type III point");
  ResonanceData out;
  double l1 = std::max(rec.eig_re[0], rec.eig_re[1]);
  double l2 = std::min(rec.eig_re[0], rec.eig_re[1]);
  out.lambda1 = l1;
  out.lambda2 = l2;
  out.trace = l1 + l2;
  double ratio = l1 / (-l2);
  bool found = false;
  for (int q = 1; q <= tol.resonance_max_den && !found; ++q) {
    double pr = ratio * q;
    long p = std::lround(pr);
    if (p < 1 || p > tol.resonance_max_den) continue;
    if (std::gcd(p, static_cast<long>(q)) != 1) continue;
    if (std::abs(ratio - static_cast<double>(p) / q) <= tol.resonance) {
      out.a = q;
      out.b = static_cast<int>(p);
      found = true;
    }
  }
  if (!found)
    throw ClassifyError("eigenvalue ratio is not a rational p/q with p, q <= " +
                        std::to_string(tol.resonance_max_den));
  out.h0 = out.a * l1;

  if (!fit_series) return out;

  // measure the corner transit times between sections across the saddle
  const SurfaceModel& surf = spec.surface();
  const Vec2 p = rec.location;
  double d = 0.45 * std::min({std::abs(p.x - surf.domain_xmin()),
                              std::abs(surf.domain_xmax() - p.x),
                              std::abs(p.y - surf.domain_ymin()),
                              std::abs(surf.domain_ymax() - p.y), 1.2});
  auto [eu, es] = oriented_saddle_frame(spec, p, d);
  Vec2 diag = (eu + es).normalized();

  // ramification k from the vanishing order of F along the diagonal:
  // F - F(p) ~ C t^(k(a+b))
  {
    std::vector<double> A, bv;
    std::size_t m = 0;
    for (int i = 0; i < 14; ++i) {
      double t = d * 0.5 * std::pow(0.8, i);
      double w = std::abs(spec.integral(p + diag * t) - rec.integral_value);
      if (w <= 0) continue;
      A.push_back(1.0);
      A.push_back(std::log(t));
      bv.push_back(std::log(w));
      ++m;
    }
    if (m < 6) throw ClassifyError("cannot measure the integral vanishing order");
    auto slope_fit = solve_least_squares(A, m, 2, bv);
    double order = slope_fit[1];
    double k_est = order / (out.a + out.b);
    long k = std::lround(k_est);
    if (k < 1 || std::abs(k_est - static_cast<double>(k)) > 0.05)
      throw ClassifyError("integral vanishing order is not an integer multiple of a+b");
    out.ramification = static_cast<int>(k);
  }

  // transit-time ladder; sections sit on the separatrices at distance d
  Vec2 base_in = p + es * d;
  Vec2 base_out = p + eu * d;
  std::vector<std::pair<double, double>> lad;  // (t = |dF|^(1/k), T)
  std::vector<std::pair<double, double>> raw;  // (dF, T) for the log fit
  OdeOptions opts;
  opts.rel_tol = 1e-11;
  for (int i = 0; i < 24; ++i) {
    double delta = 0.5 * d * std::pow(0.76, i);
    Vec2 q = p + diag * delta;
    double dF = spec.integral(q) - rec.integral_value;
    if (dF == 0.0) continue;
    try {
      auto fwd = section_crossing(spec, q, base_out, eu, 4000.0, 1e-9, 0, opts);
      auto bwd = section_crossing(spec, q, base_in, es, -4000.0, 1e-9, 0, opts);
      if (!fwd || !bwd) continue;
      double T = fwd->time - bwd->time;
      raw.emplace_back(dF, T);
    } catch (const OdeError&) {
      continue;
    }
  }
  if (raw.size() < 3 * static_cast<std::size_t>(2) + 2)
    throw ClassifyError("too few transit samples near the saddle");
  (void)lad;

  // T(F) = A(t) log|dF| + B(t), t = |dF|^(1/k); h series = -1/(k A(t))
  int fit_order = std::min(tol.series_order, 4);
  std::vector<std::pair<double, double>> samples;
  double tau = raw.front().first > 0 ? 1.0 : -1.0;
  for (auto& [dF, T] : raw) {
    if (dF * tau <= 0) continue;
    samples.emplace_back(std::pow(tau * dF, 1.0 / out.ramification), T);
  }
  // log channel in |dF| = t^k: A(t) log(t^k) = k A(t) log t
  std::vector<std::pair<double, double>> logsamples;
  for (auto& [t, T] : samples) logsamples.emplace_back(t, T);
  auto lf = puiseux_log_fit(logsamples, 1, fit_order, 5e-3);
  out.fit_residual = lf.residual;
  if (!lf.accepted) throw ClassifyError("frequency fit residual too large");
  // T = Ahat(t) log t + B(t) with Ahat = k A; h = -1/(k A) = -k / (k Ahat) ...
  PuiseuxSeries minus_kA = lf.log_part;
  for (auto& cv : minus_kA.coefficients) cv = -cv / 1.0;
  // Ahat = k*A so A = Ahat / k and h = -1/(k A) = -1/Ahat
  out.frequency = puiseux_reciprocal(minus_kA);
  out.frequency.base_variable = "F^(1/" + std::to_string(out.ramification) + ")";
  out.frequency_fitted = true;
  return out;
}

// ---------------------------------------------------------------------------
// Type IV: nilpotent invariants
// ---------------------------------------------------------------------------

NilpotentData nilpotent_invariants(const SystemSpec& spec, const SingularPointRecord& rec,
                                   const Tolerances& tol) {
  if (rec.type != SingularityType::IV)
    throw ClassifyError("nilpotent_invariants needs a Type IV point");
  NilpotentData out;
  const Vec2 p = rec.location;
  const SurfaceModel& surf = spec.surface();
  double reach = 0.8 * std::min({std::abs(p.x - surf.domain_xmin()),
                                 std::abs(surf.domain_xmax() - p.x), 2.0});
  if (surf.kind != SurfaceKind::FlatTorus) {
    reach = std::min(reach, 0.8 * std::min(std::abs(p.y - surf.domain_ymin()),
                                           std::abs(surf.domain_ymax() - p.y)));
  }
  auto arc = trace_singular_curve(spec, p, std::max(0.9, 1.6 * reach), 2e-3);

  // arclength parametrization with u = 0 at the nilpotent point
  std::size_t i0 = 0;
  double best = 1e300;
  for (std::size_t i = 0; i < arc.size(); ++i) {
    double dd = (arc[i] - p).norm();
    if (dd < best) {
      best = dd;
      i0 = i;
    }
  }
  std::vector<double> u(arc.size(), 0.0);
  for (std::size_t i = i0 + 1; i < arc.size(); ++i)
    u[i] = u[i - 1] + (arc[i] - arc[i - 1]).norm();
  for (std::size_t i = i0; i-- > 0;) u[i] = u[i + 1] - (arc[i + 1] - arc[i]).norm();

  // integral sign along the curve
  double wmax = 0.0;
  for (std::size_t i = 0; i < arc.size(); ++i) {
    double w = spec.integral(arc[i]) - rec.integral_value;
    if (std::abs(w) > std::abs(wmax)) wmax = w;
  }
  if (wmax == 0.0) throw ClassifyError("integral flat along the singular curve");
  out.integral_sign = wmax > 0 ? +1 : -1;

  // the Morse chart is valid until the next critical point of F along the
  // curve: keep, per side, only the prefix where F moves monotonically away
  // from the level of p, and cap at 60% of the smaller side to stay away
  // from the turning region
  auto w_of = [&](std::size_t i) {
    return out.integral_sign * (spec.integral(arc[i]) - rec.integral_value);
  };
  double w_cap_pos = 0.0, w_cap_neg = 0.0;
  {
    double prev = -1e300;
    for (std::size_t i = i0; i < arc.size(); ++i) {
      double w = w_of(i);
      if (w < prev - 1e-12 * (1 + std::abs(prev))) break;
      w_cap_pos = std::max(w_cap_pos, w);
      prev = w;
    }
    prev = -1e300;
    for (std::size_t i = i0 + 1; i-- > 0;) {
      double w = w_of(i);
      if (w < prev - 1e-12 * (1 + std::abs(prev))) break;
      w_cap_neg = std::max(w_cap_neg, w);
      prev = w;
    }
  }
  double w_reach = std::min(w_cap_pos, w_cap_neg);
  if (w_reach <= 0.0) w_reach = std::max(w_cap_pos, w_cap_neg);
  if (w_reach <= 0.0) throw ClassifyError("integral flat along the singular curve");

  // Morse coordinate x = sign(u) sqrt(tau (F - F(p))); shrink the window
  // until the truncated series meets the residual contract
  const int order = tol.series_order;
  PuiseuxFitResult fit;
  bool fitted = false;
  for (double cap_factor : {0.6, 0.3, 0.15, 0.075, 0.04, 0.02}) {
    double w_cap = cap_factor * w_reach;
    std::vector<std::pair<double, double>> samples;
    for (std::size_t i = 0; i < arc.size(); ++i) {
      double w = w_of(i);
      if (w < 0 || w > w_cap) continue;
      double x = (u[i] >= 0 ? 1.0 : -1.0) * std::sqrt(w);
      double j[4];
      spec.jacobian(arc[i], j);
      samples.emplace_back(x, j[0] + j[3]);
    }
    std::sort(samples.begin(), samples.end());
    if (samples.size() < std::max<std::size_t>(20, 2 * (order + 1))) continue;
    auto trial = puiseux_fit(samples, 1, order, 1.0);
    if (trial.residual <= 1e-6 * trial.scale) {
      fit = trial;
      out.eigenvalue_samples = std::move(samples);
      fitted = true;
      break;
    }
    if (!fitted) {
      fit = trial;
      out.eigenvalue_samples = samples;  // keep the widest attempt for reporting
    }
  }
  out.fit_residual = fit.residual;
  if (!fitted || fit.residual > 1e-6 * fit.scale)
    throw ClassifyError("eigenvalue fit residual above 1e-6");

  // normalization E'(0) < 0: flip the parametrization if needed
  if (fit.series.coefficients.size() > 1 && fit.series.coefficients[1] > 0) {
    for (auto& [x, e] : out.eigenvalue_samples) x = -x;
    std::sort(out.eigenvalue_samples.begin(), out.eigenvalue_samples.end());
    fit = puiseux_fit(out.eigenvalue_samples, 1, order, 1.0);
    out.fit_residual = fit.residual;
  }
  out.eigencurve = fit.series;
  out.eigencurve.base_variable = "x";

  out.branch_plus.base_variable = "F";
  out.branch_plus.ramification = 2;
  out.branch_plus.branch_id = +1;
  out.branch_minus.base_variable = "F";
  out.branch_minus.ramification = 2;
  out.branch_minus.branch_id = -1;
  out.branch_plus.coefficients = out.eigencurve.coefficients;
  out.branch_minus.coefficients = out.eigencurve.coefficients;
  for (std::size_t m = 1; m < out.branch_minus.coefficients.size(); m += 2)
    out.branch_minus.coefficients[m] = -out.branch_minus.coefficients[m];
  return out;
}

}  // namespace isl
