#include "isl/invariants.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>

namespace isl {

namespace {

// regular start point for a loop traversal: far from every zero
double regular_start(const ReducedFlow& rf) {
  const double L = rf.length();
  if (rf.zeros().empty()) return 0.0;
  double best_s = 0.0, best_d = -1.0;
  for (int i = 0; i < 64; ++i) {
    double s = L * i / 64.0;
    double d = 1e300;
    for (const auto& z : rf.zeros()) {
      double dd = std::abs(s - z.s);
      d = std::min(d, std::min(dd, L - dd));
    }
    if (d > best_d) {
      best_d = d;
      best_s = s;
    }
  }
  return best_s;
}

// displacement from base to q, reduced to the nearest periodic representative
Vec2 reduced_delta(const SurfaceModel& surf, const Vec2& q, const Vec2& base) {
  Vec2 d = q - base;
  if (surf.periodic_x()) {
    double L = surf.domain_xmax() - surf.domain_xmin();
    d.x -= std::round(d.x / L) * L;
  }
  if (surf.periodic_y()) {
    double L = surf.domain_ymax() - surf.domain_ymin();
    d.y -= std::round(d.y / L) * L;
  }
  return d;
}

// arclength of the crossing of a section line closest to the section base
// (the infinite line may cut a closed curve several times)
std::optional<double> section_crossing_arc(const SurfaceModel& surf, const LevelCurve& curve,
                                           Vec2 base, Vec2 normal, double s_lo, double s_hi) {
  auto g = [&](double s) { return reduced_delta(surf, curve.at(s), base).dot(normal); };
  const int n = 600;
  double prev = g(s_lo);
  std::optional<double> best;
  double best_d = 1e300;
  auto consider = [&](double s) {
    double d = reduced_delta(surf, curve.at(s), base).norm();
    if (d < best_d) {
      best_d = d;
      best = s;
    }
  };
  for (int i = 1; i <= n; ++i) {
    double s = s_lo + (s_hi - s_lo) * i / n;
    double cur = g(s);
    if (cur == 0.0)
      consider(s);
    else if (prev * cur < 0)
      consider(find_root(g, s_lo + (s_hi - s_lo) * (i - 1) / n, s, 1e-13));
    prev = cur;
  }
  return best;
}

// On a closed curve two arcs join the crossings; integrate over the one that
// passes (want_near = true) or avoids (false) the ball around p.
double arc_time(const SystemSpec& spec, const ReducedFlow& rf, const LevelCurve& curve,
                double s_start, double s_end, bool want_near, Vec2 p, double radius,
                const Tolerances& tol) {
  if (!curve.closed) return compensated_time(rf, s_start, s_end, tol).finite;
  const double L = curve.length();
  double s_lo = std::min(s_start, s_end), s_hi = std::max(s_start, s_end);
  bool inner_near = false;
  const SurfaceModel& surf = spec.surface();
  for (int k = 1; k < 24; ++k) {
    Vec2 q = curve.at(s_lo + (s_hi - s_lo) * k / 24.0);
    if ((surf.wrap(q) - surf.wrap(p)).norm() < radius) inner_near = true;
  }
  double target = s_end;
  if (inner_near != want_near) target = s_end > s_start ? s_end - L : s_end + L;
  return compensated_time(rf, s_start, target, tol).finite;
}

// transit time from s_start to the crossing at s_end along the arc that hugs
// the given reference polyline (max deviation smallest)
double arc_time_near_polyline(const SystemSpec& spec, const ReducedFlow& rf,
                              const LevelCurve& curve, double s_start, double s_end,
                              const std::vector<Vec2>& reference, const Tolerances& tol) {
  if (!curve.closed) return compensated_time(rf, s_start, s_end, tol).finite;
  const SurfaceModel& surf = spec.surface();
  auto deviation = [&](double a, double b) {
    double worst = 0.0;
    for (int k = 1; k < 24; ++k) {
      Vec2 q = surf.wrap(curve.at(a + (b - a) * k / 24.0));
      double best = 1e300;
      for (const auto& r : reference) best = std::min(best, (q - surf.wrap(r)).norm());
      worst = std::max(worst, best);
    }
    return worst;
  };
  double alt = s_end > s_start ? s_end - curve.length() : s_end + curve.length();
  double target = deviation(s_start, s_end) <= deviation(s_start, alt) ? s_end : alt;
  return compensated_time(rf, s_start, target, tol).finite;
}

}  // namespace

double monodromy_of_curve(const SystemSpec& spec, const LevelCurve& curve, int orientation,
                          const Tolerances& tol) {
  if (!curve.closed) throw InvariantError("monodromy needs a closed level curve");
  ReducedFlow rf(spec, curve, tol);
  for (const auto& z : rf.zeros())
    if (!z.simple) throw InvariantError("non-simple zero on the level circle");
  double s0 = regular_start(rf);
  double mu = compensated_time(rf, s0, s0 + rf.length(), tol).finite;
  return orientation > 0 ? mu : -mu;
}

double monodromy_by_jumps(const SystemSpec& spec, const LevelCurve& curve, double window_scale,
                          int orientation, const Tolerances& tol) {
  if (!curve.closed) throw InvariantError("monodromy needs a closed level curve");
  ReducedFlow rf(spec, curve, tol);
  const double L = rf.length();
  const auto& zs = rf.zeros();
  if (zs.empty()) return monodromy_of_curve(spec, curve, orientation, tol);

  double s0 = regular_start(rf);
  std::vector<std::pair<double, std::size_t>> stops;  // (unrolled s, zero index)
  for (std::size_t i = 0; i < zs.size(); ++i) {
    double s = zs[i].s;
    while (s < s0) s += L;
    stops.emplace_back(s, i);
  }
  std::sort(stops.begin(), stops.end());

  double mu = 0.0;
  double cur = s0;
  for (const auto& [sz, zi] : stops) {
    LinearizingCoordinate lc(rf, zi, window_scale);
    double w = 0.6 * lc.window();
    // flow to a point just before the zero, reflect, continue from the image
    mu += compensated_time(rf, cur, sz - w, tol).finite;
    double post_local = lc.jump(zs[zi].s - w);
    cur = sz + (post_local - zs[zi].s);
  }
  mu += compensated_time(rf, cur, s0 + L, tol).finite;
  return orientation > 0 ? mu : -mu;
}

MonodromyRecord monodromy_function(const SystemSpec& spec, const ReebGraph& graph, int edge_id,
                                   int orientation, int levels, const Tolerances& tol) {
  const ReebEdge& edge = graph.edges.at(edge_id);
  MonodromyRecord rec;
  rec.edge_id = edge_id;
  rec.orientation = orientation;
  double lo = edge.level_lo, hi = edge.level_hi;
  double pad = 0.08 * (hi - lo);
  for (int i = 0; i < levels; ++i) {
    double c = lo + pad + (hi - lo - 2 * pad) * (i + 0.5) / levels;
    Vec2 seed;
    try {
      seed = walk_to_level(spec, edge.seed, c, 12);
    } catch (const ReebError&) {
      continue;
    }
    LevelCurve curve = trace_level_curve(spec, seed, tol);
    if (!curve.closed) continue;
    rec.samples.emplace_back(c, monodromy_of_curve(spec, curve, orientation, tol));
  }
  if (rec.samples.size() >= 8) {
    auto fit = puiseux_fit(rec.samples, 1, 3, 1e30);
    rec.fit = fit.series;
    rec.fit.base_variable = "F";
    rec.fitted = true;
  }
  return rec;
}

// ---------------------------------------------------------------------------
// Period cocycle.
// ---------------------------------------------------------------------------

PeriodCocycle period_cocycle(const SystemSpec& spec, const ReebGraph& graph, int vertex_id,
                             double section_offset, int levels, const Tolerances& tol) {
  const ReebVertex& vert = graph.vertices.at(vertex_id);
  if (vert.structure.is_point || vert.structure.graph.vertices.empty())
    throw InvariantError("period cocycle needs a Type III level set");
  if (vert.structure.mixed_iii_iv)
    throw InvariantError("mixed Type III-IV level set: regularized cocycles unsupported");
  const SurfaceModel& surf = spec.surface();
  const double c0 = vert.level;

  PeriodCocycle out;
  out.vertex_id = vertex_id;
  out.section_offset = section_offset;

  MultiplicityReport mult = level_multiplicities(spec, graph, vertex_id, tol);
  const LevelSetGraph& lg = vert.structure.graph;

  for (std::size_t vi = 0; vi < lg.vertices.size(); ++vi) {
    SingularPointRecord rec = classify(spec, lg.vertices[vi], tol);
    ResonanceData res = resonance_and_frequency(spec, rec, tol, false);
    CocyclePointData pd;
    pd.a = res.a;
    pd.b = res.b;
    double jm[4];
    spec.jacobian(lg.vertices[vi], jm);
    double tr = jm[0] + jm[3], det = jm[0] * jm[3] - jm[1] * jm[2];
    double sq = std::sqrt(std::max(0.0, tr * tr - 4 * det));
    auto eigvec = [&](double l) -> Vec2 {
      double a = jm[0] - l, bb = jm[1], cc = jm[2], dd = jm[3] - l;
      Vec2 w = (std::abs(a) + std::abs(bb) >= std::abs(cc) + std::abs(dd)) ? Vec2{-bb, a}
                                                                           : Vec2{-dd, cc};
      return w.normalized();
    };
    Vec2 ud = eigvec(0.5 * (tr + sq));
    for (std::size_t e = 0; e < lg.edges.size(); ++e) {
      const auto& ge = lg.edges[e];
      auto end_dir = [&](bool at_start) {
        const auto& pts = ge.curve.points;
        std::size_t k = std::min<std::size_t>(2, pts.size() - 1);
        return at_start ? (pts[k] - pts[0]).normalized()
                        : (pts[pts.size() - 1 - k] - pts.back()).normalized();
      };
      if (ge.from_vertex == static_cast<int>(vi))
        (std::abs(end_dir(true).dot(ud)) > 0.8 ? pd.u_ends : pd.s_ends).emplace_back(e, 0);
      if (ge.to_vertex == static_cast<int>(vi))
        (std::abs(end_dir(false).dot(ud)) > 0.8 ? pd.u_ends : pd.s_ends).emplace_back(e, 1);
    }
    // k: transverse vanishing order across the unstable circle is k*b
    pd.k = 1;
    for (std::size_t ci = 0; ci < vert.structure.circles.size(); ++ci)
      for (int eid : vert.structure.circles[ci].edge_ids)
        for (const auto& [ue, uend] : pd.u_ends)
          if (eid == ue) pd.k = std::max(1, static_cast<int>(mult.orders[ci] / pd.b));
    out.points.push_back(std::move(pd));
  }

  for (std::size_t e = 0; e < lg.edges.size(); ++e) {
    const LevelCurve& sep = lg.edges[e].curve;
    const double L = sep.length();
    if (L < 2.5 * section_offset)
      throw InvariantError("separatrix edge too short for the requested sections");
    double sA = section_offset, sB = L - section_offset;
    Vec2 baseA = sep.at(sA), tA = sep.tangent(sA);
    Vec2 baseB = sep.at(sB), tB = sep.tangent(sB);
    int m_E = 1;
    for (std::size_t ci = 0; ci < vert.structure.circles.size(); ++ci)
      for (int eid : vert.structure.circles[ci].edge_ids)
        if (eid == static_cast<int>(e)) m_E = static_cast<int>(mult.orders[ci]);

    std::vector<std::pair<double, double>> samples;
    Vec2 nuA = tA.perp();
    for (int side = 0; side < 2; ++side) {
      double dir = side == 0 ? 1.0 : -1.0;
      for (int i = 0; i < levels; ++i) {
        double t_off = dir * 0.12 * std::pow(0.72, i);
        Vec2 q = baseA + nuA * t_off;
        if (!surf.contains(q, 1e-6)) continue;
        double c = spec.integral(q);
        if (std::abs(c - c0) < 1e-12 * (1 + std::abs(c0))) continue;
        LevelCurve lcv;
        try {
          lcv = trace_level_curve(spec, q, tol);
        } catch (const FlowError&) {
          continue;
        }
        ReducedFlow rf(spec, lcv, tol);
        auto sa = section_crossing_arc(surf, lcv, baseA, tA, 0.0, lcv.length());
        if (!sa) continue;
        auto sb = section_crossing_arc(surf, lcv, baseB, tB, 0.0, lcv.length());
        if (!sb) continue;
        // reference: the part of the separatrix between the sections
        std::vector<Vec2> reference;
        for (int k = 0; k <= 32; ++k) reference.push_back(sep.at(sA + (sB - sA) * k / 32.0));
        double time;
        try {
          time = arc_time_near_polyline(spec, rf, lcv, *sa, *sb, reference, tol);
        } catch (const FlowError&) {
          continue;
        }
        samples.emplace_back(c - c0, time);
      }
      if (m_E % 2 == 0 && samples.size() >= static_cast<std::size_t>(levels)) break;
    }
    std::vector<std::pair<double, double>> fit_samples;
    for (auto& [dc, T] : samples) {
      if (m_E % 2 == 0 && dc < 0) continue;
      fit_samples.emplace_back(dc, T);
    }
    int order = std::min(tol.series_order, 6);
    while (fit_samples.size() < 2 * static_cast<std::size_t>(order + 1) && order > 1) --order;
    if (fit_samples.size() < 2 * static_cast<std::size_t>(order + 1))
      throw InvariantError("too few cocycle samples on edge " + std::to_string(e));
    auto fit = puiseux_fit(fit_samples, m_E, order, 1e30);
    if (fit.residual > tol.fit_residual * fit.scale)
      throw InvariantError("cocycle fit residual too large on edge " + std::to_string(e));
    fit.series.base_variable = "F";
    out.components.push_back(fit.series);
    out.ramifications.push_back(m_E);
  }
  return out;
}

std::vector<PuiseuxSeries> normalize_cocycle(const PeriodCocycle& cocycle, int order) {
  const std::size_t ne = cocycle.components.size();
  int lcm_k = 1;
  for (int m : cocycle.ramifications) lcm_k = std::lcm(lcm_k, m);
  for (const auto& pd : cocycle.points) lcm_k = std::lcm(lcm_k, pd.k);

  int J;
  if (order < 0) {
    J = 0;
    for (const auto& comp : cocycle.components)
      J = std::max(J, comp.order() * (lcm_k / comp.ramification));
  } else {
    J = order * lcm_k;
  }
  J = std::min(J, 64);
  const std::size_t dim = ne * static_cast<std::size_t>(J + 1);

  std::vector<double> v(dim, 0.0);
  for (std::size_t e = 0; e < ne; ++e) {
    PuiseuxSeries l = cocycle.components[e].with_ramification(lcm_k);
    l.coefficients.resize(J + 1, 0.0);
    for (int j = 0; j <= J; ++j) v[static_cast<std::size_t>(j) * ne + e] = l.coefficients[j];
  }

  // coboundary generators: per point and pair, each exponent i/k adds one to
  // that coefficient on every edge-end of the pair
  std::vector<std::vector<double>> gens;
  for (const auto& pd : cocycle.points) {
    for (int pair = 0; pair < 2; ++pair) {
      const auto& ends = pair == 0 ? pd.u_ends : pd.s_ends;
      if (ends.empty()) continue;
      int stride = lcm_k / pd.k;
      for (int i = 0; i * stride <= J; ++i) {
        std::vector<double> col(dim, 0.0);
        for (const auto& [eid, end] : ends)
          col[static_cast<std::size_t>(i) * stride * ne + eid] += 1.0;
        gens.push_back(std::move(col));
      }
    }
  }

  // deterministic pivot elimination in (exponent, edge id) coefficient order
  std::vector<bool> pivot_used(dim, false);
  for (std::size_t gi = 0; gi < gens.size(); ++gi) {
    auto& g = gens[gi];
    std::size_t piv = dim;
    for (std::size_t idx = 0; idx < dim; ++idx) {
      if (std::abs(g[idx]) > 1e-12 && !pivot_used[idx]) {
        piv = idx;
        break;
      }
    }
    if (piv == dim) continue;
    pivot_used[piv] = true;
    double f = v[piv] / g[piv];
    for (std::size_t idx = 0; idx < dim; ++idx) v[idx] -= f * g[idx];
    for (std::size_t hj = 0; hj < gens.size(); ++hj) {
      if (hj == gi) continue;
      auto& h = gens[hj];
      if (std::abs(h[piv]) < 1e-14) continue;
      double hf = h[piv] / g[piv];
      for (std::size_t idx = 0; idx < dim; ++idx) h[idx] -= hf * g[idx];
    }
  }

  std::vector<PuiseuxSeries> out(ne);
  for (std::size_t e = 0; e < ne; ++e) {
    out[e].base_variable = "F";
    out[e].ramification = lcm_k;
    out[e].coefficients.assign(J + 1, 0.0);
    for (int j = 0; j <= J; ++j)
      out[e].coefficients[j] = v[static_cast<std::size_t>(j) * ne + e];
  }
  return out;
}

PeriodCocycle apply_coboundary(
    const PeriodCocycle& base,
    const std::vector<std::pair<PuiseuxSeries, PuiseuxSeries>>& per_point_series) {
  if (per_point_series.size() != base.points.size())
    throw InvariantError("coboundary needs one (u, s) series pair per point");
  PeriodCocycle out = base;
  int lcm_k = 1;
  for (int m : base.ramifications) lcm_k = std::lcm(lcm_k, m);
  for (const auto& pd : base.points) lcm_k = std::lcm(lcm_k, pd.k);
  for (std::size_t e = 0; e < out.components.size(); ++e) {
    PuiseuxSeries comp = out.components[e].with_ramification(lcm_k);
    auto add_series = [&](const PuiseuxSeries& s) {
      PuiseuxSeries l = s.with_ramification(lcm_k);
      if (comp.coefficients.size() < l.coefficients.size())
        comp.coefficients.resize(l.coefficients.size(), 0.0);
      for (std::size_t j = 0; j < l.coefficients.size(); ++j)
        comp.coefficients[j] += l.coefficients[j];
    };
    for (std::size_t pi = 0; pi < base.points.size(); ++pi) {
      for (const auto& [eid, end] : base.points[pi].u_ends)
        if (eid == static_cast<int>(e)) add_series(per_point_series[pi].first);
      for (const auto& [eid, end] : base.points[pi].s_ends)
        if (eid == static_cast<int>(e)) add_series(per_point_series[pi].second);
    }
    out.components[e] = comp;
    out.ramifications[e] = lcm_k;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Regularized time and monodromy (Type IV).
// ---------------------------------------------------------------------------

double singular_time_part(const NilpotentData& nil, double y) {
  if (y >= 0) return 0.0;
  // eigenvalue branch continued to y < 0: lambda(q1) = sum c_j (i sqrt(-y))^j
  std::complex<double> lam(0.0, 0.0);
  std::complex<double> root(0.0, std::sqrt(-y));
  std::complex<double> pw(1.0, 0.0);
  for (std::size_t j = 0; j < nil.branch_plus.coefficients.size(); ++j) {
    lam += nil.branch_plus.coefficients[j] * pw;
    pw *= root;
  }
  if (std::abs(lam) == 0.0) throw InvariantError("vanishing continued eigenvalue");
  std::complex<double> s = 2.0 * M_PI * std::complex<double>(0.0, 1.0) / lam;
  return s.real();
}

RegularizedTime regularized_time(const SystemSpec& spec, const SingularPointRecord& rec,
                                 double section_distance, double y_max, int levels,
                                 const Tolerances& tol, const std::vector<double>* explicit_y) {
  if (rec.type != SingularityType::IV)
    throw InvariantError("regularized time needs a Type IV point");
  NilpotentData nil = nilpotent_invariants(spec, rec, tol);
  RegularizedTime out;
  out.integral_sign = nil.integral_sign;
  const Vec2 p = rec.location;
  const SurfaceModel& surf = spec.surface();

  Vec2 et = spec.integral_gradient(p).perp().normalized();
  if (et.x < 0 || (et.x == 0 && et.y < 0)) et = et * -1.0;
  Vec2 base1 = p - et * section_distance;
  Vec2 base2 = p + et * section_distance;
  if (!surf.contains(base1, 1e-9) || !surf.contains(base2, 1e-9))
    throw InvariantError("sections outside the surface domain");

  OdeOptions opts;
  opts.rel_tol = 1e-11;
  opts.max_step = 0.2;

  auto seed_on_section = [&](Vec2 base, Vec2 normal, double target_c) -> std::optional<Vec2> {
    Vec2 along = normal.perp();
    auto g = [&](double t) { return spec.integral(base + along * t) - target_c; };
    double lim = 0.45 * std::max(section_distance, 1.0);
    double prev = g(-lim);
    const int n = 400;
    for (int i = 1; i <= n; ++i) {
      double t = -lim + 2 * lim * i / n;
      double cur = g(t);
      if (cur == 0.0) return base + along * t;
      if (prev * cur < 0) {
        double troot = find_root(g, t - 2 * lim / n, t, 1e-14);
        return base + along * troot;
      }
      prev = cur;
    }
    return std::nullopt;
  };

  (void)opts;
  std::vector<double> ladder;
  if (explicit_y) {
    ladder = *explicit_y;
  } else {
    for (int i = 0; i < levels; ++i) {
      double ymag = y_max * std::pow(0.78, i);
      ladder.push_back(ymag);
      ladder.push_back(-ymag);
    }
  }
  for (double y : ladder) {
    {
      double c = rec.integral_value + y * nil.integral_sign;
      auto q1 = seed_on_section(base1, et, c);
      if (!q1) continue;
      // transit time between the sections across the parabolic region; the
      // y > 0 side carries the pair of Type II zeros, handled by the PV rule
      LevelCurve lcv;
      try {
        lcv = trace_level_curve(spec, *q1, tol);
      } catch (const FlowError&) {
        continue;
      }
      ReducedFlow rf(spec, lcv, tol);
      auto sa = section_crossing_arc(surf, lcv, base1, et, 0.0, lcv.length());
      if (!sa) continue;
      auto sb = section_crossing_arc(surf, lcv, base2, et, 0.0, lcv.length());
      if (!sb) continue;
      double time;
      try {
        time = arc_time(spec, rf, lcv, *sa, *sb, true, p, 1.2 * section_distance, tol);
      } catch (const FlowError&) {
        continue;
      }
      out.raw.emplace_back(y, time);
      out.regularized.emplace_back(y, time - singular_time_part(nil, y));
    }
  }
  if (out.regularized.size() < std::min<std::size_t>(12, ladder.size()))
    throw InvariantError("too few regularized-time samples");
  std::sort(out.regularized.begin(), out.regularized.end());
  std::sort(out.raw.begin(), out.raw.end());
  auto fit = puiseux_fit(out.regularized, 1, 4, 1e30);
  out.smooth_fit = fit.series;
  out.smooth_fit.base_variable = "y";
  out.at_zero = fit.series.coefficients[0];
  out.slope = fit.series.coefficients[1];
  return out;
}

RegularizedMonodromy regularized_monodromy(const SystemSpec& spec, const ReebGraph& graph,
                                           int vertex_id, double section_distance, double y_max,
                                           int levels, int orientation, const Tolerances& tol) {
  const ReebVertex& vert = graph.vertices.at(vertex_id);
  if (vert.structure.mixed_iii_iv)
    throw InvariantError("mixed Type III-IV level set: unsupported");
  int iv_count = 0, iv_record = -1;
  for (int rid : vert.structure.point_record_ids) {
    if (graph.classification.points[rid].type == SingularityType::IV) {
      ++iv_count;
      iv_record = rid;
    }
    if (graph.classification.points[rid].type == SingularityType::III)
      throw InvariantError("mixed Type III-IV level set: unsupported");
  }
  if (iv_count != 1)
    throw InvariantError("regularized monodromy needs exactly one Type IV point on the level");

  const SingularPointRecord& rec = graph.classification.points[iv_record];
  RegularizedMonodromy out;
  out.orientation = orientation;
  out.transit = regularized_time(spec, rec, section_distance, y_max, levels, tol);

  NilpotentData nil = nilpotent_invariants(spec, rec, tol);
  const Vec2 p = rec.location;
  Vec2 et = spec.integral_gradient(p).perp().normalized();
  if (et.x < 0 || (et.x == 0 && et.y < 0)) et = et * -1.0;
  Vec2 base1 = p - et * section_distance;
  Vec2 base2 = p + et * section_distance;

  for (const auto& [y, t_hat] : out.transit.regularized) {
    double c = rec.integral_value + y * nil.integral_sign;
    Vec2 seed;
    try {
      seed = walk_to_level(spec, base2, c, 12);
    } catch (const ReebError&) {
      continue;
    }
    LevelCurve curve;
    try {
      curve = trace_level_curve(spec, seed, tol);
    } catch (const FlowError&) {
      continue;
    }
    if (!curve.closed) continue;
    ReducedFlow rf(spec, curve, tol);
    auto sb = section_crossing_arc(spec.surface(), curve, base2, et, 0.0, curve.length());
    if (!sb) continue;
    auto sa = section_crossing_arc(spec.surface(), curve, base1, et, 0.0, curve.length());
    if (!sa) continue;
    // return leg from B back to A around the globe, avoiding the parabolic arc
    double r;
    try {
      r = arc_time(spec, rf, curve, *sb, *sa, false, p, 1.2 * section_distance, tol);
    } catch (const FlowError&) {
      continue;
    }
    double m = t_hat + r;
    out.monodromy.emplace_back(y, orientation > 0 ? m : -m);
    if (y >= 0) out.truncated.emplace_back(y, orientation > 0 ? m : -m);
  }
  if (out.monodromy.size() < 10) throw InvariantError("too few monodromy samples");
  std::sort(out.monodromy.begin(), out.monodromy.end());
  std::sort(out.truncated.begin(), out.truncated.end());
  auto fit = puiseux_fit(out.monodromy, 1, 4, 1e30);
  out.smooth_fit = fit.series;
  out.smooth_fit.base_variable = "y";
  out.taylor_at_zero = fit.series.coefficients;
  return out;
}

}  // namespace isl
