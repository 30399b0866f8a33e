#include "isl/equivalence.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numeric>

namespace isl {

namespace {

constexpr long kNodeBudget = 100000;

VertexLabel label_of(const ReebGraph& g, int v, const Tolerances& tol,
                     const SystemSpec& spec) {
  const ReebVertex& vert = g.vertices[v];
  VertexLabel lab;
  lab.is_point = vert.structure.is_point;
  lab.type2_count = vert.structure.type2_count;
  lab.circle_count = static_cast<int>(vert.structure.circles.size());
  lab.twisted = vert.structure.twisted;
  for (int rid : vert.structure.point_record_ids) {
    switch (g.classification.points[rid].type) {
      case SingularityType::I: ++lab.n_type1; break;
      case SingularityType::III: {
        ++lab.n_type3;
        ResonanceData res =
            resonance_and_frequency(spec, g.classification.points[rid], tol, false);
        lab.resonances.emplace_back(res.a, res.b);
        break;
      }
      case SingularityType::IV: ++lab.n_type4; break;
      default: break;
    }
  }
  std::sort(lab.resonances.begin(), lab.resonances.end());
  for (const auto& e : g.edges)
    if (e.from == v || e.to == v) ++lab.degree;
  return lab;
}

struct EdgeKey {
  int a, b;  // mapped endpoint pair (sorted; -1 for open)
  bool cycle, twisted;
  int type2;
  bool operator==(const EdgeKey& o) const = default;
  bool operator<(const EdgeKey& o) const {
    return std::tie(a, b, cycle, twisted, type2) <
           std::tie(o.a, o.b, o.cycle, o.twisted, o.type2);
  }
};

EdgeKey edge_key(const ReebEdge& e, const std::vector<int>& vmap, bool map_endpoints) {
  int a = e.from, b = e.to;
  if (map_endpoints) {
    a = a >= 0 ? vmap[a] : -1;
    b = b >= 0 ? vmap[b] : -1;
  }
  if (a > b) std::swap(a, b);
  return {a, b, e.cycle, e.twisted, e.type2_crossings};
}

// backtracking search for a label- and adjacency-preserving vertex bijection
bool find_matching(const SystemAnalysis& A, const SystemAnalysis& B, std::vector<int>& vmap,
                   std::vector<std::pair<int, int>>& edge_match, long& budget) {
  const std::size_t n = A.graph.vertices.size();
  if (n != B.graph.vertices.size()) return false;
  if (A.graph.edges.size() != B.graph.edges.size()) return false;

  std::vector<int> perm(n, -1);
  std::vector<bool> used(n, false);

  std::function<bool(std::size_t)> rec = [&](std::size_t i) -> bool {
    if (--budget < 0) return false;
    if (i == n) {
      std::vector<EdgeKey> ka, kb;
      for (const auto& e : A.graph.edges) ka.push_back(edge_key(e, perm, true));
      std::vector<int> id(n);
      std::iota(id.begin(), id.end(), 0);
      for (const auto& e : B.graph.edges) kb.push_back(edge_key(e, id, true));
      std::vector<EdgeKey> sa = ka, sb = kb;
      std::sort(sa.begin(), sa.end());
      std::sort(sb.begin(), sb.end());
      if (!(sa == sb)) return false;
      edge_match.clear();
      std::vector<bool> taken(kb.size(), false);
      for (std::size_t ea = 0; ea < ka.size(); ++ea) {
        for (std::size_t eb = 0; eb < kb.size(); ++eb) {
          if (!taken[eb] && ka[ea] == kb[eb]) {
            taken[eb] = true;
            edge_match.emplace_back(static_cast<int>(ea), static_cast<int>(eb));
            break;
          }
        }
      }
      return edge_match.size() == ka.size();
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (used[j]) continue;
      if (!(A.labels[i] == B.labels[j])) continue;
      perm[i] = static_cast<int>(j);
      used[j] = true;
      if (rec(i + 1)) return true;
      used[j] = false;
      perm[i] = -1;
    }
    return false;
  };

  if (n == 0) {
    // vertexless graphs: edges must biject directly
    std::vector<EdgeKey> ka, kb;
    std::vector<int> empty;
    for (const auto& e : A.graph.edges) ka.push_back(edge_key(e, empty, false));
    for (const auto& e : B.graph.edges) kb.push_back(edge_key(e, empty, false));
    std::sort(ka.begin(), ka.end());
    std::sort(kb.begin(), kb.end());
    if (!(ka == kb)) return false;
    edge_match.clear();
    for (std::size_t e = 0; e < A.graph.edges.size(); ++e)
      edge_match.emplace_back(static_cast<int>(e), static_cast<int>(e));
    vmap.clear();
    return true;
  }

  if (!rec(0)) return false;
  vmap = perm;
  return true;
}

}  // namespace

SystemAnalysis analyze(const SystemSpec& spec, const Tolerances& tol) {
  SystemAnalysis out;
  out.graph = build_reeb_graph(spec, tol);
  for (std::size_t v = 0; v < out.graph.vertices.size(); ++v)
    out.labels.push_back(label_of(out.graph, static_cast<int>(v), tol, spec));
  return out;
}

EquivalenceVerdict orbital_equivalent(const SystemSpec& a, const SystemSpec& b,
                                      const Tolerances& tol) {
  EquivalenceVerdict verdict;
  verdict.kind = VerdictKind::Orbital;

  if (a.surface().orientable() != b.surface().orientable()) {
    verdict.result = VerdictResult::Inequivalent;
    verdict.witness = "surface orientability mismatch";
    return verdict;
  }

  SystemAnalysis A = analyze(a, tol);
  SystemAnalysis B = analyze(b, tol);

  auto counts = [](const SystemAnalysis& s) {
    std::array<int, 4> c{0, 0, 0, 0};
    for (const auto& rec : s.graph.classification.points) {
      switch (rec.type) {
        case SingularityType::I: ++c[0]; break;
        case SingularityType::III: ++c[2]; break;
        case SingularityType::IV: ++c[3]; break;
        default: break;
      }
    }
    c[1] = static_cast<int>(s.graph.classification.curves.size());
    return c;
  };
  if (counts(A) != counts(B)) {
    verdict.result = VerdictResult::Inequivalent;
    verdict.witness = "singular point type counts differ";
    return verdict;
  }

  {
    auto ratios = [&](const SystemAnalysis& s, const SystemSpec& spec) {
      std::vector<std::pair<int, int>> r;
      for (const auto& rec : s.graph.classification.points)
        if (rec.type == SingularityType::III) {
          ResonanceData res = resonance_and_frequency(spec, rec, tol, false);
          r.emplace_back(res.a, res.b);
        }
      std::sort(r.begin(), r.end());
      return r;
    };
    if (ratios(A, a) != ratios(B, b)) {
      verdict.result = VerdictResult::Inequivalent;
      verdict.witness = "eigenvalue ratio mismatch at Type III points";
      return verdict;
    }
  }

  long budget = kNodeBudget;
  std::vector<int> vmap;
  std::vector<std::pair<int, int>> emap;
  if (find_matching(A, B, vmap, emap, budget)) {
    verdict.result = VerdictResult::Equivalent;
    verdict.witness = "labeled Reeb graphs isomorphic";
    for (std::size_t i = 0; i < vmap.size(); ++i)
      verdict.vertex_matching.emplace_back(static_cast<int>(i), vmap[i]);
    verdict.edge_matching = emap;
    return verdict;
  }
  if (budget < 0) {
    verdict.result = VerdictResult::Inconclusive;
    verdict.witness = "graph matching exceeded the node budget";
    return verdict;
  }
  verdict.result = VerdictResult::Inequivalent;
  verdict.witness = "no label-preserving Reeb graph isomorphism";
  return verdict;
}

// ---------------------------------------------------------------------------
// Left-equivalence fitting.
// ---------------------------------------------------------------------------

namespace {

bool strictly_monotone(const std::vector<std::pair<double, double>>& f, double slack) {
  if (f.size() < 3) return false;
  int dir = 0;
  for (std::size_t i = 1; i < f.size(); ++i) {
    double d = f[i].second - f[i - 1].second;
    if (std::abs(d) <= slack) continue;
    int s = d > 0 ? 1 : -1;
    if (dir == 0) dir = s;
    if (s != dir) return false;
  }
  return dir != 0;
}

}  // namespace

LeftEquivalenceFit left_equivalence_fit(const std::vector<std::pair<double, double>>& f_in,
                                        const std::vector<std::pair<double, double>>& g_in,
                                        int knots, double tol_rel) {
  LeftEquivalenceFit out;
  if (f_in.size() < 4 || g_in.size() < 4) {
    out.failure = "too few samples";
    return out;
  }
  auto f = f_in, g = g_in;
  std::sort(f.begin(), f.end());
  std::sort(g.begin(), g.end());

  double f_lo = 1e300, f_hi = -1e300, g_lo = 1e300, g_hi = -1e300;
  for (auto& [t, v] : f) {
    f_lo = std::min(f_lo, v);
    f_hi = std::max(f_hi, v);
  }
  for (auto& [t, v] : g) {
    g_lo = std::min(g_lo, v);
    g_hi = std::max(g_hi, v);
  }
  double scale = std::max({1e-12, std::abs(f_lo), std::abs(f_hi), std::abs(g_lo),
                           std::abs(g_hi)});

  // constant functions: left equivalence preserves values exactly
  double f_spread = f_hi - f_lo, g_spread = g_hi - g_lo;
  if (f_spread <= 1e-6 * scale && g_spread <= 1e-6 * scale) {
    double gap = std::abs(0.5 * (f_lo + f_hi) - 0.5 * (g_lo + g_hi));
    if (gap <= tol_rel * scale) {
      out.success = true;
      out.residual = gap;
      out.psi = MonotoneCubic({f.front().first, f.back().first},
                              {g.front().first, g.back().first});
      out.derivative_min = out.derivative_max = 1.0;
      return out;
    }
    out.failure = "range mismatch: constant values differ";
    return out;
  }

  double overlap_lo = std::max(f_lo, g_lo), overlap_hi = std::min(f_hi, g_hi);
  if (overlap_hi - overlap_lo <= 0.25 * std::max(f_spread, g_spread)) {
    out.failure = "range mismatch: value sets barely overlap";
    return out;
  }

  // left equivalence matches critical points: a function with a vanishing
  // derivative somewhere cannot be aligned with one whose derivative is
  // bounded away from zero (the psi would blow up)
  auto slope_ratio = [](const std::vector<std::pair<double, double>>& s) {
    double dmin = 1e300, dmax = 0.0;
    for (std::size_t i = 1; i < s.size(); ++i) {
      double dt = s[i].first - s[i - 1].first;
      if (dt <= 0) continue;
      double d = std::abs((s[i].second - s[i - 1].second) / dt);
      dmin = std::min(dmin, d);
      dmax = std::max(dmax, d);
    }
    return dmax > 0 ? dmin / dmax : 1.0;
  };
  {
    double rf = slope_ratio(f), rg = slope_ratio(g);
    if ((rf < 0.02 && rg > 0.2) || (rg < 0.02 && rf > 0.2)) {
      out.failure =
          "reparametrization derivative blow-up: derivative vanishing mismatch";
      return out;
    }
  }

  if (strictly_monotone(f, 1e-12 * scale) && strictly_monotone(g, 1e-12 * scale)) {
    std::vector<double> gt, gv;
    for (auto& [tt, vv] : g) {
      gt.push_back(tt);
      gv.push_back(vv);
    }
    MonotoneCubic g_interp(gt, gv);
    std::vector<double> psi_t, psi_v;
    std::vector<std::pair<double, double>> kept;
    for (auto& [t, v] : f) {
      if (v < overlap_lo - 1e-9 * scale || v > overlap_hi + 1e-9 * scale) continue;
      auto h = [&](double tt) { return g_interp(tt) - v; };
      double lo = g.front().first, hi = g.back().first;
      if (h(lo) * h(hi) > 0) continue;
      double tt = find_root(h, lo, hi, 1e-13);
      if (!psi_t.empty() && t <= psi_t.back()) continue;
      psi_t.push_back(t);
      psi_v.push_back(tt);
      kept.emplace_back(t, v);
    }
    if (kept.size() < std::max<std::size_t>(4, f.size() / 2)) {
      out.failure = "range mismatch: too little of the function is matchable";
      return out;
    }
    for (std::size_t i = 1; i < psi_v.size(); ++i) {
      if (psi_v[i] <= psi_v[i - 1]) {
        out.failure = "no monotone reparametrization aligns the functions";
        return out;
      }
    }
    std::vector<double> kt, kv;
    std::size_t n = psi_t.size();
    std::size_t kcount = std::min<std::size_t>(std::max(knots, 4), n);
    for (std::size_t i = 0; i < kcount; ++i) {
      std::size_t idx = i * (n - 1) / (kcount - 1);
      if (!kt.empty() && psi_t[idx] <= kt.back()) continue;
      kt.push_back(psi_t[idx]);
      kv.push_back(psi_v[idx]);
    }
    if (kt.size() < 3) {
      out.failure = "degenerate reparametrization";
      return out;
    }
    out.psi = MonotoneCubic(kt, kv);
    double max_err = 0.0;
    for (auto& [t, v] : kept) max_err = std::max(max_err, std::abs(g_interp(out.psi(t)) - v));
    out.residual = max_err;
    double dmin = 1e300, dmax = 0.0;
    for (std::size_t i = 1; i < psi_t.size(); ++i) {
      double dt = psi_t[i] - psi_t[i - 1];
      if (dt <= 0) continue;
      double d = (psi_v[i] - psi_v[i - 1]) / dt;
      dmin = std::min(dmin, d);
      dmax = std::max(dmax, d);
    }
    out.derivative_min = dmin;
    out.derivative_max = dmax;
    if (max_err > tol_rel * scale) {
      out.failure = "fit residual above tolerance";
      return out;
    }
    if (dmin <= 0 || dmax > 1e3 * std::max(dmin, 1e-300)) {
      out.failure = "reparametrization derivative blow-up: no smooth psi";
      return out;
    }
    out.success = true;
    return out;
  }

  // non-monotone data: coordinate descent over monotone knot values
  std::size_t K = static_cast<std::size_t>(std::max(4, knots));
  std::vector<double> kt(K), kv(K);
  double t0 = f.front().first, t1 = f.back().first;
  double u0 = g.front().first, u1 = g.back().first;
  for (std::size_t i = 0; i < K; ++i) {
    kt[i] = t0 + (t1 - t0) * static_cast<double>(i) / (K - 1);
    kv[i] = u0 + (u1 - u0) * static_cast<double>(i) / (K - 1);
  }
  std::vector<double> gt, gv;
  for (auto& [tt, vv] : g) {
    gt.push_back(tt);
    gv.push_back(vv);
  }
  MonotoneCubic g_interp(gt, gv);
  auto objective = [&](const std::vector<double>& vals) {
    MonotoneCubic psi(kt, vals);
    double worst_v = 0.0;
    for (auto& [t, v] : f) worst_v = std::max(worst_v, std::abs(g_interp(psi(t)) - v));
    return worst_v;
  };
  double best = objective(kv);
  double step = 0.25 * (u1 - u0);
  for (int it = 0; it < 60 && step > 1e-10; ++it) {
    bool improved = false;
    for (std::size_t i = 1; i + 1 < K; ++i) {
      for (double d : {step, -step}) {
        double save = kv[i];
        double cand = kv[i] + d;
        if (cand <= kv[i - 1] || cand >= kv[i + 1]) continue;
        kv[i] = cand;
        double val = objective(kv);
        if (val < best) {
          best = val;
          improved = true;
        } else {
          kv[i] = save;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  out.psi = MonotoneCubic(kt, kv);
  out.residual = best;
  double dmin = 1e300, dmax = 0.0;
  for (std::size_t i = 1; i < K; ++i) {
    double d = (kv[i] - kv[i - 1]) / (kt[i] - kt[i - 1]);
    dmin = std::min(dmin, d);
    dmax = std::max(dmax, d);
  }
  out.derivative_min = dmin;
  out.derivative_max = dmax;
  if (best <= tol_rel * scale) {
    out.success = true;
  } else {
    out.failure = "fit residual above tolerance";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Isomorphism.
// ---------------------------------------------------------------------------

namespace {

// transverse vanishing order of the integral near a vertex, normalized so
// the canonical parametrization gets exponent 1
double edge_order_near_vertex(const SystemSpec& spec, const ReebGraph& g, const ReebEdge& e,
                              int vertex) {
  if (vertex < 0) return 1.0;
  const ReebVertex& vert = g.vertices[vertex];
  double c_v = vert.level;
  Vec2 origin = vert.structure.is_point
                    ? vert.structure.point_location
                    : vert.structure.graph.edges.front().curve.at(
                          0.5 * vert.structure.graph.edges.front().curve.length());
  Vec2 toward = e.seed - origin;
  if (toward.norm() < 1e-9) toward = {1, 0};
  toward = toward.normalized();
  std::vector<double> A, b;
  std::size_t m = 0;
  for (int i = 0; i < 12; ++i) {
    double r = 0.12 * std::pow(0.8, i);
    double w = std::abs(spec.integral(origin + toward * r) - c_v);
    if (w <= 0) continue;
    A.push_back(1.0);
    A.push_back(std::log(r));
    b.push_back(std::log(w));
    ++m;
  }
  if (m < 6) return 1.0;
  auto fit = solve_least_squares(A, m, 2, b);
  double order = fit[1];
  long M = std::lround(order);
  if (M < 1 || std::abs(order - static_cast<double>(M)) > 0.1) return 1.0;
  double canonical = vert.structure.is_point ? 2.0 : 1.0;
  return static_cast<double>(M) / canonical;
}

std::vector<std::pair<double, double>> canonicalize_samples(
    const std::vector<std::pair<double, double>>& samples, double c_v, double order) {
  std::vector<std::pair<double, double>> out;
  for (auto& [c, v] : samples) {
    double d = c - c_v;
    double t = (d >= 0 ? 1.0 : -1.0) * std::pow(std::abs(d), 1.0 / order);
    out.emplace_back(t, v);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

EquivalenceVerdict isomorphic(const SystemSpec& a, const SystemSpec& b, const Tolerances& tol) {
  EquivalenceVerdict verdict = orbital_equivalent(a, b, tol);
  verdict.kind = VerdictKind::Isomorphism;
  if (verdict.result != VerdictResult::Equivalent) return verdict;

  SystemAnalysis A = analyze(a, tol);
  SystemAnalysis B = analyze(b, tol);

  double worst = 0.0;
  const double accept = 1e-3;
  const double reject = 10 * accept;

  for (auto [ea, eb] : verdict.edge_matching) {
    MonodromyRecord ma = monodromy_function(a, A.graph, ea, +1, 10, tol);
    MonodromyRecord mb = monodromy_function(b, B.graph, eb, +1, 10, tol);
    if (ma.samples.size() < 6 || mb.samples.size() < 6) continue;

    const ReebEdge& edge_a = A.graph.edges[ea];
    const ReebEdge& edge_b = B.graph.edges[eb];
    int va = edge_a.from >= 0 ? edge_a.from : edge_a.to;
    int vb = edge_b.from >= 0 ? edge_b.from : edge_b.to;
    double ca = va >= 0 ? A.graph.vertices[va].level : edge_a.level_lo;
    double cb = vb >= 0 ? B.graph.vertices[vb].level : edge_b.level_lo;
    double orda = edge_order_near_vertex(a, A.graph, edge_a, va);
    double ordb = edge_order_near_vertex(b, B.graph, edge_b, vb);
    auto fa = canonicalize_samples(ma.samples, ca, orda);
    auto fb = canonicalize_samples(mb.samples, cb, ordb);

    LeftEquivalenceFit fit = left_equivalence_fit(fa, fb, 12, accept);
    if (!fit.success) {
      auto fb_neg = fb;
      for (auto& [t, v] : fb_neg) v = -v;
      LeftEquivalenceFit fit2 = left_equivalence_fit(fa, fb_neg, 12, accept);
      if (fit2.success) fit = fit2;
    }
    if (!fit.success) {
      double scale = 0.0;
      for (auto& [t, v] : fa) scale = std::max(scale, std::abs(v));
      bool hard = fit.residual > reject * std::max(scale, 1.0) ||
                  fit.failure.rfind("range mismatch", 0) == 0 ||
                  fit.failure.rfind("reparametrization", 0) == 0 ||
                  fit.failure.rfind("no monotone", 0) == 0;
      verdict.result = hard ? VerdictResult::Inequivalent : VerdictResult::Inconclusive;
      verdict.witness = "monodromy functions on matched edge " + std::to_string(ea) +
                        (hard ? " not left-equivalent: " : " marginal: ") + fit.failure;
      return verdict;
    }
    worst = std::max(worst, fit.residual);

    if (edge_a.type2_crossings > 0) {
      auto gamma_samples = [&](const SystemSpec& s, const SystemAnalysis& an, const ReebEdge& e,
                               double cv, double ord) {
        std::vector<std::vector<std::pair<double, double>>> per_curve;
        for (const auto& curve : an.graph.classification.curves) {
          EigenvalueCurveData data = eigenvalue_function(s, curve, tol);
          std::vector<std::pair<double, double>> in_range;
          for (auto& [c, gam] : data.samples)
            if (c > e.level_lo && c < e.level_hi) in_range.emplace_back(c, gam);
          if (in_range.size() >= 6)
            per_curve.push_back(canonicalize_samples(in_range, cv, ord));
        }
        return per_curve;
      };
      auto gam_a = gamma_samples(a, A, edge_a, ca, orda);
      auto gam_b = gamma_samples(b, B, edge_b, cb, ordb);
      if (gam_a.size() == gam_b.size()) {
        for (std::size_t i = 0; i < gam_a.size(); ++i) {
          double best_res = 1e300;
          bool any = false;
          for (std::size_t j = 0; j < gam_b.size(); ++j) {
            LeftEquivalenceFit fit_g = left_equivalence_fit(gam_a[i], gam_b[j], 12, accept);
            if (fit_g.success) {
              any = true;
              best_res = std::min(best_res, fit_g.residual);
            }
          }
          if (!any) {
            verdict.result = VerdictResult::Inequivalent;
            verdict.witness = "Type II eigenvalue functions not left-equivalent on edge " +
                              std::to_string(ea);
            return verdict;
          }
          worst = std::max(worst, best_res);
        }
      }
    }
  }

  for (auto [va, vb] : verdict.vertex_matching) {
    const auto& sta = A.graph.vertices[va].structure;
    const auto& stb = B.graph.vertices[vb].structure;
    std::vector<double> ha, hb;
    for (int rid : sta.point_record_ids)
      if (A.graph.classification.points[rid].type == SingularityType::III)
        ha.push_back(
            resonance_and_frequency(a, A.graph.classification.points[rid], tol, false).h0);
    for (int rid : stb.point_record_ids)
      if (B.graph.classification.points[rid].type == SingularityType::III)
        hb.push_back(
            resonance_and_frequency(b, B.graph.classification.points[rid], tol, false).h0);
    std::sort(ha.begin(), ha.end());
    std::sort(hb.begin(), hb.end());
    for (std::size_t i = 0; i < std::min(ha.size(), hb.size()); ++i) {
      double mismatch = std::abs(ha[i] - hb[i]) / std::max(1.0, std::abs(ha[i]));
      if (mismatch > reject) {
        verdict.result = VerdictResult::Inequivalent;
        verdict.witness = "frequency constants differ at matched Type III points";
        return verdict;
      }
      worst = std::max(worst, mismatch);
    }
    std::vector<const SingularPointRecord*> iva, ivb;
    for (int rid : sta.point_record_ids)
      if (A.graph.classification.points[rid].type == SingularityType::IV)
        iva.push_back(&A.graph.classification.points[rid]);
    for (int rid : stb.point_record_ids)
      if (B.graph.classification.points[rid].type == SingularityType::IV)
        ivb.push_back(&B.graph.classification.points[rid]);
    if (iva.size() == ivb.size()) {
      for (std::size_t i = 0; i < iva.size(); ++i) {
        NilpotentData na = nilpotent_invariants(a, *iva[i], tol);
        NilpotentData nb = nilpotent_invariants(b, *ivb[i], tol);
        LeftEquivalenceFit fit =
            left_equivalence_fit(na.eigenvalue_samples, nb.eigenvalue_samples, 12, accept);
        if (!fit.success && fit.failure.rfind("range mismatch", 0) == 0) {
          verdict.result = VerdictResult::Inequivalent;
          verdict.witness = "Type IV eigenvalue branches not left-equivalent";
          return verdict;
        }
        if (fit.success) worst = std::max(worst, fit.residual);
      }
    }
  }

  verdict.result = VerdictResult::Equivalent;
  verdict.worst_residual = worst;
  verdict.witness = "simultaneous left equivalence achieved (worst residual " +
                    std::to_string(worst) + ")";
  return verdict;
}

}  // namespace isl
