#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>

#include "isl/invariants.hpp"

using namespace isl;

static SystemSpec sys(const char* name) {
  return load_manifest(std::string(ISL_TEST_DATA_DIR) + "/" + name);
}

// independent oracle: principal value of the circulation integral dx/Vx over
// one period, by pole-subtracted midpoint quadrature (no shared code with the
// implementation path)
static double pv_quadrature_oracle(const std::function<double(double)>& vx, double period) {
  const int n = 20000;
  std::vector<double> zeros, slopes;
  double prev = vx(0.0);
  for (int i = 1; i <= n; ++i) {
    double x = period * i / n;
    double cur = vx(x);
    if (prev * cur < 0) {
      double lo = period * (i - 1) / n, hi = x;
      for (int b = 0; b < 80; ++b) {
        double mid = 0.5 * (lo + hi);
        if (vx(lo) * vx(mid) <= 0)
          hi = mid;
        else
          lo = mid;
      }
      double z = 0.5 * (lo + hi);
      zeros.push_back(z);
      double h = 1e-6;
      slopes.push_back((vx(z + h) - vx(z - h)) / (2 * h));
    }
    prev = cur;
  }
  auto sub = [&](double x) {
    double v = 1.0 / vx(x);
    for (std::size_t k = 0; k < zeros.size(); ++k)
      for (double shift : {-period, 0.0, period})
        v -= 1.0 / (slopes[k] * (x - zeros[k] - shift));
    return v;
  };
  double total = 0.0;
  const int m = 40000;
  for (int i = 0; i < m; ++i) {
    double x = period * (i + 0.5) / m;
    total += sub(x) * (period / m);
  }
  double logs = 0.0;
  for (std::size_t k = 0; k < zeros.size(); ++k) {
    double z = zeros[k];
    for (double shift : {-period, 0.0, period}) {
      double a = 0.0 - z - shift, b = period - z - shift;
      logs += (1.0 / slopes[k]) * std::log(std::abs(b / a));
    }
  }
  return total + logs;
}

TEST_CASE("monodromy reduces to the period on regular families") {
  SystemSpec a = sys("sys_a.json");
  LevelCurve c = trace_level_curve(a, {1.0, 0.0});
  double mu = monodromy_of_curve(a, c);
  CHECK(std::abs(std::abs(mu) - 2 * M_PI) < 1e-6);
}

TEST_CASE("SYS-T: symmetric monodromy vanishes") {
  SystemSpec t = sys("sys_t.json");
  for (double y : {0.1, 0.25, -0.2}) {
    LevelCurve c = trace_level_curve(t, {0.3, y});
    double mu = monodromy_of_curve(t, c);
    CHECK(std::abs(mu) < 1e-6);
  }
}

TEST_CASE("SYS-T asymmetric: monodromy matches the PV quadrature oracle") {
  SystemSpec t = sys("sys_t_asym.json");
  LevelCurve c = trace_level_curve(t, {0.3, 0.1});
  double mu = monodromy_of_curve(t, c);
  double oracle = pv_quadrature_oracle(
      [](double x) { return std::sin(2 * M_PI * x) + 0.3 * std::sin(4 * M_PI * x); }, 1.0);
  CHECK(std::abs(std::abs(mu) - std::abs(oracle)) < 1e-6);
  CHECK(mu != 0.0);
}

TEST_CASE("monodromy orientation reversal negates") {
  SystemSpec t = sys("sys_t_asym.json");
  LevelCurve c = trace_level_curve(t, {0.3, 0.1});
  double plus = monodromy_of_curve(t, c, +1);
  double minus = monodromy_of_curve(t, c, -1);
  CHECK(std::abs(plus + minus) < 1e-8);
}

TEST_CASE("jump construction equals PV and is window independent") {
  SystemSpec t = sys("sys_t_asym.json");
  LevelCurve c = trace_level_curve(t, {0.3, 0.15});
  double pv = monodromy_of_curve(t, c);
  double j1 = monodromy_by_jumps(t, c, 1.0);
  double j2 = monodromy_by_jumps(t, c, 0.5);
  CHECK(std::abs(j1 - pv) < 1e-6);
  CHECK(std::abs(j2 - j1) < 1e-6);
}

TEST_CASE("monodromy function along the SYS-T edge") {
  SystemSpec t = sys("sys_t.json");
  ReebGraph g = build_reeb_graph(t);
  REQUIRE(g.edges.size() == 1);
  auto rec = monodromy_function(t, g, 0);
  CHECK(rec.samples.size() >= 8);
  for (const auto& [c, mu] : rec.samples) CHECK(std::abs(mu) < 1e-6);
}

// ---------------------------------------------------------------------------

static int saddle_vertex_of(const ReebGraph& g) {
  for (std::size_t v = 0; v < g.vertices.size(); ++v)
    if (!g.vertices[v].structure.is_point) return static_cast<int>(v);
  return -1;
}

TEST_CASE("SYS-H period cocycle: regular components, symmetric equality") {
  SystemSpec h = sys("sys_h.json");
  ReebGraph g = build_reeb_graph(h);
  int sv = saddle_vertex_of(g);
  REQUIRE(sv >= 0);
  PeriodCocycle pc = period_cocycle(h, g, sv, 1.0);
  REQUIRE(pc.components.size() == 2);
  CHECK(pc.ramifications[0] == 1);
  CHECK(pc.ramifications[1] == 1);
  // the system is even in x: the two homoclinic components carry equal series
  for (int j = 0; j <= std::min({pc.components[0].order(), pc.components[1].order(), 3}); ++j) {
    CHECK(std::abs(pc.components[0].coefficients[j] - pc.components[1].coefficients[j]) <
          2e-3 * (1 + std::abs(pc.components[0].coefficients[j])));
  }
}

TEST_CASE("SYS-H cocycle value at the vertex equals the separatrix transit time") {
  SystemSpec h = sys("sys_h.json");
  ReebGraph g = build_reeb_graph(h);
  int sv = saddle_vertex_of(g);
  PeriodCocycle pc = period_cocycle(h, g, sv, 1.0);
  const auto& sep = g.vertices[sv].structure.graph.edges[0].curve;
  double L = sep.length();
  Vec2 A = sep.at(1.0);
  Vec2 B = sep.at(L - 1.0), tB = sep.tangent(L - 1.0);
  OdeOptions opts;
  opts.rel_tol = 1e-11;
  // oracle: dense-output flow from A, accepting only the section crossing
  // that lands at B (the infinite section line cuts the loop elsewhere too)
  double T = 0.0;
  bool got = false;
  for (double dir : {1.0, -1.0}) {
    Vec2 cur = A;
    double acc = 0.0;
    for (int k = 0; k < 30 && !got; ++k) {
      std::optional<EventHit> hit;
      try {
        hit = section_crossing(h, cur, B, tB, dir * 50.0, 1e-9, 0, opts);
      } catch (const OdeError&) {
        break;
      }
      if (!hit) break;
      acc += hit->time;
      if ((hit->state - B).norm() < 0.3) {
        T = acc;
        got = true;
        break;
      }
      // step past this crossing and keep going
      cur = integrate(h, hit->state, dir * 1e-3);
      acc += dir * 1e-3;
    }
    if (got) break;
  }
  REQUIRE(got);
  double p0 = pc.components[0].coefficients[0];
  double p1 = pc.components[1].coefficients[0];
  bool match = std::abs(std::abs(p0) - std::abs(T)) < 2e-3 * std::abs(T) ||
               std::abs(std::abs(p1) - std::abs(T)) < 2e-3 * std::abs(T);
  CHECK(match);
}

TEST_CASE("pure coboundaries normalize to zero") {
  SystemSpec h = sys("sys_h.json");
  ReebGraph g = build_reeb_graph(h);
  int sv = saddle_vertex_of(g);
  PeriodCocycle pc = period_cocycle(h, g, sv, 1.0);
  PeriodCocycle zero = pc;
  for (auto& comp : zero.components)
    std::fill(comp.coefficients.begin(), comp.coefficients.end(), 0.0);
  PuiseuxSeries xi{"F", 1, {0.37, -1.2, 0.55, 0.08}, 0};
  PuiseuxSeries zeta{"F", 1, {-0.9, 0.31, 0.0, 0.44}, 0};
  PeriodCocycle cob = apply_coboundary(zero, {{xi, zeta}});
  auto rep = normalize_cocycle(cob, 3);
  for (const auto& comp : rep)
    for (double cv : comp.coefficients) CHECK(std::abs(cv) < 1e-6);
}

TEST_CASE("cocycle gauge invariance: section placement is a coboundary") {
  SystemSpec h = sys("sys_h.json");
  ReebGraph g = build_reeb_graph(h);
  int sv = saddle_vertex_of(g);
  PeriodCocycle pc1 = period_cocycle(h, g, sv, 1.0);
  PeriodCocycle pc2 = period_cocycle(h, g, sv, 1.35);
  auto rep1 = normalize_cocycle(pc1, 3);
  auto rep2 = normalize_cocycle(pc2, 3);
  REQUIRE(rep1.size() == rep2.size());
  for (std::size_t e = 0; e < rep1.size(); ++e) {
    REQUIRE(rep1[e].coefficients.size() == rep2[e].coefficients.size());
    for (std::size_t j = 0; j < rep1[e].coefficients.size(); ++j)
      CHECK(std::abs(rep1[e].coefficients[j] - rep2[e].coefficients[j]) < 1e-3);
  }
}

TEST_CASE("half-integer components survive integer-ramification coboundaries") {
  PeriodCocycle pc;
  pc.vertex_id = 0;
  pc.components.push_back(PuiseuxSeries{"F", 2, {0.5, 1.25, -0.3}, 0});
  pc.ramifications.push_back(2);
  CocyclePointData pd;
  pd.a = 1;
  pd.b = 1;
  pd.k = 1;
  pd.u_ends.emplace_back(0, 0);
  pd.s_ends.emplace_back(0, 1);
  pc.points.push_back(pd);
  auto rep = normalize_cocycle(pc, 1);
  REQUIRE(rep.size() == 1);
  CHECK(rep[0].ramification == 2);
  CHECK(std::abs(rep[0].coefficients[1] - 1.25) < 1e-12);  // t^(1/2) survives
  CHECK(std::abs(rep[0].coefficients[0]) < 1e-12);         // t^0 killed
  CHECK(std::abs(rep[0].coefficients[2]) < 1e-12);         // t^1 killed
}

// ---------------------------------------------------------------------------

TEST_CASE("regularized time on SYS-E matches the closed forms") {
  SystemSpec e = sys("sys_e.json");
  auto rec = classify(e, {0, 0});
  auto rt = regularized_time(e, rec, 1.0, 0.3, 16);
  for (const auto& [y, t_hat] : rt.regularized) {
    double expect;
    if (y > 0) {
      double sv = std::sqrt(y);
      expect = std::log((1 + sv) / (1 - sv)) / sv;
    } else {
      double su = std::sqrt(-y);
      expect = -(2 / su) * std::atan(1 / su) + M_PI / su;
    }
    CHECK(std::abs(std::abs(t_hat) - std::abs(expect)) < 1e-4);
  }
  CHECK(std::abs(std::abs(rt.at_zero) - 2.0) < 1e-3);
  CHECK(std::abs(std::abs(rt.slope) - 2.0 / 3.0) < 1e-2);
}

TEST_CASE("regularized time singular part has the derivation-consistent sign") {
  SystemSpec e = sys("sys_e.json");
  auto nil = nilpotent_invariants(e, classify(e, {0, 0}));
  // g0 = 1, g1 = 0: S(y) = -pi / sqrt(-y)
  CHECK(std::abs(singular_time_part(nil, -0.25) - (-2 * M_PI)) < 1e-3);
  CHECK(std::abs(singular_time_part(nil, -0.04) - (-M_PI / 0.2)) < 5e-3);
}

TEST_CASE("regularized time: symmetric second differences stay bounded") {
  SystemSpec e = sys("sys_e.json");
  auto rec = classify(e, {0, 0});
  auto rt = regularized_time(e, rec, 1.0, 0.3, 16);
  for (double h = 0.02; h <= 0.2; h += 0.03) {
    double second = rt.smooth_fit(h) + rt.smooth_fit(-h) - 2 * rt.smooth_fit(0.0);
    CHECK(std::abs(second) <= 10 * h * h);
  }
}

TEST_CASE("regularized monodromy on the cylinder parabolic model") {
  SystemSpec ec = sys("sys_e_cyl.json");
  ReebGraph g = build_reeb_graph(ec);
  int target = -1;
  for (std::size_t v = 0; v < g.vertices.size(); ++v) {
    int ivs = 0, others = 0;
    for (int rid : g.vertices[v].structure.point_record_ids) {
      if (g.classification.points[rid].type == SingularityType::IV)
        ++ivs;
      else
        ++others;
    }
    if (ivs == 1 && others == 0 && std::abs(g.vertices[v].level) < 1e-6)
      target = static_cast<int>(v);
  }
  REQUIRE(target >= 0);
  auto rm = regularized_monodromy(ec, g, target, 0.25, 0.18, 12);
  CHECK(rm.monodromy.size() >= 10);
  CHECK(!rm.truncated.empty());
  double resid = 0;
  for (const auto& [y, m] : rm.monodromy)
    resid = std::max(resid, std::abs(rm.smooth_fit(y) - m));
  CHECK(resid < 5e-3);
  // orientation reversal negates
  auto rm_rev = regularized_monodromy(ec, g, target, 0.25, 0.18, 12, -1);
  REQUIRE(!rm_rev.monodromy.empty());
  CHECK(std::abs(rm.monodromy.front().second + rm_rev.monodromy.front().second) < 1e-8);
}

TEST_CASE("period cocycle rejects non-Type-III vertices") {
  SystemSpec e = sys("sys_e.json");
  ReebGraph g = build_reeb_graph(e);
  CHECK_THROWS_AS((void)period_cocycle(e, g, 0), InvariantError);
}
