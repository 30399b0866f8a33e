#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "isl/reeb.hpp"

using namespace isl;

static SystemSpec sys(const char* name) {
  return load_manifest(std::string(ISL_TEST_DATA_DIR) + "/" + name);
}

// brute-force oracle: count connected components of {F = c} on a fine grid
static int grid_component_count(const SystemSpec& spec, double c, int n = 220) {
  const SurfaceModel& surf = spec.surface();
  double x0 = surf.domain_xmin(), x1 = surf.domain_xmax();
  double y0 = surf.domain_ymin(), y1 = surf.domain_ymax();
  std::vector<int> mark(n * n, 0);
  auto fval = [&](int i, int j) {
    return spec.integral({x0 + (x1 - x0) * (i + 0.5) / n, y0 + (y1 - y0) * (j + 0.5) / n});
  };
  // cells whose corners straddle the level
  std::vector<double> f((n + 1) * (n + 1));
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j)
      f[j * (n + 1) + i] =
          spec.integral({x0 + (x1 - x0) * i / n, y0 + (y1 - y0) * j / n}) - c;
  (void)fval;
  auto cell_hit = [&](int i, int j) {
    double a = f[j * (n + 1) + i], b = f[j * (n + 1) + i + 1];
    double d = f[(j + 1) * (n + 1) + i], e = f[(j + 1) * (n + 1) + i + 1];
    double mn = std::min(std::min(a, b), std::min(d, e));
    double mx = std::max(std::max(a, b), std::max(d, e));
    return mn <= 0 && mx >= 0;
  };
  int comps = 0;
  std::vector<int> stack;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (mark[j * n + i] || !cell_hit(i, j)) continue;
      ++comps;
      stack.push_back(j * n + i);
      mark[j * n + i] = 1;
      while (!stack.empty()) {
        int cur = stack.back();
        stack.pop_back();
        int ci = cur % n, cj = cur / n;
        for (auto [di, dj] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
          int ni = ci + di, nj = cj + dj;
          if (spec.surface().periodic_x()) ni = (ni + n) % n;
          if (spec.surface().periodic_y()) nj = (nj + n) % n;
          if (ni < 0 || ni >= n || nj < 0 || nj >= n) continue;
          if (mark[nj * n + ni] || !cell_hit(ni, nj)) continue;
          mark[nj * n + ni] = 1;
          stack.push_back(nj * n + ni);
        }
      }
    }
  }
  return comps;
}

TEST_CASE("SYS-A: interval base with one Type I vertex") {
  SystemSpec a = sys("sys_a.json");
  ReebGraph g = build_reeb_graph(a);
  REQUIRE(g.vertices.size() == 1);
  CHECK(g.vertices[0].structure.is_point);
  REQUIRE(g.edges.size() == 1);
  CHECK(g.edges[0].from == 0);
  CHECK(g.edges[0].to == -1);  // open end at the window
  CHECK_FALSE(g.base_has_cycle);
}

TEST_CASE("SYS-H: Y-shaped graph, 3 edges, figure-eight vertex") {
  SystemSpec h = sys("sys_h.json");
  ReebGraph g = build_reeb_graph(h);
  REQUIRE(g.vertices.size() == 3);  // two centers + the saddle level
  int point_vertices = 0, graph_vertices = -1;
  for (std::size_t v = 0; v < g.vertices.size(); ++v) {
    if (g.vertices[v].structure.is_point)
      ++point_vertices;
    else
      graph_vertices = static_cast<int>(v);
  }
  CHECK(point_vertices == 2);
  REQUIRE(graph_vertices >= 0);
  const auto& eight = g.vertices[graph_vertices].structure;
  CHECK(eight.graph.edges.size() == 2);  // two homoclinic loops
  CHECK(eight.type2_count == 0);
  CHECK_FALSE(eight.twisted);
  CHECK_FALSE(eight.mixed_iii_iv);
  REQUIRE(g.edges.size() == 3);
  int into_saddle = 0, dangling = 0;
  for (const auto& e : g.edges) {
    if (e.from == graph_vertices || e.to == graph_vertices) ++into_saddle;
    if (e.from == -1 || e.to == -1) ++dangling;
  }
  CHECK(into_saddle == 3);
  CHECK(dangling == 1);
  CHECK_FALSE(g.base_has_cycle);
}

TEST_CASE("linear torus flow: cycle base") {
  SystemSpec t = sys("torus_linear.json");
  ReebGraph g = build_reeb_graph(t);
  CHECK(g.vertices.empty());
  REQUIRE(g.edges.size() == 1);
  CHECK(g.edges[0].cycle);
  CHECK(g.base_has_cycle);
}

TEST_CASE("SYS-T: interval base, no vertices, Type II crossings") {
  SystemSpec t = sys("sys_t.json");
  ReebGraph g = build_reeb_graph(t);
  CHECK(g.vertices.empty());
  REQUIRE(g.edges.size() == 1);
  CHECK_FALSE(g.base_has_cycle);
  CHECK(g.edges[0].type2_crossings == 2);
}

TEST_CASE("SYS-E on the plane: one Type IV vertex, open level lines") {
  SystemSpec e = sys("sys_e.json");
  ReebGraph g = build_reeb_graph(e);
  REQUIRE(g.vertices.size() == 1);
  const auto& st = g.vertices[0].structure;
  CHECK_FALSE(st.is_point);
  CHECK_FALSE(st.mixed_iii_iv);
  bool has_iv = false;
  for (int rid : st.point_record_ids)
    if (g.classification.points[rid].type == SingularityType::IV) has_iv = true;
  CHECK(has_iv);
  CHECK(g.edges.empty());  // every regular level line exits the window
}

TEST_CASE("edge fiber counts against the grid oracle") {
  SystemSpec h = sys("sys_h.json");
  ReebGraph g = build_reeb_graph(h);
  // below the saddle: two well families; above: one oval family until the
  // window tangency at H = 2
  struct Probe {
    double level;
    int closed_families;
  };
  for (auto [level, expect] : {Probe{-0.15, 2}, Probe{-0.05, 2}, Probe{0.5, 1}, Probe{1.5, 1}}) {
    int edges_here = 0;
    for (const auto& e : g.edges)
      if (level > e.level_lo && level < e.level_hi) ++edges_here;
    CHECK(edges_here == expect);
    CHECK(grid_component_count(h, level) == expect);
  }
  // SYS-A probes
  SystemSpec a = sys("sys_a.json");
  ReebGraph ga = build_reeb_graph(a);
  for (double level : {0.5, 1.5, 3.0}) {
    int edges_here = 0;
    for (const auto& e : ga.edges)
      if (level > e.level_lo && level < e.level_hi) ++edges_here;
    CHECK(edges_here == 1);
    CHECK(grid_component_count(a, level) == 1);
  }
}

TEST_CASE("multiplicities: SYS-H figure-eight has order-1 vanishing") {
  SystemSpec h = sys("sys_h.json");
  ReebGraph g = build_reeb_graph(h);
  int saddle_vertex = -1;
  for (std::size_t v = 0; v < g.vertices.size(); ++v)
    if (!g.vertices[v].structure.is_point) saddle_vertex = static_cast<int>(v);
  REQUIRE(saddle_vertex >= 0);
  auto rep = level_multiplicities(h, g, saddle_vertex);
  for (long long M : rep.orders) CHECK(M == 1);
  CHECK(rep.gcd == 1);
  CHECK(rep.alpha_consistent);
  CHECK(rep.root_single_valued);
  CHECK(rep.reduced_gcd == 1);
}

TEST_CASE("multiplicities: squaring the integral doubles every order") {
  SystemSpec h2 = sys("sys_h_sq.json");
  ReebGraph g = build_reeb_graph(h2);
  int saddle_vertex = -1;
  for (std::size_t v = 0; v < g.vertices.size(); ++v)
    if (!g.vertices[v].structure.is_point) saddle_vertex = static_cast<int>(v);
  REQUIRE(saddle_vertex >= 0);
  auto rep = level_multiplicities(h2, g, saddle_vertex);
  for (long long M : rep.orders) CHECK(M == 2);
  CHECK(rep.gcd == 2);
  for (long long m : rep.reduced) CHECK(m == 1);
  CHECK(rep.alpha_consistent);
}

TEST_CASE("coordinate function: exists for SYS-A and SYS-H, cycle obstruction on torus") {
  SystemSpec a = sys("sys_a.json");
  ReebGraph ga = build_reeb_graph(a);
  auto ra = coordinate_function(a, ga);
  CHECK(ra.global_exists);

  SystemSpec h = sys("sys_h.json");
  ReebGraph gh = build_reeb_graph(h);
  auto rh = coordinate_function(h, gh);
  CHECK(rh.global_exists);

  SystemSpec t = sys("torus_linear.json");
  ReebGraph gt = build_reeb_graph(t);
  auto rt = coordinate_function(t, gt);
  CHECK_FALSE(rt.global_exists);
  CHECK(rt.obstruction == "base is a cycle");
}

TEST_CASE("twisted flags are false on orientable surfaces") {
  for (const char* name : {"sys_a.json", "sys_h.json", "sys_t.json", "torus_linear.json"}) {
    SystemSpec s = sys(name);
    ReebGraph g = build_reeb_graph(s);
    for (const auto& v : g.vertices) CHECK_FALSE(v.structure.twisted);
    for (const auto& e : g.edges) CHECK_FALSE(e.twisted);
  }
}

TEST_CASE("degenerate systems are rejected") {
  SystemSpec d = sys("sys_degenerate.json");
  CHECK_THROWS_AS((void)build_reeb_graph(d), ReebError);
}

TEST_CASE("DOT export mentions every edge") {
  SystemSpec h = sys("sys_h.json");
  ReebGraph g = build_reeb_graph(h);
  std::string dot = reeb_to_dot(g);
  CHECK(dot.find("graph reeb") != std::string::npos);
  for (std::size_t e = 0; e < g.edges.size(); ++e)
    CHECK(dot.find("e" + std::to_string(e)) != std::string::npos);
}
