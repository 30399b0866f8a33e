#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "isl/equivalence.hpp"

using namespace isl;

static SystemSpec sys(const char* name) {
  return load_manifest(std::string(ISL_TEST_DATA_DIR) + "/" + name);
}

// symbolic pushforward of a system under the shear (x, y) -> (x + a y^2, y)
static SystemSpec shear_conjugate(const SystemSpec& s, double a_coef, double window) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "(x - %.17g*y^2)", a_coef);
  Expr xin = parse(buf);  // x of the preimage in terms of the new coordinates
  auto pull = [&](const Expr& f) {
    Expr tmp = substitute(substitute(f, 0, ast::param("ox")), 1, ast::param("oy"));
    return substitute_params(tmp, {{"ox", xin}, {"oy", ast::var_y()}});
  };
  Expr fx = pull(s.dx_expr());
  Expr fy = pull(s.dy_expr());
  // pushforward components: DPhi = [[1, 2 a y], [0, 1]]
  std::snprintf(buf, sizeof buf, "%.17g", 2.0 * a_coef);
  Expr two_a_y = ast::mul(parse(buf), ast::var_y());
  Expr dxp = ast::add(fx, ast::mul(two_a_y, fy));
  Expr dyp = fy;
  Expr fp = pull(s.integral_expr());
  SurfaceModel win;
  win.kind = SurfaceKind::PlaneWindow;
  win.xmin = win.ymin = -window;
  win.xmax = win.ymax = window;
  return SystemSpec(win, dxp, dyp, fp, {}, s.label() + "-conj");
}

TEST_CASE("left equivalence: identity and affine matches") {
  std::vector<std::pair<double, double>> f, g;
  for (int i = 0; i <= 30; ++i) {
    double t = i / 30.0;
    f.emplace_back(t, 2 * M_PI * (1 + t));
    g.emplace_back(t, 2 * M_PI * (1 + 2 * t));
  }
  auto fit = left_equivalence_fit(f, f);
  REQUIRE(fit.success);
  CHECK(fit.residual < 1e-10);

  // psi(t) = t/2 aligns f with g
  auto fit2 = left_equivalence_fit(f, g);
  REQUIRE(fit2.success);
  CHECK(fit2.residual < 1e-8);
  CHECK(fit2.psi(0.5) == doctest::Approx(0.25).epsilon(1e-6));
}

TEST_CASE("left equivalence: constants compare by value") {
  std::vector<std::pair<double, double>> f, g;
  for (int i = 0; i <= 20; ++i) {
    f.emplace_back(i / 20.0, 2 * M_PI);
    g.emplace_back(i / 20.0, M_PI);
  }
  auto fit = left_equivalence_fit(f, g);
  CHECK_FALSE(fit.success);
  CHECK(fit.failure.find("range mismatch") != std::string::npos);
  auto fit2 = left_equivalence_fit(f, f);
  CHECK(fit2.success);
}

TEST_CASE("left equivalence: 2 + t vs 2 + t^2 fails in the smooth class") {
  std::vector<std::pair<double, double>> f, g;
  for (int i = 0; i <= 60; ++i) {
    double t = i / 60.0;
    f.emplace_back(t, 2 + t);
    g.emplace_back(t, 2 + t * t);
  }
  auto fit = left_equivalence_fit(f, g);
  CHECK_FALSE(fit.success);
  // the required psi = sqrt has unbounded derivative at 0
  CHECK(fit.failure.find("blow-up") != std::string::npos);
}

TEST_CASE("orbital: SYS-A and SYS-B share the discrete picture") {
  auto v = orbital_equivalent(sys("sys_a.json"), sys("sys_b.json"));
  CHECK(v.result == VerdictResult::Equivalent);
}

TEST_CASE("orbital: SYS-D vs SYS-D2 differ by the eigenvalue ratio") {
  auto v = orbital_equivalent(sys("sys_d.json"), sys("sys_d2.json"));
  CHECK(v.result == VerdictResult::Inequivalent);
  CHECK(v.witness.find("eigenvalue ratio") != std::string::npos);
}

TEST_CASE("orbital: SYS-H vs its x-reflection") {
  SystemSpec h = sys("sys_h.json");
  // reflect: x -> -x pushforward
  auto reflect = [&](const Expr& f) { return substitute(f, 0, ast::neg(ast::var_x())); };
  SurfaceModel win = h.surface();
  SystemSpec href(win, ast::neg(reflect(h.dx_expr())), reflect(h.dy_expr()),
                  reflect(h.integral_expr()), {}, "SYS-H-reflected");
  auto v = orbital_equivalent(h, href);
  CHECK(v.result == VerdictResult::Equivalent);
}

TEST_CASE("isomorphic: reflexivity with identity witness") {
  SystemSpec a = sys("sys_a.json");
  auto v = isomorphic(a, a);
  CHECK(v.result == VerdictResult::Equivalent);
  CHECK(v.worst_residual <= 1e-10);
}

TEST_CASE("isomorphic: SYS-B vs its symbolic shear conjugate") {
  SystemSpec b = sys("sys_b.json");
  SystemSpec bc = shear_conjugate(b, 0.1, 2.0);
  ValidationReport rep = validate(bc);
  REQUIRE(rep.pass());
  auto v = isomorphic(b, bc);
  CHECK(v.result == VerdictResult::Equivalent);
  CHECK(v.worst_residual <= 1e-3);
}

TEST_CASE("isomorphic: time scaling breaks isomorphism but not orbital equivalence") {
  SystemSpec a = sys("sys_a.json");
  SystemSpec a2 = sys("sys_a_double.json");
  auto orb = orbital_equivalent(a, a2);
  CHECK(orb.result == VerdictResult::Equivalent);
  auto iso = isomorphic(a, a2);
  CHECK(iso.result == VerdictResult::Inequivalent);
  CHECK(iso.witness.find("monodromy") != std::string::npos);
}

TEST_CASE("isomorphic: replacing F by F^2 is absorbed by the base reparametrization") {
  SystemSpec b = sys("sys_b.json");
  SurfaceModel win = b.surface();
  Expr f2 = ast::pow(b.integral_expr(), ast::constant(2));
  SystemSpec bsq(win, b.dx_expr(), b.dy_expr(), f2, {}, "SYS-B-Fsq");
  REQUIRE(validate(bsq).pass());
  auto v = isomorphic(b, bsq);
  CHECK(v.result == VerdictResult::Equivalent);
}

TEST_CASE("verdict symmetry on the curated pairs") {
  SystemSpec a = sys("sys_a.json");
  SystemSpec b = sys("sys_b.json");
  auto v1 = orbital_equivalent(a, b);
  auto v2 = orbital_equivalent(b, a);
  CHECK(v1.result == v2.result);
  SystemSpec d = sys("sys_d.json");
  SystemSpec d2 = sys("sys_d2.json");
  CHECK(orbital_equivalent(d, d2).result == orbital_equivalent(d2, d).result);
}
