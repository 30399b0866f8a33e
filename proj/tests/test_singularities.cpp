#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "isl/singularities.hpp"

using namespace isl;

static SystemSpec sys(const char* name) {
  return load_manifest(std::string(ISL_TEST_DATA_DIR) + "/" + name);
}

TEST_CASE("classify the four model types") {
  SystemSpec a = sys("sys_a.json");
  CHECK(classify(a, {0, 0}).type == SingularityType::I);

  SystemSpec c = sys("sys_c.json");
  CHECK(classify(c, {0, 0.5}).type == SingularityType::II);

  SystemSpec d = sys("sys_d.json");
  auto rd = classify(d, {0, 0});
  CHECK(rd.type == SingularityType::III);
  CHECK(std::max(rd.eig_re[0], rd.eig_re[1]) == doctest::Approx(1.0));
  CHECK(std::min(rd.eig_re[0], rd.eig_re[1]) == doctest::Approx(-1.0));

  SystemSpec e = sys("sys_e.json");
  auto re = classify(e, {0, 0});
  CHECK(re.type == SingularityType::IV);
}

TEST_CASE("degenerate verdicts carry reasons") {
  SystemSpec g = sys("sys_degenerate.json");
  auto r = classify(g, {0, 0.3});
  CHECK(r.type == SingularityType::Degenerate);
  CHECK(r.degenerate_reason == "zero linear part");
}

TEST_CASE("classify is invariant under affine conjugation") {
  // conjugate SYS-E by an invertible affine map and reclassify at the image
  // of the origin; types are eigenvalue data, so the verdict must not move
  SystemSpec e = sys("sys_e.json");
  // map (x, y) -> A (x, y) with A = [[1.2, 0.3], [-0.4, 0.9]]; inverse below
  // pushforward: X'(u) = A X(A^{-1} u), F' = F o A^{-1}
  double det = 1.2 * 0.9 - 0.3 * (-0.4);
  double ia = 0.9 / det, ib = -0.3 / det, ic = 0.4 / det, id = 1.2 / det;
  char buf[256];
  std::snprintf(buf, sizeof buf, "(%.17g*x + %.17g*y)", ia, ib);
  Expr xin = parse(buf);
  std::snprintf(buf, sizeof buf, "(%.17g*x + %.17g*y)", ic, id);
  Expr yin = parse(buf);
  auto subst2 = [&](const Expr& f) {
    Expr tmp = substitute(substitute(f, 0, ast::param("ox")), 1, ast::param("oy"));
    return substitute_params(tmp, {{"ox", xin}, {"oy", yin}});
  };
  Expr fx = subst2(e.dx_expr());   // X components at A^{-1} u
  Expr fy = subst2(e.dy_expr());
  // A * (fx, fy)
  Expr dxp = ast::add(ast::mul(ast::constant(1.2), fx), ast::mul(ast::constant(0.3), fy));
  Expr dyp = ast::add(ast::mul(ast::constant(-0.4), fx), ast::mul(ast::constant(0.9), fy));
  Expr fp = subst2(e.integral_expr());
  SurfaceModel win;
  win.kind = SurfaceKind::PlaneWindow;
  win.xmin = win.ymin = -3;
  win.xmax = win.ymax = 3;
  SystemSpec conj(win, dxp, dyp, fp, {}, "SYS-E-affine");
  auto r = classify(conj, {0, 0});
  CHECK(r.type == SingularityType::IV);

  // also check a Type I and Type III specimen under the same map
  SystemSpec a = sys("sys_a.json");
  Expr adx = subst2(a.dx_expr()), ady = subst2(a.dy_expr());
  SystemSpec aconj(win, ast::add(ast::mul(ast::constant(1.2), adx),
                                 ast::mul(ast::constant(0.3), ady)),
                   ast::add(ast::mul(ast::constant(-0.4), adx),
                            ast::mul(ast::constant(0.9), ady)),
                   subst2(a.integral_expr()), {}, "SYS-A-affine");
  CHECK(classify(aconj, {0, 0}).type == SingularityType::I);
}

TEST_CASE("find_singularities: one center for SYS-A") {
  SystemSpec a = sys("sys_a.json");
  auto cls = find_singularities(a);
  REQUIRE(cls.points.size() == 1);
  CHECK(cls.points[0].type == SingularityType::I);
  CHECK(cls.points[0].location.norm() < 1e-9);
  CHECK(cls.curves.empty());
}

TEST_CASE("find_singularities: the Type II line of SYS-C") {
  SystemSpec c = sys("sys_c.json");
  auto cls = find_singularities(c);
  REQUIRE(cls.curves.size() == 1);
  for (const auto& rec : cls.points) {
    CHECK(rec.type == SingularityType::II);
    CHECK(std::abs(rec.location.x) < 1e-8);
  }
}

TEST_CASE("find_singularities: SYS-E parabola with one Type IV point") {
  SystemSpec e = sys("sys_e.json");
  auto cls = find_singularities(e);
  REQUIRE(cls.curves.size() == 1);
  int n_iv = 0, n_ii = 0;
  for (const auto& rec : cls.points) {
    if (rec.type == SingularityType::IV) {
      ++n_iv;
      CHECK(rec.location.norm() < 1e-6);
    }
    if (rec.type == SingularityType::II) ++n_ii;
  }
  CHECK(n_iv == 1);
  CHECK(n_ii >= 4);
}

TEST_CASE("find_singularities: double well has a saddle and two centers") {
  SystemSpec h = sys("sys_h.json");
  auto cls = find_singularities(h);
  REQUIRE(cls.points.size() == 3);
  int saddles = 0, centers = 0;
  for (const auto& r : cls.points) {
    if (r.type == SingularityType::III) ++saddles;
    if (r.type == SingularityType::I) ++centers;
  }
  CHECK(saddles == 1);
  CHECK(centers == 2);
}

TEST_CASE("find_singularities parallel agrees with serial") {
  SystemSpec h = sys("sys_h.json");
  auto s = find_singularities(h, {}, ExecMode::Serial);
  auto p = find_singularities(h, {}, ExecMode::Parallel);
  REQUIRE(s.points.size() == p.points.size());
  for (std::size_t i = 0; i < s.points.size(); ++i) {
    CHECK(s.points[i].location.x == p.points[i].location.x);
    CHECK(s.points[i].location.y == p.points[i].location.y);
  }
}

TEST_CASE("period function of the linear center is constant 2 pi") {
  SystemSpec a = sys("sys_a.json");
  auto rec = classify(a, {0, 0});
  auto pd = period_function(a, rec);
  CHECK(pd.samples.size() >= 18);
  for (const auto& [c, T] : pd.samples) {
    CHECK(T == doctest::Approx(2 * M_PI).epsilon(1e-8));
    CHECK(T > 0);
  }
  CHECK(pd.limit_period == doctest::Approx(2 * M_PI).epsilon(1e-6));
  CHECK(pd.limit_period == doctest::Approx(2 * M_PI / pd.beta).epsilon(1e-4));
}

TEST_CASE("period function of SYS-B is 2 pi (1 + R)") {
  SystemSpec b = sys("sys_b.json");
  auto rec = classify(b, {0, 0});
  auto pd = period_function(b, rec);
  for (const auto& [c, T] : pd.samples) {
    // F = R here, so the sample abscissa is R itself
    CHECK(T == doctest::Approx(2 * M_PI * (1 + c)).epsilon(1e-7));
  }
  CHECK(pd.limit_period == doctest::Approx(2 * M_PI / pd.beta).epsilon(1e-4));
}

TEST_CASE("eigenvalue function along the SYS-C curve is 2 + y") {
  SystemSpec c = sys("sys_c.json");
  auto cls = find_singularities(c);
  REQUIRE(cls.curves.size() == 1);
  auto data = eigenvalue_function(c, cls.curves[0]);
  CHECK_FALSE(data.on_double_cover);
  REQUIRE(data.samples.size() > 50);
  for (const auto& [f, g] : data.samples) {
    // F = y along the curve, gamma = 2 + y exactly
    CHECK(g == doctest::Approx(2.0 + f).epsilon(1e-10));
  }
}

TEST_CASE("eigenvalue function along the SYS-T curves is 2 pi cos-free") {
  SystemSpec t = sys("sys_t.json");
  auto cls = find_singularities(t);
  REQUIRE(cls.curves.size() == 2);
  for (const auto& curve : cls.curves) {
    auto data = eigenvalue_function(t, curve);
    for (const auto& [f, g] : data.samples)
      CHECK(std::abs(std::abs(g) - 2 * M_PI) < 1e-8);
  }
}

TEST_CASE("resonance: SYS-D is (1,1) traceless") {
  SystemSpec d = sys("sys_d.json");
  auto rec = classify(d, {0, 0});
  auto res = resonance_and_frequency(d, rec, {}, false);
  CHECK(res.a == 1);
  CHECK(res.b == 1);
  CHECK(res.h0 == doctest::Approx(1.0));
  CHECK(std::abs(res.trace) < 1e-12);
}

TEST_CASE("resonance: SYS-D2 is (1,2) with trace 1/2") {
  SystemSpec d2 = sys("sys_d2.json");
  auto rec = classify(d2, {0, 0});
  auto res = resonance_and_frequency(d2, rec, {}, false);
  CHECK(res.a == 1);
  CHECK(res.b == 2);
  CHECK(res.h0 == doctest::Approx(1.0));
  CHECK(res.trace == doctest::Approx(0.5));
}

TEST_CASE("frequency series of the h(z) = 1 + z model") {
  SystemSpec r = sys("sys_res.json");
  auto rec = classify(r, {0, 0});
  REQUIRE(rec.type == SingularityType::III);
  auto res = resonance_and_frequency(r, rec);
  REQUIRE(res.frequency_fitted);
  CHECK(res.a == 1);
  CHECK(res.b == 1);
  CHECK(res.ramification == 1);
  CHECK(res.frequency.coefficients[0] == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(res.frequency.coefficients[1] == doctest::Approx(1.0).epsilon(2e-3));
}

TEST_CASE("nilpotent invariants of SYS-E: E(x) = -2x, branches -+2 sqrt(y)") {
  SystemSpec e = sys("sys_e.json");
  auto rec = classify(e, {0, 0});
  auto nil = nilpotent_invariants(e, rec);
  // E(x) = -2x on |x| <= 0.5
  for (double x : {-0.5, -0.2, 0.1, 0.45}) {
    CHECK(std::abs(nil.eigencurve(x) - (-2.0 * x)) < 1e-6);
  }
  CHECK(std::abs(nil.eigencurve.coefficients[0]) < 1e-8);
  CHECK(nil.eigencurve.coefficients[1] == doctest::Approx(-2.0).epsilon(1e-7));
  REQUIRE(nil.branch_plus.ramification == 2);
  // branch_plus(y) = -2 sqrt(y), branch_minus(y) = +2 sqrt(y)
  CHECK(nil.branch_plus(0.09) == doctest::Approx(-0.6).epsilon(1e-5));
  CHECK(nil.branch_minus(0.09) == doctest::Approx(0.6).epsilon(1e-5));
}

TEST_CASE("nilpotent invariants: E(x) = -2x(1+x) when g1 = 1") {
  SurfaceModel win;
  win.kind = SurfaceKind::PlaneWindow;
  win.xmin = win.ymin = -2;
  win.xmax = win.ymax = 2;
  SystemSpec g(win, parse("(1 + x)*(y - x^2)"), parse("0"), parse("y"), {}, "g1");
  auto rec = classify(g, {0, 0});
  REQUIRE(rec.type == SingularityType::IV);
  auto nil = nilpotent_invariants(g, rec);
  for (double x : {-0.4, -0.1, 0.2, 0.5}) {
    CHECK(std::abs(nil.eigencurve(x) - (-2.0 * x * (1.0 + x))) < 1e-5);
  }
}

TEST_CASE("E(x) has E(0) = 0 and nonzero slope") {
  SystemSpec e = sys("sys_e.json");
  auto nil = nilpotent_invariants(e, classify(e, {0, 0}));
  CHECK(std::abs(nil.eigencurve(0.0)) < 1e-8);
  CHECK(std::abs(nil.eigencurve.coefficients[1]) > 1e-3);
  // normalization: E'(0) < 0
  CHECK(nil.eigencurve.coefficients[1] < 0);
}
