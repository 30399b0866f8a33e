#include "isl/hamiltonize.hpp"

#include <algorithm>
#include <cmath>

namespace isl {

namespace {

ConditionReport check_conditions(const SystemSpec& spec, StructureKind kind,
                                 const Tolerances& tol) {
  ConditionReport rep;
  rep.kind = kind;
  ReebGraph graph = build_reeb_graph(spec, tol);

  // (i) traceless Type III points
  for (const auto& rec : graph.classification.points) {
    if (rec.type != SingularityType::III) continue;
    double tr = rec.eig_re[0] + rec.eig_re[1];
    if (std::abs(tr) > 1e-8) {
      rep.traceless = false;
      rep.witness = "Type III point with trace " + std::to_string(tr);
    }
  }

  // (ii) global coordinate function on the base
  CoordinateFunctionReport cf = coordinate_function(spec, graph, tol);
  if (!cf.global_exists) {
    rep.coordinate_function = false;
    if (rep.witness.empty()) rep.witness = "no global coordinate function: " + cf.obstruction;
  }

  if (kind == StructureKind::Symplectic) {
    // (iii) global orientability
    if (!spec.surface().orientable()) {
      rep.orientable = false;
      if (rep.witness.empty()) rep.witness = "surface is non-orientable";
    }
    // (iv) no Type II or IV points
    for (const auto& rec : graph.classification.points) {
      if (rec.type == SingularityType::II || rec.type == SingularityType::IV) {
        rep.no_type2_type4 = false;
        if (rep.witness.empty())
          rep.witness = std::string("singular point of Type ") + to_string(rec.type);
        break;
      }
    }
    if (!graph.classification.curves.empty()) {
      rep.no_type2_type4 = false;
      if (rep.witness.empty()) rep.witness = "singular curves of Type II/IV present";
    }
  } else {
    // (iii) orientable near every level set: no twisted flags anywhere
    for (const auto& v : graph.vertices)
      if (v.structure.twisted) rep.orientable = false;
    for (const auto& e : graph.edges)
      if (e.twisted) rep.orientable = false;
    // twisted exceptional fibers without singular points (Mobius core):
    // probe the core circle of a non-orientable strip directly
    if (spec.surface().kind == SurfaceKind::Strip && spec.surface().strip_sign < 0) {
      try {
        LevelCurve core = trace_level_curve(
            spec, {0.37 * spec.surface().width, 0.0}, tol);
        if (core.twisted) rep.orientable = false;
      } catch (const FlowError&) {
        rep.orientable = false;  // conservatively non-orientable near the core
      }
    }
    if (!rep.orientable && rep.witness.empty())
      rep.witness = "level set with a Mobius-band neighborhood";
  }
  return rep;
}

}  // namespace

ConditionReport check_symplectic(const SystemSpec& spec, const Tolerances& tol) {
  return check_conditions(spec, StructureKind::Symplectic, tol);
}

ConditionReport check_poisson(const SystemSpec& spec, const Tolerances& tol) {
  return check_conditions(spec, StructureKind::Poisson, tol);
}

// ---------------------------------------------------------------------------

StructureField::StructureField(const SystemSpec& spec, Expr hamiltonian, StructureKind kind)
    : spec_(&spec), h_(std::move(hamiltonian)), kind_(kind) {
  hx_ = differentiate(h_, 0);
  hy_ = differentiate(h_, 1);
}

Vec2 StructureField::hamiltonian_gradient(const Vec2& p) const {
  Vec2 w = spec_->surface().wrap(p);
  return {eval(hx_, w.x, w.y, spec_->params()), eval(hy_, w.x, w.y, spec_->params())};
}

double StructureField::pointwise(const Vec2& p, bool* valid) const {
  Vec2 X = spec_->field(p);
  Vec2 dH = hamiltonian_gradient(p);
  if (valid) *valid = true;
  if (kind_ == StructureKind::Symplectic) {
    // i_X omega = dH: w Xx = Hy and -w Xy = Hx
    if (std::abs(X.x) >= std::abs(X.y)) {
      if (std::abs(X.x) < 1e-12) {
        if (valid) *valid = false;
        return 0.0;
      }
      return dH.y / X.x;
    }
    return -dH.x / X.y;
  }
  // Poisson: X = Pi(., dH): Xx = w Hy and Xy = -w Hx
  if (std::abs(dH.y) >= std::abs(dH.x)) {
    if (std::abs(dH.y) < 1e-12) {
      if (valid) *valid = false;
      return 0.0;
    }
    return X.x / dH.y;
  }
  return -X.y / dH.x;
}

void StructureField::add_patch(Vec2 center, double radius) {
  // limit value: median of the pointwise density on a ring around the point
  std::vector<double> ring;
  for (int k = 0; k < 32; ++k) {
    double a = 2 * M_PI * k / 32.0;
    Vec2 q = center + Vec2{std::cos(a), std::sin(a)} * radius;
    bool ok = false;
    double w = pointwise(q, &ok);
    if (ok) ring.push_back(w);
  }
  if (ring.empty()) throw HamiltonizeError("patch ring has no valid pointwise density");
  std::nth_element(ring.begin(), ring.begin() + ring.size() / 2, ring.end());
  patches_.push_back({center, radius, ring[ring.size() / 2]});
}

double StructureField::density(const Vec2& p) const {
  // cosine-taper blend of patch limit values over the pointwise solution;
  // all patch densities solve the same linear pointwise equation, so the
  // convex combination still solves it wherever both are valid
  const SurfaceModel& surf = spec_->surface();
  double acc = 0.0, wsum = 0.0;
  for (const auto& patch : patches_) {
    double d = (surf.wrap(p) - surf.wrap(patch.center)).norm();
    if (surf.periodic_x()) {
      double L = surf.domain_xmax() - surf.domain_xmin();
      Vec2 a = surf.wrap(p), b = surf.wrap(patch.center);
      d = std::min(d, std::abs(std::abs(a.x - b.x) - L) + std::abs(a.y - b.y));
    }
    double r0 = patch.radius, r1 = 1.2 * patch.radius;  // 20% overlap taper
    if (d >= r1) continue;
    double t = d <= r0 ? 1.0 : 0.5 * (1.0 + std::cos(M_PI * (d - r0) / (r1 - r0)));
    acc += t * patch.limit_value;
    wsum += t;
  }
  if (wsum >= 1.0) return acc / wsum;
  bool ok = false;
  double w = pointwise(p, &ok);
  if (!ok) {
    if (wsum > 0) return acc / wsum;
    throw HamiltonizeError("density undefined away from every patch");
  }
  return acc + (1.0 - wsum) * w;
}

double StructureField::residual(const Vec2& p) const {
  double w = density(p);
  Vec2 X = spec_->field(p);
  Vec2 dH = hamiltonian_gradient(p);
  if (kind_ == StructureKind::Symplectic) {
    Vec2 r{-w * X.y - dH.x, w * X.x - dH.y};
    return r.norm();
  }
  Vec2 r{X.x - w * dH.y, X.y + w * dH.x};
  return r.norm();
}

StructureField construct_structure(const SystemSpec& spec, StructureKind kind,
                                   std::optional<Expr> hamiltonian, const Tolerances& tol) {
  ConditionReport rep = kind == StructureKind::Symplectic ? check_symplectic(spec, tol)
                                                          : check_poisson(spec, tol);
  if (!rep.pass())
    throw HamiltonizeError("Hamiltonianization conditions fail: " + rep.witness);
  Expr H = hamiltonian ? *hamiltonian : spec.integral_expr();
  StructureField field(spec, H, kind);
  // patches over the isolated singular points (Type I/III; Poisson also IV)
  Classification cls = find_singularities(spec, tol);
  for (const auto& recp : cls.points) {
    if (recp.type == SingularityType::I || recp.type == SingularityType::III ||
        recp.type == SingularityType::IV)
      field.add_patch(recp.location, 0.08);
  }
  return field;
}

StructureVerification verify_structure(const SystemSpec& spec, const StructureField& field,
                                       std::size_t samples, ExecMode mode,
                                       const Tolerances& tol) {
  StructureVerification out;
  out.samples = samples;
  const SurfaceModel& surf = spec.surface();
  auto pts = halton_2d(samples);
  Classification cls = find_singularities(spec, tol);

  auto near_singular_curve = [&](const Vec2& p) {
    for (const auto& curve : cls.curves)
      for (const auto& q : curve.points)
        if (surf.same_point(p, q, 0.03)) return true;
    return false;
  };

  std::vector<double> residuals, densities, flags;
  index_map(
      samples,
      [&](std::size_t i) {
        Vec2 p{surf.domain_xmin() + pts[i].first * (surf.domain_xmax() - surf.domain_xmin()),
               surf.domain_ymin() + pts[i].second * (surf.domain_ymax() - surf.domain_ymin())};
        return field.residual(p);
      },
      residuals, mode);
  index_map(
      samples,
      [&](std::size_t i) {
        Vec2 p{surf.domain_xmin() + pts[i].first * (surf.domain_xmax() - surf.domain_xmin()),
               surf.domain_ymin() + pts[i].second * (surf.domain_ymax() - surf.domain_ymin())};
        return field.density(p);
      },
      densities, mode);
  index_map(
      samples,
      [&](std::size_t i) {
        Vec2 p{surf.domain_xmin() + pts[i].first * (surf.domain_xmax() - surf.domain_xmin()),
               surf.domain_ymin() + pts[i].second * (surf.domain_ymax() - surf.domain_ymin())};
        return near_singular_curve(p) ? 1.0 : 0.0;
      },
      flags, mode);

  out.max_residual = reduce_max(residuals);
  out.mean_residual = reduce_sum(residuals) / static_cast<double>(samples);
  double min_off = 1e300;
  int pos = 0, neg = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    if (flags[i] > 0.5) continue;
    min_off = std::min(min_off, std::abs(densities[i]));
    (densities[i] > 0 ? pos : neg)++;
  }
  out.min_density_off_curves = min_off;
  out.sign_consistent = (pos == 0) || (neg == 0);

  // |density| on the singular curves themselves
  double max_on = 0.0;
  for (const auto& curve : cls.curves) {
    for (std::size_t i = 0; i < curve.points.size(); i += 7)
      max_on = std::max(max_on, std::abs(field.density(curve.points[i])));
  }
  out.max_density_on_curves = max_on;
  return out;
}

std::string density_grid_csv(const StructureField& field, const SurfaceModel& surf, int n) {
  std::string out = "x,y,w\n";
  char buf[96];
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      Vec2 p{surf.domain_xmin() + (surf.domain_xmax() - surf.domain_xmin()) * (i + 0.5) / n,
             surf.domain_ymin() + (surf.domain_ymax() - surf.domain_ymin()) * (j + 0.5) / n};
      double w;
      try {
        w = field.density(p);
      } catch (const HamiltonizeError&) {
        w = std::nan("");
      }
      std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g\n", p.x, p.y, w);
      out += buf;
    }
  }
  return out;
}

}  // namespace isl
