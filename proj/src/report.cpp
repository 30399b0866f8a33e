#include "isl/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace isl {

using nlohmann::ordered_json;

namespace {

constexpr int kSchemaVersion = 1;

ordered_json series_json(const PuiseuxSeries& s) {
  ordered_json j;
  j["base"] = s.base_variable;
  j["ramification"] = s.ramification;
  j["coefficients"] = s.coefficients;
  if (s.branch_id != 0) j["branch"] = s.branch_id;
  return j;
}

ordered_json point_json(const SingularPointRecord& rec) {
  ordered_json j;
  j["location"] = {rec.location.x, rec.location.y};
  j["type"] = to_string(rec.type);
  j["eigenvalues"] = {{"re", {rec.eig_re[0], rec.eig_re[1]}},
                      {"im", {rec.eig_im[0], rec.eig_im[1]}}};
  j["integral_value"] = rec.integral_value;
  j["on_curve"] = rec.on_curve;
  if (!rec.degenerate_reason.empty()) j["degenerate_reason"] = rec.degenerate_reason;
  return j;
}

ordered_json samples_json(const std::vector<std::pair<double, double>>& samples) {
  ordered_json arr = ordered_json::array();
  for (const auto& [t, v] : samples) arr.push_back({t, v});
  return arr;
}

struct SvgCanvas {
  std::ostringstream out;
  double x0, x1, y0, y1;
  SvgCanvas(double xa, double xb, double ya, double yb) : x0(xa), x1(xb), y0(ya), y1(yb) {
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 720 720\">\n";
    out << "<rect width=\"720\" height=\"720\" fill=\"#fff\"/>\n";
  }
  double px(double x) const { return 30 + 660 * (x - x0) / (x1 - x0); }
  double py(double y) const { return 690 - 660 * (y - y0) / (y1 - y0); }
  void polyline(const std::vector<Vec2>& pts, const char* color, double width) {
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"" << width
        << "\" points=\"";
    for (const auto& p : pts) out << px(p.x) << ',' << py(p.y) << ' ';
    out << "\"/>\n";
  }
  void dot(Vec2 p, const char* color, double r) {
    out << "<circle cx=\"" << px(p.x) << "\" cy=\"" << py(p.y) << "\" r=\"" << r
        << "\" fill=\"" << color << "\"/>\n";
  }
  std::string finish() {
    out << "</svg>\n";
    return out.str();
  }
};

const char* type_color(SingularityType t) {
  switch (t) {
    case SingularityType::I: return "#1a7f37";
    case SingularityType::II: return "#b58900";
    case SingularityType::III: return "#c0392b";
    case SingularityType::IV: return "#7d3c98";
    default: return "#333";
  }
}

}  // namespace

std::string classification_json(const SystemSpec& spec, const Classification& cls) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["label"] = spec.label();
  ordered_json pts = ordered_json::array();
  for (const auto& rec : cls.points) pts.push_back(point_json(rec));
  j["singular_points"] = pts;
  ordered_json curves = ordered_json::array();
  for (const auto& c : cls.curves) {
    ordered_json cj;
    cj["closed"] = c.closed;
    cj["point_count"] = c.points.size();
    ordered_json sample = ordered_json::array();
    for (std::size_t i = 0; i < c.points.size(); i += std::max<std::size_t>(1, c.points.size() / 24))
      sample.push_back({c.points[i].x, c.points[i].y});
    cj["polyline_sample"] = sample;
    cj["special_points"] = c.special_point_indices;
    curves.push_back(cj);
  }
  j["singular_curves"] = curves;
  j["degenerate"] = cls.any_degenerate();
  return j.dump(2) + "\n";
}

std::string reeb_json(const SystemSpec& spec, const ReebGraph& graph) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["label"] = spec.label();
  ordered_json verts = ordered_json::array();
  for (const auto& v : graph.vertices) {
    ordered_json vj;
    vj["level"] = v.level;
    vj["is_point"] = v.structure.is_point;
    vj["type2_count"] = v.structure.type2_count;
    vj["circles"] = v.structure.circles.size();
    vj["twisted"] = v.structure.twisted;
    vj["mixed_iii_iv"] = v.structure.mixed_iii_iv;
    ordered_json types = ordered_json::array();
    for (int rid : v.structure.point_record_ids)
      types.push_back(to_string(graph.classification.points[rid].type));
    vj["point_types"] = types;
    verts.push_back(vj);
  }
  j["vertices"] = verts;
  ordered_json edges = ordered_json::array();
  for (const auto& e : graph.edges) {
    ordered_json ej;
    ej["from"] = e.from;
    ej["to"] = e.to;
    ej["level_range"] = {e.level_lo, e.level_hi};
    ej["twisted"] = e.twisted;
    ej["cycle"] = e.cycle;
    ej["type2_crossings"] = e.type2_crossings;
    edges.push_back(ej);
  }
  j["edges"] = edges;
  j["base_has_cycle"] = graph.base_has_cycle;
  return j.dump(2) + "\n";
}

std::string invariants_json(const SystemSpec& spec, const ReebGraph& graph,
                            const Tolerances& tol) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["label"] = spec.label();

  ordered_json edges = ordered_json::array();
  for (std::size_t e = 0; e < graph.edges.size(); ++e) {
    ordered_json ej;
    ej["edge"] = e;
    try {
      MonodromyRecord rec = monodromy_function(spec, graph, static_cast<int>(e), +1, 10, tol);
      ej["monodromy_samples"] = samples_json(rec.samples);
      if (rec.fitted) ej["fit"] = series_json(rec.fit);
    } catch (const std::exception& ex) {
      ej["error"] = ex.what();
    }
    edges.push_back(ej);
  }
  j["edge_monodromy"] = edges;

  ordered_json cocycles = ordered_json::array();
  ordered_json regularized = ordered_json::array();
  for (std::size_t v = 0; v < graph.vertices.size(); ++v) {
    const auto& st = graph.vertices[v].structure;
    if (st.mixed_iii_iv)
      throw InvariantError("mixed Type III-IV level set: unsupported");
    bool has_iii = false;
    int iv_count = 0;
    for (int rid : st.point_record_ids) {
      if (graph.classification.points[rid].type == SingularityType::III) has_iii = true;
      if (graph.classification.points[rid].type == SingularityType::IV) ++iv_count;
    }
    if (has_iii && !st.is_point) {
      ordered_json cj;
      cj["vertex"] = v;
      try {
        PeriodCocycle pc = period_cocycle(spec, graph, static_cast<int>(v), 1.0, 14, tol);
        ordered_json comps = ordered_json::array();
        for (const auto& s : pc.components) comps.push_back(series_json(s));
        cj["components"] = comps;
        ordered_json reps = ordered_json::array();
        for (const auto& s : normalize_cocycle(pc, 3)) reps.push_back(series_json(s));
        cj["normalized_representative"] = reps;
      } catch (const std::exception& ex) {
        cj["error"] = ex.what();
      }
      cocycles.push_back(cj);
    }
    if (iv_count == 1 && !has_iii) {
      ordered_json rj;
      rj["vertex"] = v;
      int rid = -1;
      for (int r : st.point_record_ids)
        if (graph.classification.points[r].type == SingularityType::IV) rid = r;
      try {
        auto rm = regularized_monodromy(spec, graph, static_cast<int>(v), 0.25, 0.18, 12, +1, tol);
        rj["t_hat_samples"] = samples_json(rm.transit.regularized);
        rj["m_hat_samples"] = samples_json(rm.monodromy);
        rj["truncated_samples"] = samples_json(rm.truncated);
        rj["taylor_at_zero"] = rm.taylor_at_zero;
      } catch (const std::exception&) {
        // open level sets: report the transit only
        try {
          auto rt = regularized_time(spec, graph.classification.points[rid], 1.0, 0.3, 14, tol);
          rj["t_hat_samples"] = samples_json(rt.regularized);
          rj["t_hat_fit"] = series_json(rt.smooth_fit);
        } catch (const std::exception& ex) {
          rj["error"] = ex.what();
        }
      }
      regularized.push_back(rj);
    }
  }
  j["period_cocycles"] = cocycles;
  j["regularized_monodromy"] = regularized;
  return j.dump(2) + "\n";
}

std::string verdict_json(const SystemSpec& a, const SystemSpec& b,
                         const EquivalenceVerdict& verdict) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["systems"] = {a.label(), b.label()};
  j["mode"] = verdict.kind == VerdictKind::Orbital ? "orbital" : "isomorphism";
  switch (verdict.result) {
    case VerdictResult::Equivalent: j["result"] = "equivalent"; break;
    case VerdictResult::Inequivalent: j["result"] = "inequivalent"; break;
    case VerdictResult::Inconclusive: j["result"] = "inconclusive"; break;
  }
  j["witness"] = verdict.witness;
  j["worst_residual"] = verdict.worst_residual;
  ordered_json vm = ordered_json::array();
  for (auto [x, y] : verdict.vertex_matching) vm.push_back({x, y});
  j["vertex_matching"] = vm;
  ordered_json em = ordered_json::array();
  for (auto [x, y] : verdict.edge_matching) em.push_back({x, y});
  j["edge_matching"] = em;
  return j.dump(2) + "\n";
}

std::string structure_json(const SystemSpec& spec, const ConditionReport& report,
                           const StructureVerification* verification) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["label"] = spec.label();
  j["structure"] = report.kind == StructureKind::Symplectic ? "symplectic" : "poisson";
  ordered_json cond;
  cond["traceless"] = report.traceless;
  cond["global_coordinate_function"] = report.coordinate_function;
  cond["orientable"] = report.orientable;
  if (report.kind == StructureKind::Symplectic)
    cond["no_type2_type4"] = report.no_type2_type4;
  j["conditions"] = cond;
  j["pass"] = report.pass();
  if (!report.witness.empty()) j["witness"] = report.witness;
  if (verification) {
    ordered_json v;
    v["samples"] = verification->samples;
    v["max_residual"] = verification->max_residual;
    v["mean_residual"] = verification->mean_residual;
    v["min_density_off_curves"] = verification->min_density_off_curves;
    v["max_density_on_curves"] = verification->max_density_on_curves;
    v["sign_consistent"] = verification->sign_consistent;
    j["verification"] = v;
  }
  return j.dump(2) + "\n";
}

std::string phase_portrait_svg(const SystemSpec& spec, const Classification& cls) {
  const SurfaceModel& surf = spec.surface();
  SvgCanvas canvas(surf.domain_xmin(), surf.domain_xmax(), surf.domain_ymin(),
                   surf.domain_ymax());
  // short flow segments from a coarse grid of starting points
  OdeOptions opts;
  opts.rel_tol = 1e-8;
  Dopri5 solver(spec.field_fn(), opts);
  for (int i = 0; i < 9; ++i) {
    for (int jj = 0; jj < 9; ++jj) {
      Vec2 p{surf.domain_xmin() +
                 (surf.domain_xmax() - surf.domain_xmin()) * (i + 0.5) / 9.0,
             surf.domain_ymin() +
                 (surf.domain_ymax() - surf.domain_ymin()) * (jj + 0.5) / 9.0};
      double speed = spec.field(p).norm();
      if (speed < 1e-9) continue;
      std::vector<Vec2> pts;
      try {
        auto trajectory = solver.sample(p, std::min(3.0, 1.2 / speed));
        for (auto& [t, q] : trajectory) {
          if (!surf.contains(q)) break;
          pts.push_back(surf.wrap(q));
        }
      } catch (const OdeError&) {
      }
      if (pts.size() > 2) canvas.polyline(pts, "#9bb7d4", 0.8);
    }
  }
  for (const auto& c : cls.curves) {
    std::vector<Vec2> pts;
    for (const auto& q : c.points) pts.push_back(surf.wrap(q));
    canvas.polyline(pts, "#b58900", 1.6);
  }
  for (const auto& rec : cls.points) canvas.dot(rec.location, type_color(rec.type), 5);
  return canvas.finish();
}

std::string fibration_svg(const SystemSpec& spec, const ReebGraph& graph) {
  const SurfaceModel& surf = spec.surface();
  SvgCanvas canvas(surf.domain_xmin(), surf.domain_xmax(), surf.domain_ymin(),
                   surf.domain_ymax());
  // a few regular levels per edge family
  for (const auto& e : graph.edges) {
    for (double f : {0.25, 0.5, 0.75}) {
      double c = e.level_lo + f * (e.level_hi - e.level_lo);
      try {
        Vec2 seed = walk_to_level(spec, e.seed, c, 10);
        LevelCurve curve = trace_level_curve(spec, seed);
        std::vector<Vec2> pts;
        for (int k = 0; k <= 300; ++k) pts.push_back(surf.wrap(curve.at(curve.length() * k / 300.0)));
        canvas.polyline(pts, "#5a7ea6", 1.0);
      } catch (const std::exception&) {
      }
    }
  }
  // singular level sets
  for (const auto& v : graph.vertices) {
    if (v.structure.is_point) {
      canvas.dot(v.structure.point_location, "#1a7f37", 6);
      continue;
    }
    for (const auto& ge : v.structure.graph.edges) {
      std::vector<Vec2> pts;
      for (const auto& q : ge.curve.points) pts.push_back(surf.wrap(q));
      canvas.polyline(pts, "#c0392b", 1.8);
    }
  }
  return canvas.finish();
}

std::string density_svg(const StructureField& field, const SurfaceModel& surf, int n) {
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << n << ' ' << n
      << "\">\n";
  // heatmap: blue negative, white zero, red positive
  double wmax = 1e-12;
  std::vector<double> vals(static_cast<std::size_t>(n) * n, 0.0);
  for (int jj = 0; jj < n; ++jj)
    for (int i = 0; i < n; ++i) {
      Vec2 p{surf.domain_xmin() + (surf.domain_xmax() - surf.domain_xmin()) * (i + 0.5) / n,
             surf.domain_ymin() + (surf.domain_ymax() - surf.domain_ymin()) * (jj + 0.5) / n};
      double w;
      try {
        w = field.density(p);
      } catch (const HamiltonizeError&) {
        w = 0.0;
      }
      vals[static_cast<std::size_t>(jj) * n + i] = w;
      wmax = std::max(wmax, std::abs(w));
    }
  for (int jj = 0; jj < n; ++jj)
    for (int i = 0; i < n; ++i) {
      double w = vals[static_cast<std::size_t>(jj) * n + i] / wmax;
      int r = w > 0 ? 255 : static_cast<int>(255 * (1 + w));
      int b = w < 0 ? 255 : static_cast<int>(255 * (1 - w));
      int g = static_cast<int>(255 * (1 - std::abs(w)));
      out << "<rect x=\"" << i << "\" y=\"" << (n - 1 - jj) << "\" width=\"1\" height=\"1\" fill=\"rgb("
          << r << ',' << g << ',' << b << ")\"/>\n";
    }
  out << "</svg>\n";
  return out.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + tmp + "' for writing");
    out << content;
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("cannot rename temporary file onto '" + path + "'");
}

}  // namespace isl
