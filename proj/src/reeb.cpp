#include "isl/reeb.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>

namespace isl {

namespace {

double level_tol(double c) { return 1e-7 * (1.0 + std::abs(c)); }

struct NewtonToLevel {
  const SystemSpec& spec;
  bool operator()(Vec2& p, double target, double tol) const {
    for (int it = 0; it < 40; ++it) {
      double err = spec.integral(p) - target;
      if (std::abs(err) <= tol) return true;
      Vec2 g = spec.integral_gradient(p);
      double g2 = g.dot(g);
      if (g2 < 1e-26) return false;
      p = p - g * (err / g2);
    }
    return std::abs(spec.integral(p) - target) <= 10 * tol;
  }
};

double point_to_polyline(const Vec2& q, const std::vector<Vec2>& pts, const SurfaceModel& surf) {
  double best = 1e300;
  Vec2 b = surf.wrap(q);
  for (const auto& p : pts) {
    Vec2 a = surf.wrap(p);
    double d = (a - b).norm();
    if (surf.periodic_x()) {
      double L = surf.domain_xmax() - surf.domain_xmin();
      d = std::min(d, std::abs(std::abs(a.x - b.x) - L) + std::abs(a.y - b.y));
    }
    best = std::min(best, d);
  }
  return best;
}

int uf_find(std::vector<int>& parent, int i) {
  while (parent[i] != i) {
    parent[i] = parent[parent[i]];
    i = parent[i];
  }
  return i;
}

void uf_union(std::vector<int>& parent, int a, int b) {
  parent[uf_find(parent, a)] = uf_find(parent, b);
}

}  // namespace

Vec2 walk_to_level(const SystemSpec& spec, Vec2 q, double target_level, int substeps) {
  NewtonToLevel newton{spec};
  double c0 = spec.integral(q);
  if (c0 == target_level) return q;
  double ratio = std::pow(1e-3, 1.0 / substeps);
  for (int k = 1; k <= substeps; ++k) {
    double c = target_level + (c0 - target_level) * std::pow(ratio, k);
    if (!newton(q, c, 1e-12 * (1 + std::abs(c)))) throw ReebError("level walk stalled");
  }
  if (!newton(q, target_level, 1e-12 * (1 + std::abs(target_level))))
    throw ReebError("level walk stalled at target");
  return q;
}

// ---------------------------------------------------------------------------
// Level-set component enumeration at a regular level.
// ---------------------------------------------------------------------------

namespace {

std::vector<Vec2> level_crossings(const SystemSpec& spec, double c, int lines = 36,
                                  int samples = 360) {
  const SurfaceModel& surf = spec.surface();
  std::vector<Vec2> hits;
  double x0 = surf.domain_xmin(), x1 = surf.domain_xmax();
  double y0 = surf.domain_ymin(), y1 = surf.domain_ymax();
  auto scan = [&](Vec2 a, Vec2 b) {
    double prev = spec.integral(a) - c;
    for (int i = 1; i <= samples; ++i) {
      double t = static_cast<double>(i) / samples;
      Vec2 p = a + (b - a) * t;
      double cur = spec.integral(p) - c;
      if (cur == 0.0) {
        hits.push_back(p);  // sample landed exactly on the level
      } else if (prev * cur < 0) {
        Vec2 lo = a + (b - a) * ((i - 1.0) / samples), hi = p;
        double flo = prev;
        for (int bi = 0; bi < 50; ++bi) {
          Vec2 mid = (lo + hi) * 0.5;
          if ((spec.integral(mid) - c) * flo <= 0)
            hi = mid;
          else
            lo = mid;
        }
        hits.push_back((lo + hi) * 0.5);
      }
      prev = cur;
    }
  };
  for (int l = 0; l < lines; ++l) {
    double fx = x0 + (x1 - x0) * (l + 0.5) / lines;
    double fy = y0 + (y1 - y0) * (l + 0.5) / lines;
    scan({fx, y0 + 1e-9}, {fx, y1 - 1e-9});
    scan({x0 + 1e-9, fy}, {x1 - 1e-9, fy});
  }
  return hits;
}

std::vector<LevelCurve> closed_components(const SystemSpec& spec, double c,
                                          const Tolerances& tol) {
  std::vector<Vec2> hits = level_crossings(spec, c);
  std::vector<bool> used(hits.size(), false);
  std::vector<LevelCurve> out;
  const SurfaceModel& surf = spec.surface();
  for (std::size_t i = 0; i < hits.size(); ++i) {
    if (used[i]) continue;
    used[i] = true;
    LevelCurve curve;
    try {
      curve = trace_level_curve(spec, hits[i], tol);
    } catch (const FlowError&) {
      continue;
    }
    for (std::size_t j = i + 1; j < hits.size(); ++j) {
      if (!used[j] && point_to_polyline(hits[j], curve.points, surf) < 3 * tol.curve_step)
        used[j] = true;
    }
    if (curve.closed) out.push_back(std::move(curve));
  }
  return out;
}

// local extrema of F along the domain boundary: band separators where level
// sets start or stop touching the window edge (not fibration vertices)
std::vector<double> boundary_critical_levels(const SystemSpec& spec) {
  const SurfaceModel& surf = spec.surface();
  std::vector<double> out;
  if (surf.kind == SurfaceKind::FlatTorus) return out;
  auto scan = [&](Vec2 a, Vec2 b) {
    const int n = 800;
    double prev2 = 0, prev = 0;
    for (int i = 0; i <= n; ++i) {
      Vec2 p = a + (b - a) * (static_cast<double>(i) / n);
      double v = spec.integral(p);
      if (i >= 2 && (prev - prev2) * (v - prev) < 0) out.push_back(prev);
      prev2 = prev;
      prev = v;
    }
    out.push_back(spec.integral(a));
    out.push_back(spec.integral(b));
  };
  double x0 = surf.domain_xmin(), x1 = surf.domain_xmax();
  double y0 = surf.domain_ymin(), y1 = surf.domain_ymax();
  if (surf.kind == SurfaceKind::PlaneWindow) {
    scan({x0, y0}, {x1, y0});
    scan({x0, y1}, {x1, y1});
    scan({x0, y0}, {x0, y1});
    scan({x1, y0}, {x1, y1});
  } else {
    scan({x0, y0}, {x1, y0});
    scan({x0, y1}, {x1, y1});
  }
  return out;
}

// tangent direction of a graph-edge end, pointing away from the vertex
Vec2 end_direction(const LevelCurve& curve, bool at_start) {
  const auto& pts = curve.points;
  std::size_t k = std::min<std::size_t>(2, pts.size() - 1);
  if (at_start) return (pts[k] - pts[0]).normalized();
  return (pts[pts.size() - 1 - k] - pts.back()).normalized();
}

// smooth pairing of edge ends at the 4-valent vertices -> immersed circles
// (and open arcs for boundary-ended level sets)
std::vector<LevelCircle> decompose_circles(const LevelSetGraph& graph) {
  const int ne = static_cast<int>(graph.edges.size());
  std::vector<int> he_vertex(2 * ne, -1);
  std::vector<Vec2> he_dir(2 * ne);
  for (int e = 0; e < ne; ++e) {
    he_vertex[2 * e] = graph.edges[e].from_vertex;
    he_vertex[2 * e + 1] = graph.edges[e].to_vertex;
    he_dir[2 * e] = end_direction(graph.edges[e].curve, true);
    he_dir[2 * e + 1] = end_direction(graph.edges[e].curve, false);
  }
  std::vector<int> pair(2 * ne, -1);
  for (std::size_t v = 0; v < graph.vertices.size(); ++v) {
    std::vector<int> ends;
    for (int h = 0; h < 2 * ne; ++h)
      if (he_vertex[h] == static_cast<int>(v)) ends.push_back(h);
    std::vector<bool> done(ends.size(), false);
    for (std::size_t i = 0; i < ends.size(); ++i) {
      if (done[i]) continue;
      double best = 2.0;
      int bj = -1;
      for (std::size_t j = i + 1; j < ends.size(); ++j) {
        if (done[j]) continue;
        double dot = he_dir[ends[i]].dot(he_dir[ends[j]]);
        if (dot < best) {
          best = dot;
          bj = static_cast<int>(j);
        }
      }
      if (bj >= 0) {
        pair[ends[i]] = ends[bj];
        pair[ends[bj]] = ends[i];
        done[i] = done[bj] = true;
      }
    }
  }

  std::vector<LevelCircle> circles;
  std::vector<bool> visited(2 * ne, false);
  for (int h0 = 0; h0 < 2 * ne; ++h0) {  // open arcs from boundary ends
    if (visited[h0] || pair[h0] != -1) continue;
    if (he_vertex[h0] != -1 && pair[h0] == -1 && he_vertex[h0] >= 0) {
      // unpaired vertex end (odd valency); treat as arc start as well
    }
    LevelCircle arc;
    int h = h0;
    while (h != -1 && !visited[h]) {
      visited[h] = true;
      arc.edge_ids.push_back(h / 2);
      int o = h ^ 1;
      visited[o] = true;
      h = pair[o];
    }
    circles.push_back(std::move(arc));
  }
  for (int h0 = 0; h0 < 2 * ne; ++h0) {  // closed circles
    if (visited[h0]) continue;
    LevelCircle circ;
    int h = h0;
    do {
      visited[h] = true;
      circ.edge_ids.push_back(h / 2);
      int o = h ^ 1;
      visited[o] = true;
      h = pair[o];
    } while (h != h0 && h != -1 && !visited[h]);
    circles.push_back(std::move(circ));
  }
  return circles;
}

}  // namespace

// ---------------------------------------------------------------------------
// build_reeb_graph
// ---------------------------------------------------------------------------

ReebGraph build_reeb_graph(const SystemSpec& spec, const Tolerances& tol, ExecMode mode) {
  ReebGraph graph;
  graph.classification = find_singularities(spec, tol, mode);
  for (const auto& rec : graph.classification.points)
    if (rec.type == SingularityType::Degenerate)
      throw ReebError("degenerate singular point: system is not weakly nondegenerate (" +
                      rec.degenerate_reason + ")");

  const SurfaceModel& surf = spec.surface();

  struct CritPoint {
    int record_id;
    Vec2 p;
    SingularityType type;
  };
  std::vector<CritPoint> crits;
  for (std::size_t i = 0; i < graph.classification.points.size(); ++i) {
    const auto& rec = graph.classification.points[i];
    if (rec.type == SingularityType::I || rec.type == SingularityType::III ||
        rec.type == SingularityType::IV)
      crits.push_back({static_cast<int>(i), rec.location, rec.type});
  }
  std::vector<double> critical_levels;
  for (const auto& cp : crits) {
    double c = graph.classification.points[cp.record_id].integral_value;
    bool found = false;
    for (double l : critical_levels)
      if (std::abs(l - c) <= level_tol(c)) found = true;
    if (!found) critical_levels.push_back(c);
  }
  std::sort(critical_levels.begin(), critical_levels.end());

  for (double c : critical_levels) {
    std::vector<CritPoint> at_level;
    for (const auto& cp : crits)
      if (std::abs(graph.classification.points[cp.record_id].integral_value - c) <=
          level_tol(c))
        at_level.push_back(cp);

    std::vector<Vec2> iii_pts;
    std::vector<int> iii_ids;
    for (const auto& cp : at_level)
      if (cp.type == SingularityType::III) {
        iii_pts.push_back(cp.p);
        iii_ids.push_back(cp.record_id);
      }
    std::vector<bool> iv_done(at_level.size(), false);

    if (!iii_pts.empty()) {
      LevelSetGraph lg = trace_level_graph(spec, iii_pts, c, tol);
      std::vector<int> parent(lg.vertices.size());
      std::iota(parent.begin(), parent.end(), 0);
      for (const auto& e : lg.edges)
        if (e.from_vertex >= 0 && e.to_vertex >= 0) uf_union(parent, e.from_vertex, e.to_vertex);
      std::vector<int> roots;
      for (std::size_t i = 0; i < lg.vertices.size(); ++i) {
        int r = uf_find(parent, static_cast<int>(i));
        if (std::find(roots.begin(), roots.end(), r) == roots.end()) roots.push_back(r);
      }
      for (int root : roots) {
        ReebVertex vert;
        vert.level = c;
        LevelSetGraph sub;
        sub.level = c;
        std::vector<int> vmap(lg.vertices.size(), -1);
        for (std::size_t i = 0; i < lg.vertices.size(); ++i) {
          if (uf_find(parent, static_cast<int>(i)) == root) {
            vmap[i] = static_cast<int>(sub.vertices.size());
            sub.vertices.push_back(lg.vertices[i]);
            vert.structure.point_record_ids.push_back(iii_ids[i]);
          }
        }
        for (const auto& e : lg.edges) {
          if (e.from_vertex >= 0 && vmap[e.from_vertex] < 0) continue;
          if (e.from_vertex < 0 && e.to_vertex >= 0 && vmap[e.to_vertex] < 0) continue;
          LevelGraphEdge copy = e;
          copy.from_vertex = e.from_vertex >= 0 ? vmap[e.from_vertex] : -1;
          copy.to_vertex = e.to_vertex >= 0 ? vmap[e.to_vertex] : -1;
          sub.edges.push_back(copy);
        }
        for (const auto& e : sub.edges) {
          vert.structure.type2_count += static_cast<int>(e.curve.singular_hits.size());
          vert.structure.twisted = vert.structure.twisted || e.curve.twisted;
        }
        for (std::size_t ai = 0; ai < at_level.size(); ++ai) {
          if (at_level[ai].type != SingularityType::IV) continue;
          for (const auto& e : sub.edges) {
            if (point_to_polyline(at_level[ai].p, e.curve.points, surf) < 5 * tol.curve_step) {
              vert.structure.mixed_iii_iv = true;
              vert.structure.point_record_ids.push_back(at_level[ai].record_id);
              iv_done[ai] = true;
            }
          }
        }
        vert.structure.circles = decompose_circles(sub);
        vert.structure.graph = std::move(sub);
        graph.vertices.push_back(std::move(vert));
      }
    }

    for (std::size_t ai = 0; ai < at_level.size(); ++ai) {
      if (at_level[ai].type != SingularityType::IV || iv_done[ai]) continue;
      LevelCurve curve = trace_level_curve(spec, at_level[ai].p, tol);
      ReebVertex vert;
      vert.level = c;
      vert.structure.point_record_ids.push_back(at_level[ai].record_id);
      for (std::size_t aj = ai + 1; aj < at_level.size(); ++aj) {
        if (at_level[aj].type != SingularityType::IV || iv_done[aj]) continue;
        if (point_to_polyline(at_level[aj].p, curve.points, surf) < 5 * tol.curve_step) {
          vert.structure.point_record_ids.push_back(at_level[aj].record_id);
          iv_done[aj] = true;
        }
      }
      iv_done[ai] = true;
      vert.structure.twisted = curve.twisted;
      for (const auto& hit : curve.singular_hits) {
        bool is_iv = false;
        for (int rid : vert.structure.point_record_ids)
          if (surf.same_point(hit.location, graph.classification.points[rid].location, 1e-4))
            is_iv = true;
        if (!is_iv) ++vert.structure.type2_count;
      }
      LevelSetGraph lone;
      lone.level = c;
      LevelGraphEdge le;
      le.curve = std::move(curve);
      lone.edges.push_back(std::move(le));
      if (lone.edges[0].curve.closed) {
        LevelCircle circ;
        circ.edge_ids.push_back(0);
        vert.structure.circles.push_back(circ);
      }
      vert.structure.graph = std::move(lone);
      graph.vertices.push_back(std::move(vert));
    }

    for (const auto& cp : at_level) {
      if (cp.type != SingularityType::I) continue;
      ReebVertex vert;
      vert.level = c;
      vert.structure.is_point = true;
      vert.structure.point_location = cp.p;
      vert.structure.point_record_ids.push_back(cp.record_id);
      graph.vertices.push_back(std::move(vert));
    }
  }

  // ---- edges
  double f_min = 1e300, f_max = -1e300;
  {
    const int n = tol.validation_grid;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Vec2 p{surf.domain_xmin() + (surf.domain_xmax() - surf.domain_xmin()) * (i + 0.5) / n,
               surf.domain_ymin() + (surf.domain_ymax() - surf.domain_ymin()) * (j + 0.5) / n};
        double v = spec.integral(p);
        f_min = std::min(f_min, v);
        f_max = std::max(f_max, v);
      }
  }
  // cell centers undershoot extrema attained at critical points
  for (double c : critical_levels) {
    f_min = std::min(f_min, c);
    f_max = std::max(f_max, c);
  }
  bool circle_valued = false;
  if (surf.periodic_y()) {
    for (double fx : {0.13, 0.41, 0.77}) {
      double x = surf.domain_xmin() + (surf.domain_xmax() - surf.domain_xmin()) * fx;
      double lo = spec.integral({x, surf.domain_ymin() + 1e-9});
      double hi = spec.integral({x, surf.domain_ymax() - 1e-9});
      if (std::abs(hi - lo) > 1e-6 * (1 + std::abs(hi))) circle_valued = true;
    }
  }

  std::vector<double> seps = critical_levels;
  for (double b : boundary_critical_levels(spec)) seps.push_back(b);
  seps.push_back(f_min);
  seps.push_back(f_max);
  std::sort(seps.begin(), seps.end());
  seps.erase(std::unique(seps.begin(), seps.end(),
                         [](double a, double b) { return std::abs(a - b) <= 4 * level_tol(a); }),
             seps.end());

  auto is_critical = [&](double c) {
    for (double l : critical_levels)
      if (std::abs(l - c) <= 4 * level_tol(c)) return true;
    return false;
  };

  struct BandFamily {
    LevelCurve curve;
    Vec2 seed;
    double level = 0;
    int band = -1;
    int attach_lo = -1, attach_hi = -1;
  };
  std::vector<BandFamily> families;
  for (std::size_t b = 0; b + 1 < seps.size(); ++b) {
    double lo = seps[b], hi = seps[b + 1];
    if (hi - lo <= 16 * level_tol(lo)) continue;
    // off-center probe: avoids grid-aligned exact hits of round levels
    double mid = lo + 0.5127341 * (hi - lo);
    for (auto& curve : closed_components(spec, mid, tol)) {
      BandFamily fam;
      fam.seed = curve.at(0.0);
      fam.level = mid;
      fam.band = static_cast<int>(b);
      fam.curve = std::move(curve);
      families.push_back(std::move(fam));
    }
  }

  auto vertex_near = [&](const Vec2& q, double c) -> int {
    double best = 0.35;
    int id = -1;
    for (std::size_t v = 0; v < graph.vertices.size(); ++v) {
      if (std::abs(graph.vertices[v].level - c) > 1e-5 * (1 + std::abs(c))) continue;
      const auto& st = graph.vertices[v].structure;
      double d;
      if (st.is_point) {
        d = (surf.wrap(q) - surf.wrap(st.point_location)).norm();
      } else {
        d = 1e300;
        for (const auto& e : st.graph.edges)
          d = std::min(d, point_to_polyline(q, e.curve.points, surf));
      }
      if (d < best) {
        best = d;
        id = static_cast<int>(v);
      }
    }
    return id;
  };

  std::vector<int> uf(families.size());
  std::iota(uf.begin(), uf.end(), 0);

  for (std::size_t i = 0; i < families.size(); ++i) {
    BandFamily& fam = families[i];
    int b = fam.band;
    for (int side = 0; side < 2; ++side) {
      double sep = side == 0 ? seps[b] : seps[b + 1];
      double range = std::abs(fam.level - sep);
      double gap = std::max(1e-4 * range, 1e-9 * (1 + std::abs(sep)));
      double target = side == 0 ? sep + gap : sep - gap;
      Vec2 probe;
      try {
        probe = walk_to_level(spec, fam.seed, target, 16);
      } catch (const ReebError&) {
        continue;
      }
      if (is_critical(sep)) {
        int v = vertex_near(probe, sep);
        (side == 0 ? fam.attach_lo : fam.attach_hi) = v;
      } else {
        double beyond = side == 0 ? sep - gap : sep + gap;
        if (beyond <= f_min || beyond >= f_max) continue;
        Vec2 q2;
        try {
          q2 = walk_to_level(spec, probe, beyond, 8);
        } catch (const ReebError&) {
          continue;
        }
        for (std::size_t jf = 0; jf < families.size(); ++jf) {
          if (families[jf].band != (side == 0 ? b - 1 : b + 1)) continue;
          Vec2 q3;
          try {
            q3 = walk_to_level(spec, q2, families[jf].level, 12);
          } catch (const ReebError&) {
            continue;
          }
          if (point_to_polyline(q3, families[jf].curve.points, surf) < 0.08) {
            uf_union(uf, static_cast<int>(i), static_cast<int>(jf));
            break;
          }
        }
      }
    }
  }

  std::vector<int> root_to_edge(families.size(), -1);
  for (std::size_t i = 0; i < families.size(); ++i) {
    int r = uf_find(uf, static_cast<int>(i));
    if (root_to_edge[r] == -1) {
      ReebEdge e;
      e.level_lo = seps[families[i].band];
      e.level_hi = seps[families[i].band + 1];
      e.seed = families[i].seed;
      e.seed_level = families[i].level;
      e.twisted = families[i].curve.twisted;
      e.type2_crossings = static_cast<int>(families[i].curve.singular_hits.size());
      root_to_edge[r] = static_cast<int>(graph.edges.size());
      graph.edges.push_back(e);
    }
    ReebEdge& e = graph.edges[root_to_edge[r]];
    e.level_lo = std::min(e.level_lo, seps[families[i].band]);
    e.level_hi = std::max(e.level_hi, seps[families[i].band + 1]);
    if (families[i].attach_lo >= 0 &&
        std::abs(seps[families[i].band] - e.level_lo) <= 4 * level_tol(e.level_lo))
      e.from = families[i].attach_lo;
    if (families[i].attach_hi >= 0 &&
        std::abs(seps[families[i].band + 1] - e.level_hi) <= 4 * level_tol(e.level_hi))
      e.to = families[i].attach_hi;
  }
  // endpoint attachments can live on inner bands after merging; recover them
  for (std::size_t i = 0; i < families.size(); ++i) {
    int r = uf_find(uf, static_cast<int>(i));
    ReebEdge& e = graph.edges[root_to_edge[r]];
    if (families[i].attach_lo >= 0 && e.from < 0) e.from = families[i].attach_lo;
    if (families[i].attach_hi >= 0 && e.to < 0) e.to = families[i].attach_hi;
  }

  if (circle_valued && graph.vertices.empty() && graph.edges.size() == 1) {
    graph.edges[0].cycle = true;
    graph.base_has_cycle = true;
  }
  if (!graph.base_has_cycle && !graph.vertices.empty()) {
    std::vector<int> vp(graph.vertices.size());
    std::iota(vp.begin(), vp.end(), 0);
    for (const auto& e : graph.edges) {
      if (e.from < 0 || e.to < 0) continue;
      if (uf_find(vp, e.from) == uf_find(vp, e.to)) {
        graph.base_has_cycle = true;
        break;
      }
      uf_union(vp, e.from, e.to);
    }
  }
  return graph;
}

// ---------------------------------------------------------------------------
// Multiplicities.
// ---------------------------------------------------------------------------

MultiplicityReport level_multiplicities(const SystemSpec& spec, const ReebGraph& graph,
                                        int vertex_id, const Tolerances& tol) {
  const ReebVertex& vert = graph.vertices.at(vertex_id);
  const SurfaceModel& surf = spec.surface();
  if (vert.structure.is_point) throw ReebError("multiplicities need a 1-dimensional level set");
  MultiplicityReport rep;
  const double c0 = vert.level;

  for (const auto& circ : vert.structure.circles) {
    if (circ.edge_ids.empty()) throw ReebError("empty circle in level-set structure");
    const LevelCurve& curve = vert.structure.graph.edges[circ.edge_ids[0]].curve;
    double smid = 0.5 * curve.length();
    Vec2 q = curve.at(smid);
    Vec2 nu = curve.tangent(smid).perp();
    std::vector<double> A, b;
    std::size_t m = 0;
    for (int j = 0; j < 14; ++j) {
      double t = 0.08 * std::pow(0.78, j);
      double w = std::abs(spec.integral(q + nu * t) - c0);
      if (w <= 0) continue;
      A.push_back(1.0);
      A.push_back(std::log(t));
      b.push_back(std::log(w));
      ++m;
    }
    if (m < 6) throw ReebError("cannot probe the vanishing order");
    auto fit = solve_least_squares(A, m, 2, b);
    double order = fit[1];
    long M = std::lround(order);
    if (M < 1 || std::abs(order - static_cast<double>(M)) > 0.05)
      throw ReebError("non-integer vanishing order " + std::to_string(order));
    rep.orders.push_back(M);
  }
  rep.gcd = gcd_list(rep.orders);
  if (rep.gcd == 0) throw ReebError("no circles to measure");
  for (long long M : rep.orders) rep.reduced.push_back(M / rep.gcd);

  // M identity at every Type III point of the level set: the circle through
  // the unstable ends vanishes to order k*b, through the stable ends k*a
  for (std::size_t vi = 0; vi < vert.structure.graph.vertices.size(); ++vi) {
    const Vec2 p = vert.structure.graph.vertices[vi];
    SingularPointRecord rec = classify(spec, p);
    if (rec.type != SingularityType::III) continue;
    ResonanceData res = resonance_and_frequency(spec, rec, tol, false);
    double jmat[4];
    spec.jacobian(p, jmat);
    double tr = jmat[0] + jmat[3], det = jmat[0] * jmat[3] - jmat[1] * jmat[2];
    double sq = std::sqrt(std::max(0.0, tr * tr - 4 * det));
    double l1 = 0.5 * (tr + sq);
    auto eigvec = [&](double l) -> Vec2 {
      double a = jmat[0] - l, bb = jmat[1], cc = jmat[2], dd = jmat[3] - l;
      Vec2 w = (std::abs(a) + std::abs(bb) >= std::abs(cc) + std::abs(dd)) ? Vec2{-bb, a}
                                                                           : Vec2{-dd, cc};
      return w.normalized();
    };
    Vec2 ud = eigvec(l1);
    long long mu = -1, ms = -1;
    for (std::size_t ci = 0; ci < vert.structure.circles.size(); ++ci) {
      for (int eid : vert.structure.circles[ci].edge_ids) {
        const auto& ge = vert.structure.graph.edges[eid];
        if (ge.from_vertex == static_cast<int>(vi)) {
          Vec2 dir = end_direction(ge.curve, true);
          (std::abs(dir.dot(ud)) > 0.8 ? mu : ms) = rep.orders[ci];
        }
        if (ge.to_vertex == static_cast<int>(vi)) {
          Vec2 dir = end_direction(ge.curve, false);
          (std::abs(dir.dot(ud)) > 0.8 ? mu : ms) = rep.orders[ci];
        }
      }
    }
    if (mu < 0 || ms < 0) continue;
    if (mu % res.b != 0 || ms % res.a != 0 || mu / res.b != ms / res.a)
      rep.alpha_consistent = false;
  }

  // D-th root single-valuedness via parity coloring of the adjacent regions
  if (rep.gcd % 2 == 0) {
    std::vector<int> edge_ids;
    for (std::size_t e = 0; e < graph.edges.size(); ++e)
      if (graph.edges[e].from == vertex_id || graph.edges[e].to == vertex_id)
        edge_ids.push_back(static_cast<int>(e));
    std::map<int, LevelCurve> edge_curves;
    auto family_curve = [&](int k) -> const LevelCurve& {
      auto it = edge_curves.find(k);
      if (it == edge_curves.end())
        it = edge_curves.emplace(k, trace_level_curve(spec, graph.edges[edge_ids[k]].seed, tol))
                 .first;
      return it->second;
    };
    std::vector<int> parent(edge_ids.size()), parity(edge_ids.size(), 0);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<std::pair<int, int>(int)> find_p = [&](int i) -> std::pair<int, int> {
      if (parent[i] == i) return {i, 0};
      auto [r, par] = find_p(parent[i]);
      parity[i] = parity[i] ^ par;
      parent[i] = r;
      return {r, parity[i]};
    };
    bool consistent = true;
    for (std::size_t ci = 0; ci < vert.structure.circles.size(); ++ci) {
      const LevelCurve& curve =
          vert.structure.graph.edges[vert.structure.circles[ci].edge_ids[0]].curve;
      double smid = 0.5 * curve.length();
      Vec2 q = curve.at(smid);
      Vec2 nu = curve.tangent(smid).perp();
      int sides[2] = {-1, -1};
      for (int sgn = 0; sgn < 2; ++sgn) {
        Vec2 probe = q + nu * (sgn == 0 ? 0.05 : -0.05);
        double c = spec.integral(probe);
        for (std::size_t k = 0; k < edge_ids.size(); ++k) {
          const ReebEdge& e = graph.edges[edge_ids[k]];
          if (c <= std::min(e.level_lo, e.level_hi) || c >= std::max(e.level_lo, e.level_hi))
            continue;
          try {
            Vec2 moved = walk_to_level(spec, probe, e.seed_level, 10);
            if (point_to_polyline(moved, family_curve(static_cast<int>(k)).points, surf) <
                0.08) {
              sides[sgn] = static_cast<int>(k);
              break;
            }
          } catch (...) {
            continue;
          }
        }
      }
      if (sides[0] < 0 || sides[1] < 0) continue;
      int flip = static_cast<int>(rep.reduced[ci] % 2);  // root sign flips iff m_k odd
      auto [ra, pa] = find_p(sides[0]);
      auto [rb, pb] = find_p(sides[1]);
      if (ra == rb) {
        if (((pa ^ pb) & 1) != flip) consistent = false;
      } else {
        parent[ra] = rb;
        parity[ra] = pa ^ pb ^ flip;
      }
    }
    rep.root_single_valued = consistent;
  } else {
    rep.root_single_valued = true;  // odd real roots are single-valued
  }
  rep.reduced_gcd = rep.root_single_valued ? 1 : 2;
  std::ostringstream recipe;
  if (rep.gcd == 1)
    recipe << "integral already has minimal multiplicities";
  else if (rep.root_single_valued)
    recipe << "take the sign-coherent " << rep.gcd << "-th root of (F - level)";
  else
    recipe << "take (F - level)^2 and its " << (2 * rep.gcd)
           << "-th root; multiplicities stay doubled";
  rep.recipe = recipe.str();
  return rep;
}

// ---------------------------------------------------------------------------
// Coordinate function.
// ---------------------------------------------------------------------------

CoordinateFunctionReport coordinate_function(const SystemSpec& spec, const ReebGraph& graph,
                                             const Tolerances& tol) {
  CoordinateFunctionReport rep;
  rep.global_exists = true;
  for (const auto& e : graph.edges) rep.edge_orientations.push_back(+1);

  if (graph.base_has_cycle) {
    rep.global_exists = false;
    rep.obstruction = "base is a cycle";
    return rep;
  }
  for (std::size_t v = 0; v < graph.vertices.size(); ++v) {
    const auto& st = graph.vertices[v].structure;
    if (st.is_point) continue;  // F is Morse there: base multiplicity 1
    bool has_iii = false;
    for (int rid : st.point_record_ids)
      if (graph.classification.points[rid].type == SingularityType::III) has_iii = true;
    if (!has_iii) continue;  // Type IV level sets are regular for F
    MultiplicityReport mrep = level_multiplicities(spec, graph, static_cast<int>(v), tol);
    long long worst = 0;
    for (long long m : mrep.reduced) worst = std::max(worst, m);
    bool ok = mrep.root_single_valued && worst <= 1;
    rep.vertex_reports.push_back(std::move(mrep));
    if (!ok && rep.global_exists) {
      rep.global_exists = false;
      rep.obstruction = "vertex " + std::to_string(v) + " admits no multiplicity-1 integral";
    }
  }
  return rep;
}

std::string reeb_to_dot(const ReebGraph& graph) {
  std::ostringstream out;
  out << "graph reeb {\n";
  for (std::size_t v = 0; v < graph.vertices.size(); ++v) {
    const auto& st = graph.vertices[v].structure;
    int nI = 0, nIII = 0, nIV = 0;
    for (int rid : st.point_record_ids) {
      switch (graph.classification.points[rid].type) {
        case SingularityType::I: ++nI; break;
        case SingularityType::III: ++nIII; break;
        case SingularityType::IV: ++nIV; break;
        default: break;
      }
    }
    out << "  v" << v << " [label=\"F=" << graph.vertices[v].level;
    if (nI) out << " I:" << nI;
    if (nIII) out << " III:" << nIII;
    if (nIV) out << " IV:" << nIV;
    if (st.twisted) out << " twisted";
    out << "\"];\n";
  }
  int open_id = 0;
  for (std::size_t e = 0; e < graph.edges.size(); ++e) {
    const auto& ed = graph.edges[e];
    if (ed.cycle) {
      out << "  c" << e << " [shape=point];\n  c" << e << " -- c" << e << " [label=\"e" << e
          << " cycle\"];\n";
      continue;
    }
    std::string a = ed.from >= 0 ? "v" + std::to_string(ed.from)
                                 : "o" + std::to_string(open_id++);
    std::string b = ed.to >= 0 ? "v" + std::to_string(ed.to) : "o" + std::to_string(open_id++);
    if (ed.from < 0) out << "  " << a << " [shape=none label=\"\"];\n";
    if (ed.to < 0) out << "  " << b << " [shape=none label=\"\"];\n";
    out << "  " << a << " -- " << b << " [label=\"e" << e << "\"];\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace isl
