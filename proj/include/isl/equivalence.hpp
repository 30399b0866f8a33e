// Deciding orbital equivalence and smooth isomorphism of two systems:
// labeled Reeb-graph matching, then simultaneous left-equivalence fitting of
// the invariant functions over matched edges.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "isl/invariants.hpp"
#include "isl/reeb.hpp"

namespace isl {

enum class VerdictKind { Orbital, Isomorphism };
enum class VerdictResult { Equivalent, Inequivalent, Inconclusive };

struct EquivalenceVerdict {
  VerdictKind kind = VerdictKind::Orbital;
  VerdictResult result = VerdictResult::Inconclusive;
  std::string witness;  // obstruction for inequivalent, summary for equivalent
  std::vector<std::pair<int, int>> vertex_matching;
  std::vector<std::pair<int, int>> edge_matching;
  double worst_residual = 0.0;
};

// Discrete invariants that label a vertex for the graph matching.
struct VertexLabel {
  bool is_point = false;
  int n_type1 = 0, n_type3 = 0, n_type4 = 0;
  int type2_count = 0;
  int circle_count = 0;
  bool twisted = false;
  int degree = 0;
  std::vector<std::pair<int, int>> resonances;  // sorted (a, b) of Type III points
  bool operator==(const VertexLabel& o) const = default;
};

struct SystemAnalysis {
  ReebGraph graph;
  std::vector<VertexLabel> labels;
};

SystemAnalysis analyze(const SystemSpec& spec, const Tolerances& tol = {});

EquivalenceVerdict orbital_equivalent(const SystemSpec& a, const SystemSpec& b,
                                      const Tolerances& tol = {});

EquivalenceVerdict isomorphic(const SystemSpec& a, const SystemSpec& b,
                              const Tolerances& tol = {});

// Left-equivalence fit: find monotone psi with f ~ g o psi on samples of f
// and g (each a sorted list of (t, value)). Fails when ranges mismatch or a
// smooth monotone reparametrization cannot align them.
struct LeftEquivalenceFit {
  bool success = false;
  double residual = 0.0;
  std::string failure;         // reason when unsuccessful
  MonotoneCubic psi;           // valid when success
  double derivative_min = 0.0, derivative_max = 0.0;
};

LeftEquivalenceFit left_equivalence_fit(const std::vector<std::pair<double, double>>& f,
                                        const std::vector<std::pair<double, double>>& g,
                                        int knots = 12, double tol_rel = 1e-3);

}  // namespace isl
