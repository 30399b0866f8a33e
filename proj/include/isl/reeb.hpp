// The Reeb graph (base space) of the singular fibration: vertices at level
// sets carrying Type I/III/IV points, edges as 1-parameter families of closed
// regular level sets, with level-set combinatorics, multiplicities, and the
// global coordinate-function check.
#pragma once

#include <string>
#include <vector>

#include "isl/flow.hpp"
#include "isl/singularities.hpp"

namespace isl {

struct ReebError : std::runtime_error {
  explicit ReebError(const std::string& m) : std::runtime_error(m) {}
};

// One smooth immersed circle of a singular level set: a cyclic sequence of
// graph edges glued by smooth continuation through the 4-valent vertices.
struct LevelCircle {
  std::vector<int> edge_ids;
  long long multiplicity = 0;  // vanishing order M_k of F, once measured
};

struct LevelSetStructure {
  bool is_point = false;  // Type I level component
  Vec2 point_location;
  LevelSetGraph graph;          // embedded graph (Type III) or single curve (IV)
  std::vector<LevelCircle> circles;
  std::vector<int> point_record_ids;  // indices into classification.points
  int type2_count = 0;
  bool twisted = false;
  bool mixed_iii_iv = false;  // unsupported for semi-local invariants
};

struct ReebVertex {
  double level = 0.0;
  LevelSetStructure structure;
};

struct ReebEdge {
  int from = -1, to = -1;  // vertex ids; -1 = open end
  double level_lo = 0.0, level_hi = 0.0;
  Vec2 seed;               // point on a representative mid-level curve
  double seed_level = 0.0;
  bool twisted = false;
  int type2_crossings = 0;
  bool cycle = false;      // family closes onto itself (circle base)
};

struct ReebGraph {
  std::vector<ReebVertex> vertices;
  std::vector<ReebEdge> edges;
  Classification classification;
  bool base_has_cycle = false;
};

ReebGraph build_reeb_graph(const SystemSpec& spec, const Tolerances& tol = {},
                           ExecMode mode = default_exec_mode());

// Multiplicities of F on the circles of a Type III vertex, the gcd reduction,
// and the reduced-integral recipe.
struct MultiplicityReport {
  std::vector<long long> orders;     // M_k per circle
  long long gcd = 1;                 // D
  std::vector<long long> reduced;    // m_k = M_k / D
  bool alpha_consistent = true;      // M identity at every Type III point
  bool root_single_valued = true;    // parity coloring admits the D-th root
  int reduced_gcd = 1;               // 1 or 2 after the recipe
  std::string recipe;                // human-readable reduction
};

MultiplicityReport level_multiplicities(const SystemSpec& spec, const ReebGraph& graph,
                                        int vertex_id, const Tolerances& tol = {});

struct CoordinateFunctionReport {
  bool global_exists = false;
  std::string obstruction;                 // empty when it exists
  std::vector<int> edge_orientations;      // +1 when F increases from -> to
  std::vector<MultiplicityReport> vertex_reports;
};

CoordinateFunctionReport coordinate_function(const SystemSpec& spec, const ReebGraph& graph,
                                             const Tolerances& tol = {});

// Move a point to a nearby level along grad F (stepwise Newton).
Vec2 walk_to_level(const SystemSpec& spec, Vec2 q, double target_level, int substeps = 12);

std::string reeb_to_dot(const ReebGraph& graph);

}  // namespace isl
