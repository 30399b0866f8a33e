// JSON / SVG / CSV / DOT serialization of analysis results, plus atomic file
// output for the CLI.
#pragma once

#include <optional>
#include <string>

#include "isl/equivalence.hpp"
#include "isl/hamiltonize.hpp"
#include "isl/invariants.hpp"

namespace isl {

std::string classification_json(const SystemSpec& spec, const Classification& cls);
std::string reeb_json(const SystemSpec& spec, const ReebGraph& graph);
std::string invariants_json(const SystemSpec& spec, const ReebGraph& graph,
                            const Tolerances& tol);
std::string verdict_json(const SystemSpec& a, const SystemSpec& b,
                         const EquivalenceVerdict& verdict);
std::string structure_json(const SystemSpec& spec, const ConditionReport& report,
                           const StructureVerification* verification);

// phase portrait: a few orbits per region plus the singular set
std::string phase_portrait_svg(const SystemSpec& spec, const Classification& cls);
// sampled level curves with the Reeb graph inset
std::string fibration_svg(const SystemSpec& spec, const ReebGraph& graph);
std::string density_svg(const StructureField& field, const SurfaceModel& surf, int n = 48);

void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace isl
