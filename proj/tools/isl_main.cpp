// Command-line driver: classify | reeb | invariants | compare | hamiltonize.
#include <cstdio>
#include <filesystem>
#include <string>

#include <CLI11.hpp>

#include "isl/report.hpp"

using namespace isl;
namespace fs = std::filesystem;

namespace {

struct CommonOpts {
  std::string out_dir = ".";
  int order = 8;
  double tol_fit = 1e-4;
  double tol_resonance = 1e-6;
  unsigned seed = 0;
};

Tolerances make_tolerances(const CommonOpts& opts) {
  Tolerances tol;
  tol.series_order = opts.order;
  tol.fit_residual = opts.tol_fit;
  tol.resonance = opts.tol_resonance;
  return tol;
}

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--out", opts.out_dir, "output directory")->capture_default_str();
  cmd->add_option("--order", opts.order, "Puiseux truncation order J")
      ->check(CLI::Range(2, 16))
      ->capture_default_str();
  cmd->add_option("--tol-fit", opts.tol_fit, "series fit residual tolerance")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--tol-resonance", opts.tol_resonance, "resonance detection tolerance")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", opts.seed, "seed offset for quasi-random sampling");
}

std::string out_path(const CommonOpts& opts, const char* name) {
  fs::create_directories(opts.out_dir);
  return (fs::path(opts.out_dir) / name).string();
}

SystemSpec load_checked(const std::string& path) {
  SystemSpec spec = load_manifest(path);
  ValidationReport rep = validate(spec);
  if (!rep.pass()) {
    std::fprintf(stderr,
                 "validation failed for '%s': max |X(F)| defect %.3e, X=0 on %.1f%%, dF=0 on "
                 "%.1f%% of the grid\n",
                 spec.label().c_str(), rep.max_integrability_defect,
                 100 * rep.fraction_field_zero, 100 * rep.fraction_df_zero);
    throw SchemaError("manifest validation failed");
  }
  return spec;
}

int cmd_classify(const std::string& manifest, const CommonOpts& opts) {
  SystemSpec spec = load_checked(manifest);
  Tolerances tol = make_tolerances(opts);
  Classification cls = find_singularities(spec, tol);
  write_file_atomic(out_path(opts, "classification.json"), classification_json(spec, cls));
  write_file_atomic(out_path(opts, "phase_portrait.svg"), phase_portrait_svg(spec, cls));
  if (cls.any_degenerate()) {
    std::fprintf(stderr, "degenerate singular points found: system rejected\n");
    return 2;
  }
  return 0;
}

int cmd_reeb(const std::string& manifest, const CommonOpts& opts) {
  SystemSpec spec = load_checked(manifest);
  Tolerances tol = make_tolerances(opts);
  ReebGraph graph = build_reeb_graph(spec, tol);
  write_file_atomic(out_path(opts, "reeb.json"), reeb_json(spec, graph));
  write_file_atomic(out_path(opts, "reeb.dot"), reeb_to_dot(graph));
  write_file_atomic(out_path(opts, "fibration.svg"), fibration_svg(spec, graph));
  return 0;
}

int cmd_invariants(const std::string& manifest, const CommonOpts& opts) {
  SystemSpec spec = load_checked(manifest);
  Tolerances tol = make_tolerances(opts);
  ReebGraph graph = build_reeb_graph(spec, tol);
  std::string json;
  try {
    json = invariants_json(spec, graph, tol);
  } catch (const InvariantError& e) {
    std::string what = e.what();
    if (what.find("mixed Type III-IV") != std::string::npos) {
      std::fprintf(stderr, "%s\n", what.c_str());
      return 3;
    }
    throw;
  }
  write_file_atomic(out_path(opts, "invariants.json"), json);
  return 0;
}

int cmd_compare(const std::string& manifest_a, const std::string& manifest_b,
                const std::string& mode, const CommonOpts& opts) {
  SystemSpec a = load_checked(manifest_a);
  SystemSpec b = load_checked(manifest_b);
  Tolerances tol = make_tolerances(opts);
  EquivalenceVerdict verdict =
      mode == "orbital" ? orbital_equivalent(a, b, tol) : isomorphic(a, b, tol);
  write_file_atomic(out_path(opts, "verdict.json"), verdict_json(a, b, verdict));
  return 0;
}

int cmd_hamiltonize(const std::string& manifest, const std::string& structure,
                    const CommonOpts& opts) {
  SystemSpec spec = load_checked(manifest);
  Tolerances tol = make_tolerances(opts);
  StructureKind kind =
      structure == "symplectic" ? StructureKind::Symplectic : StructureKind::Poisson;
  ConditionReport report =
      kind == StructureKind::Symplectic ? check_symplectic(spec, tol) : check_poisson(spec, tol);
  if (!report.pass()) {
    write_file_atomic(out_path(opts, "structure.json"), structure_json(spec, report, nullptr));
    return 0;
  }
  StructureField field = construct_structure(spec, kind, std::nullopt, tol);
  StructureVerification ver =
      verify_structure(spec, field, 1000, default_exec_mode(), tol);
  write_file_atomic(out_path(opts, "structure.json"), structure_json(spec, report, &ver));
  write_file_atomic(out_path(opts, "density.csv"), density_grid_csv(field, spec.surface()));
  write_file_atomic(out_path(opts, "density.svg"), density_svg(field, spec.surface()));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"integrable surface systems: classification, invariants, Hamiltonianization"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::string manifest, manifest_b, mode = "orbital", structure = "symplectic";

  auto* classify_cmd = app.add_subcommand("classify", "singular points and local invariants");
  classify_cmd->add_option("manifest", manifest, "system manifest (JSON)")->required();
  add_common(classify_cmd, opts);

  auto* reeb_cmd = app.add_subcommand("reeb", "Reeb graph of the singular fibration");
  reeb_cmd->add_option("manifest", manifest, "system manifest (JSON)")->required();
  add_common(reeb_cmd, opts);

  auto* inv_cmd = app.add_subcommand("invariants", "semi-local continuous invariants");
  inv_cmd->add_option("manifest", manifest, "system manifest (JSON)")->required();
  add_common(inv_cmd, opts);

  auto* cmp_cmd = app.add_subcommand("compare", "equivalence of two systems");
  cmp_cmd->add_option("manifest_a", manifest, "first manifest")->required();
  cmp_cmd->add_option("manifest_b", manifest_b, "second manifest")->required();
  cmp_cmd->add_option("--mode", mode, "orbital | iso")
      ->check(CLI::IsMember({"orbital", "iso"}))
      ->capture_default_str();
  add_common(cmp_cmd, opts);

  auto* ham_cmd = app.add_subcommand("hamiltonize", "symplectic / Poisson realization");
  ham_cmd->add_option("manifest", manifest, "system manifest (JSON)")->required();
  ham_cmd->add_option("--structure", structure, "symplectic | poisson")
      ->check(CLI::IsMember({"symplectic", "poisson"}))
      ->capture_default_str();
  add_common(ham_cmd, opts);

  CLI11_PARSE(app, argc, argv);

  try {
    if (classify_cmd->parsed()) return cmd_classify(manifest, opts);
    if (reeb_cmd->parsed()) return cmd_reeb(manifest, opts);
    if (inv_cmd->parsed()) return cmd_invariants(manifest, opts);
    if (cmp_cmd->parsed()) return cmd_compare(manifest, manifest_b, mode, opts);
    if (ham_cmd->parsed()) return cmd_hamiltonize(manifest, structure, opts);
  } catch (const SchemaError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
