// Hamiltonianization: the traceless / coordinate-function / orientability
// conditions, and construction of a verifying symplectic or Poisson density
// by partition-of-unity blending of pointwise solutions.
#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "isl/reeb.hpp"

namespace isl {

enum class StructureKind { Symplectic, Poisson };

struct HamiltonizeError : std::runtime_error {
  explicit HamiltonizeError(const std::string& m) : std::runtime_error(m) {}
};

struct ConditionReport {
  StructureKind kind = StructureKind::Symplectic;
  bool traceless = true;            // (i) every Type III point
  bool coordinate_function = true;  // (ii) global coordinate on the base
  bool orientable = true;           // (iii) surface / per-level-set
  bool no_type2_type4 = true;       // (iv) symplectic only
  std::string witness;
  bool pass() const {
    bool core = traceless && coordinate_function && orientable;
    return kind == StructureKind::Symplectic ? core && no_type2_type4 : core;
  }
};

ConditionReport check_symplectic(const SystemSpec& spec, const Tolerances& tol = {});
ConditionReport check_poisson(const SystemSpec& spec, const Tolerances& tol = {});

// omega = density * dx ^ dy (symplectic) or Pi = density * d/dx ^ d/dy
// (Poisson), blended from pointwise solutions of the defining equation with
// cosine bump patches over the singular points of X.
class StructureField {
 public:
  StructureField(const SystemSpec& spec, Expr hamiltonian, StructureKind kind);

  double density(const Vec2& p) const;
  StructureKind kind() const { return kind_; }
  const Expr& hamiltonian() const { return h_; }
  Vec2 hamiltonian_gradient(const Vec2& p) const;

  struct Patch {
    Vec2 center;
    double radius;
    double limit_value;
  };
  const std::vector<Patch>& patches() const { return patches_; }
  void add_patch(Vec2 center, double radius);

  // residual of the defining equation at p: |i_X omega - dH| or |X - Pi(., dH)|
  double residual(const Vec2& p) const;

 private:
  double pointwise(const Vec2& p, bool* valid) const;
  const SystemSpec* spec_;
  Expr h_, hx_, hy_;
  StructureKind kind_;
  std::vector<Patch> patches_;
};

// Build the structure (checks must have passed); H defaults to the system's
// first integral.
StructureField construct_structure(const SystemSpec& spec, StructureKind kind,
                                   std::optional<Expr> hamiltonian = std::nullopt,
                                   const Tolerances& tol = {});

struct StructureVerification {
  double max_residual = 0.0;
  double mean_residual = 0.0;
  double min_density_off_curves = 0.0;
  double max_density_on_curves = 0.0;
  bool sign_consistent = true;
  std::size_t samples = 0;
};

StructureVerification verify_structure(const SystemSpec& spec, const StructureField& field,
                                       std::size_t samples = 1000,
                                       ExecMode mode = default_exec_mode(),
                                       const Tolerances& tol = {});

// density samples on a grid, as CSV (x, y, w)
std::string density_grid_csv(const StructureField& field, const SurfaceModel& surf, int n = 64);

}  // namespace isl
