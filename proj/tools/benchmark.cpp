// Serial vs OpenMP comparison of the data-parallel kernels behind validation,
// singularity sweeps, and structure verification.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>

#include "isl/hamiltonize.hpp"
#include "isl/kernels.hpp"
#include "isl/singularities.hpp"

using namespace isl;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

template <typename F>
double time_best_of(int reps, F&& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    auto t0 = Clock::now();
    f();
    best = std::min(best, seconds_since(t0));
  }
  return best;
}

void row(const char* name, double serial, double parallel) {
  std::printf("%-34s %10.4f s %10.4f s %8.2fx\n", name, serial, parallel,
              serial / parallel);
}

}  // namespace

int main(int argc, char** argv) {
  std::string data_dir = argc > 1 ? argv[1] : "tests/data";
  SystemSpec sys_b = load_manifest(data_dir + "/sys_b.json");
  SystemSpec sys_h = load_manifest(data_dir + "/sys_h.json");

  std::printf("workers: %d\n", worker_count());
  std::printf("%-34s %12s %12s %9s\n", "kernel", "serial", "openmp", "speedup");

  {
    Tolerances tol;
    tol.validation_grid = 512;
    double ts = time_best_of(3, [&] { (void)validate(sys_b, tol, ExecMode::Serial); });
    double tp = time_best_of(3, [&] { (void)validate(sys_b, tol, ExecMode::Parallel); });
    row("validation grid scan (512x512)", ts, tp);
    // the two paths must agree exactly
    ValidationReport a = validate(sys_b, tol, ExecMode::Serial);
    ValidationReport b = validate(sys_b, tol, ExecMode::Parallel);
    if (a.max_integrability_defect != b.max_integrability_defect) {
      std::fprintf(stderr, "serial/parallel validation reports differ!\n");
      return 1;
    }
  }
  {
    Tolerances tol;
    tol.validation_grid = 160;
    double ts = time_best_of(2, [&] { (void)find_singularities(sys_h, tol, ExecMode::Serial); });
    double tp =
        time_best_of(2, [&] { (void)find_singularities(sys_h, tol, ExecMode::Parallel); });
    row("Newton seed sweep (160x160)", ts, tp);
  }
  {
    StructureField field = construct_structure(sys_h, StructureKind::Symplectic);
    double ts =
        time_best_of(3, [&] { (void)verify_structure(sys_h, field, 20000, ExecMode::Serial); });
    double tp = time_best_of(
        3, [&] { (void)verify_structure(sys_h, field, 20000, ExecMode::Parallel); });
    row("structure verification (20k pts)", ts, tp);
  }
  {
    std::vector<double> out;
    std::function<double(std::size_t)> f = [](std::size_t i) {
      double x = 1e-4 * static_cast<double>(i);
      return std::sin(x) * std::exp(-x * x * 1e-4) + std::atan(x);
    };
    double ts = time_best_of(3, [&] { index_map(2000000, f, out, ExecMode::Serial); });
    double tp = time_best_of(3, [&] { index_map(2000000, f, out, ExecMode::Parallel); });
    row("index map (2e6 evaluations)", ts, tp);
  }
  return 0;
}
