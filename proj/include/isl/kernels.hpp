// Data-parallel kernels behind the pipeline's grid scans and per-sample maps.
// Every kernel has a serial reference implementation and an OpenMP variant
// that produces bit-identical output (disjoint writes, static schedule,
// serial reductions). The serial path is kept for testing and benchmarking.
#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace isl {

enum class ExecMode { Serial, Parallel };

// Process-wide default; Parallel unless ISL_THREADS=1 or no OpenMP.
ExecMode default_exec_mode();
void set_default_exec_mode(ExecMode mode);

// Number of worker threads honored by the Parallel mode (ISL_THREADS caps it).
int worker_count();

// out[j * nx + i] = f(i, j) over an nx * ny grid.
void grid_map(std::size_t nx, std::size_t ny,
              const std::function<double(std::size_t, std::size_t)>& f,
              std::vector<double>& out, ExecMode mode);

// out[i] = f(i) for i in [0, n).
void index_map(std::size_t n, const std::function<double(std::size_t)>& f,
               std::vector<double>& out, ExecMode mode);

// Deterministic reductions over a vector (serial accumulation order).
double reduce_max(const std::vector<double>& v);
double reduce_sum(const std::vector<double>& v);

// Generic element map with a caller-provided result type.
template <typename T, typename F>
void element_map(std::size_t n, F&& f, std::vector<T>& out, ExecMode mode) {
  out.resize(n);
  if (mode == ExecMode::Serial) {
    for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
    return;
  }
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(worker_count())
  for (long long i = 0; i < static_cast<long long>(n); ++i)
    out[static_cast<std::size_t>(i)] = f(static_cast<std::size_t>(i));
#else
  for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
#endif
}

}  // namespace isl
