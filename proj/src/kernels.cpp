#include "isl/kernels.hpp"

#include <algorithm>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace isl {

namespace {
ExecMode g_mode = ExecMode::Parallel;
}

int worker_count() {
  int cap = 0;
  if (const char* env = std::getenv("ISL_THREADS")) {
    cap = std::atoi(env);
    if (cap < 1) cap = 1;
  }
#ifdef _OPENMP
  int n = omp_get_max_threads();
  if (cap > 0) n = std::min(n, cap);
  return std::max(1, n);
#else
  return 1;
#endif
}

ExecMode default_exec_mode() {
#ifdef _OPENMP
  if (worker_count() <= 1) return ExecMode::Serial;
  return g_mode;
#else
  return ExecMode::Serial;
#endif
}

void set_default_exec_mode(ExecMode mode) { g_mode = mode; }

void grid_map(std::size_t nx, std::size_t ny,
              const std::function<double(std::size_t, std::size_t)>& f,
              std::vector<double>& out, ExecMode mode) {
  out.resize(nx * ny);
  if (mode == ExecMode::Serial) {
    for (std::size_t j = 0; j < ny; ++j)
      for (std::size_t i = 0; i < nx; ++i) out[j * nx + i] = f(i, j);
    return;
  }
#ifdef _OPENMP
  const int threads = worker_count();
#pragma omp parallel for schedule(static) num_threads(threads)
  for (long long j = 0; j < static_cast<long long>(ny); ++j)
    for (std::size_t i = 0; i < nx; ++i)
      out[static_cast<std::size_t>(j) * nx + i] = f(i, static_cast<std::size_t>(j));
#else
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 0; i < nx; ++i) out[j * nx + i] = f(i, j);
#endif
}

void index_map(std::size_t n, const std::function<double(std::size_t)>& f,
               std::vector<double>& out, ExecMode mode) {
  out.resize(n);
  if (mode == ExecMode::Serial) {
    for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
    return;
  }
#ifdef _OPENMP
  const int threads = worker_count();
#pragma omp parallel for schedule(static) num_threads(threads)
  for (long long i = 0; i < static_cast<long long>(n); ++i)
    out[static_cast<std::size_t>(i)] = f(static_cast<std::size_t>(i));
#else
  for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
#endif
}

double reduce_max(const std::vector<double>& v) {
  double m = 0.0;
  bool first = true;
  for (double t : v) {
    if (first || t > m) m = t;
    first = false;
  }
  return m;
}

double reduce_sum(const std::vector<double>& v) {
  double s = 0.0;
  for (double t : v) s += t;
  return s;
}

}  // namespace isl
