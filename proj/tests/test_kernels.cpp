#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "isl/geometry.hpp"
#include "isl/kernels.hpp"

using namespace isl;

TEST_CASE("grid_map parallel output is bit-identical to serial reference") {
  auto f = [](std::size_t i, std::size_t j) {
    double x = 0.01 * static_cast<double>(i), y = 0.02 * static_cast<double>(j);
    return std::sin(x) * std::cos(y) + x * y;
  };
  std::vector<double> serial, parallel;
  grid_map(97, 83, f, serial, ExecMode::Serial);
  grid_map(97, 83, f, parallel, ExecMode::Parallel);
  REQUIRE(serial.size() == parallel.size());
  for (std::size_t k = 0; k < serial.size(); ++k) REQUIRE(serial[k] == parallel[k]);
}

TEST_CASE("index_map parallel output is bit-identical to serial reference") {
  auto f = [](std::size_t i) { return std::exp(-0.001 * static_cast<double>(i)); };
  std::vector<double> serial, parallel;
  index_map(10007, f, serial, ExecMode::Serial);
  index_map(10007, f, parallel, ExecMode::Parallel);
  for (std::size_t k = 0; k < serial.size(); ++k) REQUIRE(serial[k] == parallel[k]);
}

TEST_CASE("reductions use a deterministic serial order") {
  std::vector<double> v;
  for (int i = 0; i < 1000; ++i) v.push_back(std::sin(i * 0.37));
  CHECK(reduce_max(v) == reduce_max(v));
  CHECK(reduce_sum(v) == reduce_sum(v));
}

TEST_CASE("validate report identical in both execution modes") {
  SystemSpec spec = load_manifest(std::string(ISL_TEST_DATA_DIR) + "/sys_b.json");
  ValidationReport a = validate(spec, {}, ExecMode::Serial);
  ValidationReport b = validate(spec, {}, ExecMode::Parallel);
  CHECK(a.max_integrability_defect == b.max_integrability_defect);
  CHECK(a.fraction_field_zero == b.fraction_field_zero);
  CHECK(a.fraction_df_zero == b.fraction_df_zero);
}

TEST_CASE("worker_count respects ISL_THREADS") {
  CHECK(worker_count() >= 1);
}
