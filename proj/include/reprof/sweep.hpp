#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "reprof/scenarios.hpp"
#include "reprof/solve.hpp"

namespace reprof {

struct SweepConfig {
  ScenarioConfig scenario;  // scenario.seed is the base seed
  int instances = 10;
  std::vector<Method> methods{Method::Greedy, Method::FR, Method::NR};
  SolveOptions solve;
  bool aggregate = true;
  int jobs = 1;
  bool record_runtime = true;  // runtime is the only column that varies between runs
};

struct SweepRow {
  int instance = 0;
  std::uint64_t seed = 0;
  std::size_t flows = 0;  // after aggregation
  std::size_t links = 0;
  Method method = Method::Greedy;
  std::string status = "ok";
  double W = 0.0, W_fr = 0.0, W_nr = 0.0;
  double runtime_s = 0.0;
  std::vector<double> ratios;  // D / d_hat per flow with d_hat > 0
  std::vector<std::string> ratio_classes;
  std::vector<double> C;
};

// Instance k uses seed derive_seed(base, k). Rows are ordered by instance,
// then by method in the configured order.
std::vector<SweepRow> run_sweep(const SweepConfig& cfg);

inline constexpr int kSweepSchemaVersion = 1;

// Instance rows followed by one aggregate row per method (mean and 95%
// normal-approximation half-widths).
void write_sweep_csv(const SweepConfig& cfg, const std::vector<SweepRow>& rows, std::ostream& out);

}  // namespace reprof
