#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "reprof/netmodel.hpp"

namespace reprof {

enum class SourceModel { GreedyBurst, PeriodicBurst, OnOff };

struct SimConfig {
  double step = 0.0;     // 0 selects 1e-4 of the smallest deadline
  double horizon = 0.0;  // 0 selects 5x the largest deadline
  SourceModel source = SourceModel::GreedyBurst;
  std::uint64_t seed = 1;       // OnOff only
  double switch_prob = 0.02;    // OnOff: per-step probability of toggling
  std::ostream* trace = nullptr;  // per-step link backlogs as CSV
  int trace_every = 1;
};

struct SimReport {
  double step = 0.0;
  double horizon = 0.0;
  long steps = 0;
  std::vector<double> max_delay;                    // per flow, end to end
  std::vector<double> delay_bound;                  // per flow, sum T + D
  std::vector<double> max_ingress_backlog;          // per flow
  std::vector<std::vector<double>> max_reprofiler_backlog;  // per flow per hop (hop 0 unused)
  std::vector<double> max_link_backlog;             // per link scheduling queue
  std::vector<double> max_link_served;              // per link, largest per-step service / step
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

// Discrete-time fluid simulation: sources, ingress and per-hop greedy shapers
// for sigma_i, and EDF links with deadline arrival + T_ij at bandwidth C_j.
// Deadlines are checked against sum T + D + 2 step and backlogs against the
// analytic bounds plus C step.
SimReport simulate(const Network& net, const Solution& sol, const std::vector<double>& C,
                   const SimConfig& cfg = {});
SimReport simulate(const Network& net, const Solution& sol, const SimConfig& cfg = {});

}  // namespace reprof
