#pragma once

#include <vector>

#include "reprof/bandwidth.hpp"
#include "reprof/netmodel.hpp"

namespace reprof {

struct GreedyConfig {
  int L = 2;            // exploration rounds
  int K = 4;            // interior samples per round
  double eps = 1e-3;    // relative improvement threshold
  int max_sweeps = 50;  // safety cap on adjustment sweeps
  Objective objective = Objective::Sum;
};

void check(const GreedyConfig& cfg);

// Invariant bookkeeping collected by adjust().
struct AdjustStats {
  int sweeps = 0;
  std::vector<double> W;  // objective before the first sweep, then after each
  double max_neutrality_error = 0.0;    // relative drift of C_j while adjusting link j
  double max_conservation_error = 0.0;  // drift of sum T + D per flow
  bool monotone = true;                 // W never increased across sweeps
};

struct GreedyResult {
  double W = 0.0;
  Solution sol;
  std::vector<double> C;
  std::vector<double> gammas;  // every sampled ratio, in evaluation order
  std::vector<AdjustStats> stats;
};

// Links ordered by decreasing number of distinct links reached by their
// flows, ties by ascending link index.
std::vector<std::size_t> adjustment_link_order(const NetIndex& ix);

// Trades local deadline for reprofiling delay on every link, in sweeps, until
// the relative improvement drops to eps. Returns the final objective.
double adjust(const Network& net, const NetIndex& ix, Solution& sol, const GreedyConfig& cfg,
              AdjustStats* stats = nullptr);

// New local deadline for as[i] with its T' held fixed: the largest value at
// which some smaller inflection point runs out of slack under C_star, clamped
// below by max(0, T' - b/r) and above by the current T.
double solve_T_star(const std::vector<LinkServiceAssignment>& as, std::size_t i, double C_star);

GreedyResult explore(const Network& net, const GreedyConfig& cfg = {});

}  // namespace reprof
