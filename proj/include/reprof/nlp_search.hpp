#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "reprof/lp.hpp"
#include "reprof/netmodel.hpp"
#include "reprof/random.hpp"

namespace reprof {

// A fixed relative order of reprofiling delays and, per link, of the local
// deadlines T and inflection points T' = T + D. Under a fixed order every
// link bandwidth is one closed-form expression.
struct Ordering {
  struct Event {
    std::size_t flow;
    bool prime;  // T' when true, T otherwise
    bool operator==(const Event& o) const { return flow == o.flow && prime == o.prime; }
  };
  std::vector<std::size_t> d_rank;               // flows, ascending D
  std::vector<std::vector<std::size_t>> t_rank;  // per link, ascending T
  std::vector<std::vector<Event>> merged;        // per link, ascending
  std::vector<bool> d_zero;                      // flows with D pinned to 0
};

Ordering generate_feasible_ordering(const Network& net, const NetIndex& ix, Rng& rng);

// Empty when the ordering is well formed and respects the pairwise
// implications; otherwise a description of the first problem.
std::string ordering_violation(const Network& net, const NetIndex& ix, const Ordering& o);

// Realized ordering of a concrete solution (ties broken by flow index).
Ordering ordering_of(const Network& net, const NetIndex& ix, const Solution& sol);

// log2 of the ordering-count bound: m! times, per link, (2k)! / 2^k.
double ordering_count_log2(const Network& net, const NetIndex& ix);

enum class TermKind { Zero, Ramp, Full };

struct RatioTerm {
  std::size_t flow;
  TermKind kind;  // Full: b + r (T'_k - T'_i); Ramp: (b/D)(T'_k - T_i)
};

// C_j >= sum(terms) / T'_{at_flow, j}.
struct RatioConstraint {
  std::size_t link;
  std::size_t at_flow;
  std::vector<RatioTerm> terms;
};

struct NlpInstance {
  const Network* net = nullptr;
  NetIndex ix;
  Ordering ordering;
  // Variable layout: D_i, then T_ij per flow and hop, then C_j.
  std::vector<int> D_var;
  std::vector<std::vector<int>> T_var;
  std::vector<int> C_var;
  int num_vars = 0;
  std::vector<lp::Row> deadline_rows;  // sum T + D <= d and D <= b/r
  std::vector<lp::Row> order_rows;     // x_a - x_b <= 0 along every ranking
  std::vector<double> stability;       // sum of r per link
  std::vector<RatioConstraint> ratios;

  // Closed-form objective sum_j C_j under this ordering.
  double objective(const Solution& sol) const;
};

NlpInstance emit_constraints(const Ordering& o, const Network& net, const NetIndex& ix);

// Human-readable listing of an instance for external solvers.
std::string dump(const NlpInstance& inst);

struct NlpOptions {
  int starts = 8;           // FR, NR, then random interior points
  double min_step = 1e-7;   // relative step at which a local search stops
  int random_directions = 8;
};

struct NlpOutcome {
  bool feasible = false;
  double W = 0.0;
  Solution sol;
};

NlpOutcome solve_instance(const NlpInstance& inst, const NlpOptions& opt, std::uint64_t seed);

struct SearchOptions {
  int num_orderings = 0;  // 0: ceil(log2 N) capped at max_orderings
  int max_orderings = 64;
  int patience = 10;
  bool polish = true;  // final local search without ordering constraints
  bool baseline_orderings = true;  // also solve the orderings of the FR and NR points
  std::uint64_t seed = 1;
  NlpOptions nlp;
};

struct SearchResult {
  double W = 0.0;
  Solution sol;
  int orderings_tried = 0;
  int orderings_feasible = 0;
  int best_ordering = -3;  // sampled index; -2 and -1 for the FR and NR orderings
};

SearchResult search(const Network& net, const SearchOptions& opt = {});

// Local search over the deadline/cap polytope only, from a given point.
NlpOutcome polish(const Network& net, const Solution& start, const NlpOptions& opt,
                  std::uint64_t seed);

struct GridOptions {
  double step = 1e-3;
  int max_free_vars = 4;
  double exhaustive_budget = 2e6;  // points evaluated before switching to zoom refinement
};

// Brute-force grid over D_i in [0, d_hat_i] and the per-hop deadline split.
SearchResult grid_oracle(const Network& net, const GridOptions& opt = {});

}  // namespace reprof
