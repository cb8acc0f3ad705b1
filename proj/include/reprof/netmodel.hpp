#pragma once

#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

namespace reprof {

struct FlowProfile {
  std::string id;
  double r = 0.0;  // long-term rate
  double b = 0.0;  // burst
  double d = 0.0;  // end-to-end deadline (seconds)
  std::vector<std::string> path;
  std::string class_label;

  // Largest admissible reprofiling delay, min(d, b/r).
  double d_hat() const;
  double burst_time() const { return b / r; }
};

// Integer view of a network: link positions, paths as link indices, and the
// flows crossing each link (ascending flow index).
struct NetIndex {
  std::unordered_map<std::string, std::size_t> link_pos;
  std::vector<std::vector<std::size_t>> path;
  std::vector<std::vector<std::size_t>> flows_on;
  // hop_of[j][k]: position of link j inside the path of flows_on[j][k].
  std::vector<std::vector<std::size_t>> hop_of;
};

struct Network {
  std::vector<std::string> links;
  std::vector<FlowProfile> flows;

  std::size_t num_links() const { return links.size(); }
  std::size_t num_flows() const { return flows.size(); }
  // Throws InvalidInput when validate() reports problems.
  NetIndex index() const;
};

// D per flow, T per flow per hop (path order).
struct Solution {
  std::vector<double> D;
  std::vector<std::vector<double>> T;

  double T_prime(std::size_t i, std::size_t hop) const { return T[i][hop] + D[i]; }
  double delay_budget(std::size_t i) const;  // sum of T plus D
};

std::vector<std::string> validate(const Network& net);

// Violations of 0 <= D <= b/r, T >= 0 and sum T + D <= d.
std::vector<std::string> check_solution(const Network& net, const Solution& sol,
                                        double rel_tol = 1e-9);

struct Aggregation {
  Network net;
  std::vector<std::vector<std::size_t>> members;  // aggregated flow -> input flows
};

// Merges flows with identical (path, d), summing r and b.
Aggregation aggregate(const Network& net);

struct PacketModelParams {
  std::unordered_map<std::string, double> lmax_flow;  // per flow id
  double lmax = 0.0;                                  // network-wide
  std::unordered_map<std::string, double> link_C;     // per link id
};

// d - [(hops - 1) lmax_i / R_i + sum_j lmax / C_j]. R_i = inf means no
// reprofiler on the path. Throws Infeasible on a negative result.
double packet_adjusted_deadline(const FlowProfile& f, double R_i, const PacketModelParams& p);

// Solver hook for the packet fixed point: returns a solution and per-link C.
using PacketSolver =
    std::function<std::pair<Solution, std::vector<double>>(const Network&)>;

struct PacketFixedPoint {
  Network effective;  // deadlines shrunk by the packet terms
  Solution sol;
  std::vector<double> C;
  int rounds = 0;
};

// Solve, shrink deadlines using the resulting C_j and R_i = b_i / D_i, and
// re-solve until every C_j moves by less than rel_change or max_rounds.
PacketFixedPoint solve_with_packet_model(const Network& net, double lmax,
                                         const std::unordered_map<std::string, double>& lmax_flow,
                                         const PacketSolver& solve, int max_rounds = 5,
                                         double rel_change = 1e-3);

// x / (1 - x): flow-count gain from a bandwidth saving x under linear cost.
double flow_count_gain(double x);

}  // namespace reprof
