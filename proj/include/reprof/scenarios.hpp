#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <string>
#include <vector>

#include "reprof/netmodel.hpp"
#include "reprof/random.hpp"

namespace reprof {

enum class DeadlineMode { PerHopFixed, EndToEndFixed };

// Per-hop deadline classes of the synthetic profile configurations 1 and 2.
const std::vector<double>& deadline_classes(int profile_config);

// m flows over links l1..ln; r, b ~ U[1, 100]; d = n d_h (per hop) or d_h.
Network gen_tandem(int m, int n, int profile_config, std::uint64_t seed, double omega = 1.0,
                   DeadlineMode mode = DeadlineMode::PerHopFixed);

// Links l1..l(n+2). m main flows cross l2..l(n+1); for h = 1..n+1 a group of
// m/2 cross flows uses l(h), l(h+1), so every main-path link carries 2m flows.
Network gen_parking_lot(int m, int n, int profile_config, std::uint64_t seed, double omega = 1.0,
                        DeadlineMode mode = DeadlineMode::PerHopFixed);

// Undirected graph from an edge-list file. Each edge becomes two directed
// links "a->b" and "b->a".
struct Topology {
  std::vector<std::string> nodes;
  std::vector<std::string> endpoints;  // traffic sources/sinks; all nodes when unspecified
  std::vector<std::vector<std::size_t>> adj;
  std::size_t num_edges = 0;

  std::size_t node(const std::string& name) const;
  // Minimum-hop node sequence, ties broken uniformly at each step.
  std::vector<std::size_t> shortest_path(std::size_t from, std::size_t to, Rng& rng) const;
  // Directed link ids in node-declaration order of the edges.
  std::vector<std::string> link_ids() const;
};

// Lines: "a b" edges, "@endpoints n1 n2 ..." and '#' comments.
Topology parse_topology(std::istream& in);
Topology load_topology(const std::string& path);

// Piecewise-linear rate CDF per application.
struct RateCdf {
  std::map<std::string, std::vector<std::pair<double, double>>> points;  // (rate, cum prob)
  double sample(const std::string& app, Rng& rng) const;
};

// CSV with header app,rate,cum_prob (or rate,cum_prob for one shared CDF).
RateCdf parse_rate_cdf(std::istream& in);
RateCdf load_rate_cdf(const std::string& path);

// Units: bytes and seconds.
Network gen_tsn(const Topology& topo, int num_apps, std::uint64_t seed, double omega = 1.0);
Network gen_interdc(const Topology& topo, int num_flows, std::uint64_t seed, double omega,
                    const RateCdf& cdf);

struct ScenarioConfig {
  std::string kind = "tandem";  // tandem | parking_lot | tsn | interdc
  int m = 2;
  int n = 2;
  int profile_config = 1;
  int count = 1;  // applications (tsn) or flows (interdc)
  double omega = 1.0;
  std::uint64_t seed = 1;
  DeadlineMode deadline_mode = DeadlineMode::PerHopFixed;
  std::string topology_file;
  std::string rate_cdf_file;
};

Network generate(const ScenarioConfig& cfg);

}  // namespace reprof
