#include "reprof/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "reprof/errors.hpp"

namespace reprof {

namespace {

std::vector<std::string> numbered_links(int n) {
  std::vector<std::string> out;
  for (int j = 1; j <= n; ++j) out.push_back("l" + std::to_string(j));
  return out;
}

FlowProfile synthetic_flow(std::string id, std::vector<std::string> path, int profile_config,
                           double omega, DeadlineMode mode, Rng& rng) {
  const auto& cls = deadline_classes(profile_config);
  FlowProfile f;
  f.id = std::move(id);
  f.r = rng.uniform(1.0, 100.0);
  f.b = rng.uniform(1.0, 100.0);
  const double dh = cls[rng.index(cls.size())];
  const double hops = mode == DeadlineMode::PerHopFixed ? static_cast<double>(path.size()) : 1.0;
  f.d = hops * dh * omega;
  std::ostringstream label;
  label << dh;
  f.class_label = label.str();
  f.path = std::move(path);
  return f;
}

void check_counts(int m, int n, int profile_config, double omega) {
  if (m < 1 || n < 1) throw InvalidInput("flow and link counts must be positive");
  if (profile_config != 1 && profile_config != 2) throw InvalidInput("profile config must be 1 or 2");
  if (!(omega > 0.0)) throw InvalidInput("deadline scale must be positive");
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  return s.substr(a, s.find_last_not_of(" \t\r") - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  return out;
}

std::string link_id(const Topology& t, std::size_t a, std::size_t b) {
  return t.nodes[a] + "->" + t.nodes[b];
}

std::vector<std::string> path_links(const Topology& t, const std::vector<std::size_t>& nodes) {
  std::vector<std::string> out;
  for (std::size_t k = 0; k + 1 < nodes.size(); ++k) out.push_back(link_id(t, nodes[k], nodes[k + 1]));
  return out;
}

// Weighted class draw; weights are small integers.
std::size_t draw(const std::vector<int>& weights, Rng& rng) {
  int total = 0;
  for (int w : weights) total += w;
  int x = static_cast<int>(rng.uniform_int(0, total - 1));
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (x < weights[k]) return k;
    x -= weights[k];
  }
  return weights.size() - 1;
}

}  // namespace

const std::vector<double>& deadline_classes(int profile_config) {
  static const std::vector<double> c1{0.01, 0.1, 1.0};
  static const std::vector<double> c2{0.01, 0.025, 0.05, 0.1};
  if (profile_config == 1) return c1;
  if (profile_config == 2) return c2;
  throw InvalidInput("profile config must be 1 or 2");
}

Network gen_tandem(int m, int n, int profile_config, std::uint64_t seed, double omega,
                   DeadlineMode mode) {
  check_counts(m, n, profile_config, omega);
  Rng rng(seed);
  Network net;
  net.links = numbered_links(n);
  for (int i = 1; i <= m; ++i)
    net.flows.push_back(
        synthetic_flow("f" + std::to_string(i), net.links, profile_config, omega, mode, rng));
  return net;
}

Network gen_parking_lot(int m, int n, int profile_config, std::uint64_t seed, double omega,
                        DeadlineMode mode) {
  check_counts(m, n, profile_config, omega);
  if (m % 2 != 0) throw InvalidInput("parking lot needs an even number of main flows");
  Rng rng(seed);
  Network net;
  net.links = numbered_links(n + 2);
  const std::vector<std::string> main(net.links.begin() + 1, net.links.end() - 1);
  for (int i = 1; i <= m; ++i)
    net.flows.push_back(synthetic_flow("f" + std::to_string(i), main, profile_config, omega, mode, rng));
  for (int h = 1; h <= n + 1; ++h) {
    const std::vector<std::string> path{net.links[h - 1], net.links[h]};
    for (int k = 1; k <= m / 2; ++k)
      net.flows.push_back(synthetic_flow("c" + std::to_string(h) + "_" + std::to_string(k), path,
                                         profile_config, omega, mode, rng));
  }
  return net;
}

std::size_t Topology::node(const std::string& name) const {
  const auto it = std::find(nodes.begin(), nodes.end(), name);
  if (it == nodes.end()) throw InvalidInput("unknown node '" + name + "'");
  return static_cast<std::size_t>(it - nodes.begin());
}

std::vector<std::size_t> Topology::shortest_path(std::size_t from, std::size_t to, Rng& rng) const {
  constexpr std::size_t kUnseen = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> dist(nodes.size(), kUnseen);
  std::vector<std::size_t> frontier{to};
  dist[to] = 0;
  for (std::size_t k = 0; k < frontier.size(); ++k)
    for (std::size_t v : adj[frontier[k]])
      if (dist[v] == kUnseen) {
        dist[v] = dist[frontier[k]] + 1;
        frontier.push_back(v);
      }
  if (dist[from] == kUnseen) return {};
  std::vector<std::size_t> path{from};
  while (path.back() != to) {
    std::vector<std::size_t> next;
    for (std::size_t v : adj[path.back()])
      if (dist[v] + 1 == dist[path.back()]) next.push_back(v);
    path.push_back(next[rng.index(next.size())]);
  }
  return path;
}

std::vector<std::string> Topology::link_ids() const {
  std::vector<std::string> out;
  for (std::size_t a = 0; a < nodes.size(); ++a)
    for (std::size_t b : adj[a]) out.push_back(link_id(*this, a, b));
  return out;
}

Topology parse_topology(std::istream& in) {
  Topology t;
  std::vector<std::string> declared_endpoints;
  auto add_node = [&](const std::string& name) {
    const auto it = std::find(t.nodes.begin(), t.nodes.end(), name);
    if (it != t.nodes.end()) return static_cast<std::size_t>(it - t.nodes.begin());
    t.nodes.push_back(name);
    t.adj.emplace_back();
    return t.nodes.size() - 1;
  };
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string w; ls >> w;) tok.push_back(w);
    if (tok[0] == "@endpoints") {
      declared_endpoints.insert(declared_endpoints.end(), tok.begin() + 1, tok.end());
      continue;
    }
    if (tok.size() != 2 || tok[0] == tok[1])
      throw InvalidInput("topology line " + std::to_string(lineno) + ": expected 'node_a node_b'");
    const std::size_t a = add_node(tok[0]), b = add_node(tok[1]);
    if (std::find(t.adj[a].begin(), t.adj[a].end(), b) != t.adj[a].end())
      throw InvalidInput("topology line " + std::to_string(lineno) + ": duplicate edge");
    t.adj[a].push_back(b);
    t.adj[b].push_back(a);
    ++t.num_edges;
  }
  if (t.nodes.empty()) throw InvalidInput("topology has no edges");
  for (const auto& e : declared_endpoints) {
    if (std::find(t.nodes.begin(), t.nodes.end(), e) == t.nodes.end())
      throw InvalidInput("endpoint '" + e + "' has no edges");
  }
  t.endpoints = declared_endpoints.empty() ? t.nodes : declared_endpoints;
  return t;
}

Topology load_topology(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open topology file '" + path + "'");
  return parse_topology(in);
}

double RateCdf::sample(const std::string& app, Rng& rng) const {
  auto it = points.find(app);
  if (it == points.end()) it = points.find("");
  if (it == points.end()) throw InvalidInput("rate CDF has no entry for '" + app + "'");
  const auto& p = it->second;
  const double u = rng.uniform();
  if (u <= p.front().second) return p.front().first;
  for (std::size_t k = 1; k < p.size(); ++k) {
    if (u <= p[k].second) {
      const double w = (u - p[k - 1].second) / (p[k].second - p[k - 1].second);
      return p[k - 1].first + w * (p[k].first - p[k - 1].first);
    }
  }
  return p.back().first;
}

RateCdf parse_rate_cdf(std::istream& in) {
  RateCdf cdf;
  std::string line;
  int lineno = 0;
  bool with_app = false, header = false;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto cols = split(line, ',');
    if (!header) {
      header = true;
      if (cols == std::vector<std::string>{"app", "rate", "cum_prob"}) {
        with_app = true;
        continue;
      }
      if (cols == std::vector<std::string>{"rate", "cum_prob"}) continue;
      throw InvalidInput("rate CDF header must be 'app,rate,cum_prob' or 'rate,cum_prob'");
    }
    if (cols.size() != (with_app ? 3u : 2u))
      throw InvalidInput("rate CDF line " + std::to_string(lineno) + ": wrong column count");
    try {
      const double rate = std::stod(cols[with_app ? 1 : 0]);
      const double prob = std::stod(cols[with_app ? 2 : 1]);
      cdf.points[with_app ? cols[0] : ""].push_back({rate, prob});
    } catch (const std::logic_error&) {
      throw InvalidInput("rate CDF line " + std::to_string(lineno) + ": not a number");
    }
  }
  if (cdf.points.empty()) throw InvalidInput("rate CDF is empty");
  for (const auto& [app, p] : cdf.points) {
    for (std::size_t k = 0; k < p.size(); ++k) {
      if (!(p[k].first > 0.0) || p[k].second < 0.0 || p[k].second > 1.0)
        throw InvalidInput("rate CDF for '" + app + "': rates must be positive, probabilities in [0,1]");
      if (k > 0 && (p[k].first < p[k - 1].first || p[k].second < p[k - 1].second))
        throw InvalidInput("rate CDF for '" + app + "' is not nondecreasing");
    }
    if (std::abs(p.back().second - 1.0) > 1e-9)
      throw InvalidInput("rate CDF for '" + app + "' must end at probability 1");
  }
  return cdf;
}

RateCdf load_rate_cdf(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open rate CDF file '" + path + "'");
  return parse_rate_cdf(in);
}

Network gen_tsn(const Topology& topo, int num_apps, std::uint64_t seed, double omega) {
  if (num_apps < 1) throw InvalidInput("need at least one application");
  if (!(omega > 0.0)) throw InvalidInput("deadline scale must be positive");
  if (topo.endpoints.size() < 3) throw InvalidInput("TSN generator needs at least 3 endpoints");
  struct Class {
    const char* name;
    double frame, min_gap, deadline;
  };
  static const Class classes[] = {{"CDT", 128, 500e-6, 100e-6}, {"A", 256, 125e-6, 2e-3},
                                  {"B", 256, 250e-6, 50e-3}};
  Rng rng(seed);
  Network net;
  net.links = topo.link_ids();
  const std::size_t others = topo.endpoints.size() - 1;
  const std::size_t max_multicast = std::min<std::size_t>(29, others);
  for (int a = 1; a <= num_apps; ++a) {
    const Class& c = classes[draw({1, 4, 4}, rng)];
    // Eight log-spaced inter-arrival times from the class minimum to 100x.
    const double gap = c.min_gap * std::pow(100.0, static_cast<double>(rng.uniform_int(0, 7)) / 7.0);
    const std::size_t src = topo.node(topo.endpoints[rng.index(topo.endpoints.size())]);
    std::vector<std::size_t> dst;
    for (const auto& e : topo.endpoints)
      if (topo.node(e) != src) dst.push_back(topo.node(e));
    switch (rng.index(3)) {
      case 0:  // unicast
        dst = {dst[rng.index(dst.size())]};
        break;
      case 1: {  // multicast
        rng.shuffle(dst);
        dst.resize(static_cast<std::size_t>(rng.uniform_int(2, static_cast<std::int64_t>(max_multicast))));
        std::sort(dst.begin(), dst.end());
        break;
      }
      default:  // broadcast
        break;
    }
    for (std::size_t d : dst) {
      auto nodes = topo.shortest_path(src, d, rng);
      if (nodes.size() < 3) continue;  // no path, or a single hop
      FlowProfile f;
      f.id = "a" + std::to_string(a) + ":" + topo.nodes[src] + ">" + topo.nodes[d];
      f.r = 1.1 * c.frame / gap;
      f.b = 25.0 * c.frame;
      f.d = c.deadline * omega;
      f.path = path_links(topo, nodes);
      f.class_label = c.name;
      net.flows.push_back(std::move(f));
    }
  }
  return net;
}

Network gen_interdc(const Topology& topo, int num_flows, std::uint64_t seed, double omega,
                    const RateCdf& cdf) {
  if (num_flows < 1) throw InvalidInput("need at least one flow");
  if (!(omega > 0.0)) throw InvalidInput("deadline scale must be positive");
  if (topo.endpoints.size() < 2) throw InvalidInput("inter-DC generator needs at least 2 endpoints");
  struct App {
    const char* name;
    double max_burst, deadline;
  };
  // Bursts up to 10 S_W, 20 S_C and 2 S_H with S_W = 150 B, S_C = 400 B, S_H = 300 B.
  static const App apps[] = {{"Web", 10 * 150.0, 10e-3}, {"Cache", 20 * 400.0, 50e-3},
                             {"Hadoop", 2 * 300.0, 200e-3}};
  Rng rng(seed);
  Network net;
  net.links = topo.link_ids();
  for (int k = 1; k <= num_flows; ++k) {
    const App& a = apps[draw({3, 9, 1}, rng)];
    const double r = cdf.sample(a.name, rng);
    const double b = rng.uniform(0.0, a.max_burst);
    // Redraw endpoints until the min-hop path has at least two links.
    std::vector<std::size_t> nodes;
    for (int attempt = 0; attempt < 1000 && nodes.size() < 3; ++attempt) {
      const std::size_t s = topo.node(topo.endpoints[rng.index(topo.endpoints.size())]);
      const std::size_t d = topo.node(topo.endpoints[rng.index(topo.endpoints.size())]);
      if (s != d) nodes = topo.shortest_path(s, d, rng);
    }
    if (nodes.size() < 3) throw InvalidInput("topology has no multi-hop endpoint pair");
    FlowProfile f;
    f.id = "f" + std::to_string(k);
    f.r = r;
    f.b = b;
    f.d = a.deadline * omega;
    f.path = path_links(topo, nodes);
    f.class_label = a.name;
    net.flows.push_back(std::move(f));
  }
  return net;
}

Network generate(const ScenarioConfig& cfg) {
  if (cfg.kind == "tandem")
    return gen_tandem(cfg.m, cfg.n, cfg.profile_config, cfg.seed, cfg.omega, cfg.deadline_mode);
  if (cfg.kind == "parking_lot")
    return gen_parking_lot(cfg.m, cfg.n, cfg.profile_config, cfg.seed, cfg.omega, cfg.deadline_mode);
  if (cfg.kind == "tsn" || cfg.kind == "interdc") {
    if (cfg.topology_file.empty()) throw InvalidInput(cfg.kind + " scenarios need a topology file");
    const Topology topo = load_topology(cfg.topology_file);
    if (cfg.kind == "tsn") return gen_tsn(topo, cfg.count, cfg.seed, cfg.omega);
    if (cfg.rate_cdf_file.empty()) throw InvalidInput("interdc scenarios need a rate CDF file");
    return gen_interdc(topo, cfg.count, cfg.seed, cfg.omega, load_rate_cdf(cfg.rate_cdf_file));
  }
  throw InvalidInput("unknown scenario kind '" + cfg.kind + "'");
}

}  // namespace reprof
