#include "reprof/netmodel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "reprof/errors.hpp"

namespace reprof {

double FlowProfile::d_hat() const { return std::min(d, b / r); }

double Solution::delay_budget(std::size_t i) const {
  double s = D[i];
  for (double t : T[i]) s += t;
  return s;
}

std::vector<std::string> validate(const Network& net) {
  std::vector<std::string> errs;
  std::set<std::string> links;
  for (const auto& l : net.links)
    if (!links.insert(l).second) errs.push_back("duplicate link id '" + l + "'");
  std::set<std::string> ids;
  for (const auto& f : net.flows) {
    const std::string who = "flow '" + f.id + "': ";
    if (!ids.insert(f.id).second) errs.push_back(who + "duplicate flow id");
    if (!(f.r > 0.0) || !std::isfinite(f.r)) errs.push_back(who + "non-positive rate");
    if (!(f.b >= 0.0) || !std::isfinite(f.b)) errs.push_back(who + "negative burst");
    if (!(f.d > 0.0) || !std::isfinite(f.d)) errs.push_back(who + "non-positive deadline");
    if (f.path.empty()) errs.push_back(who + "empty path");
    std::set<std::string> seen;
    for (const auto& l : f.path) {
      if (!links.count(l)) errs.push_back(who + "unknown link '" + l + "'");
      if (!seen.insert(l).second) errs.push_back(who + "cyclic path (link '" + l + "' repeated)");
    }
  }
  return errs;
}

NetIndex Network::index() const {
  const auto errs = validate(*this);
  if (!errs.empty()) throw InvalidInput(errs.front());
  NetIndex ix;
  for (std::size_t j = 0; j < links.size(); ++j) ix.link_pos[links[j]] = j;
  ix.path.resize(flows.size());
  ix.flows_on.resize(links.size());
  ix.hop_of.resize(links.size());
  for (std::size_t i = 0; i < flows.size(); ++i) {
    for (std::size_t h = 0; h < flows[i].path.size(); ++h) {
      const std::size_t j = ix.link_pos.at(flows[i].path[h]);
      ix.path[i].push_back(j);
      ix.flows_on[j].push_back(i);
      ix.hop_of[j].push_back(h);
    }
  }
  return ix;
}

std::vector<std::string> check_solution(const Network& net, const Solution& sol, double rel_tol) {
  std::vector<std::string> out;
  if (sol.D.size() != net.flows.size() || sol.T.size() != net.flows.size()) {
    out.push_back("solution size does not match the network");
    return out;
  }
  for (std::size_t i = 0; i < net.flows.size(); ++i) {
    const auto& f = net.flows[i];
    const std::string who = "flow '" + f.id + "': ";
    const double tol = rel_tol * std::max(1.0, f.d);
    if (sol.T[i].size() != f.path.size()) {
      out.push_back(who + "wrong number of local deadlines");
      continue;
    }
    if (!(sol.D[i] >= 0.0)) out.push_back(who + "negative reprofiling delay");
    if (sol.D[i] > f.burst_time() + rel_tol * std::max(1.0, f.burst_time()))
      out.push_back(who + "reprofiling delay exceeds b/r");
    for (double t : sol.T[i])
      if (!(t >= 0.0)) out.push_back(who + "negative local deadline");
    if (sol.delay_budget(i) > f.d + tol) out.push_back(who + "deadline budget exceeded");
  }
  return out;
}

Aggregation aggregate(const Network& net) {
  Aggregation agg;
  agg.net.links = net.links;
  std::map<std::pair<std::vector<std::string>, double>, std::size_t> slot;
  for (std::size_t i = 0; i < net.flows.size(); ++i) {
    const auto& f = net.flows[i];
    auto [it, fresh] = slot.try_emplace({f.path, f.d}, agg.net.flows.size());
    if (fresh) {
      agg.net.flows.push_back(f);
      agg.members.push_back({i});
      continue;
    }
    FlowProfile& a = agg.net.flows[it->second];
    a.r += f.r;
    a.b += f.b;
    if (a.class_label != f.class_label) a.class_label = "mixed";
    agg.members[it->second].push_back(i);
  }
  for (std::size_t k = 0; k < agg.net.flows.size(); ++k) {
    const auto& m = agg.members[k];
    if (m.size() > 1)
      agg.net.flows[k].id = net.flows[m.front()].id + "*" + std::to_string(m.size());
  }
  return agg;
}

double packet_adjusted_deadline(const FlowProfile& f, double R_i, const PacketModelParams& p) {
  if (!(R_i > 0.0)) throw InvalidInput("reprofiler rate must be positive");
  if (!(p.lmax > 0.0)) throw InvalidInput("packet size must be positive");
  const auto it = p.lmax_flow.find(f.id);
  const double lmax_i = it == p.lmax_flow.end() ? p.lmax : it->second;
  const double hops = static_cast<double>(f.path.size());
  double shrink = std::isinf(R_i) ? 0.0 : (hops - 1.0) * lmax_i / R_i;
  for (const auto& l : f.path) {
    const auto c = p.link_C.find(l);
    if (c == p.link_C.end() || !(c->second > 0.0))
      throw InvalidInput("missing or non-positive bandwidth for link '" + l + "'");
    shrink += p.lmax / c->second;
  }
  const double out = f.d - shrink;
  if (out < 0.0) throw Infeasible("deadline infeasible under packet model", f.id);
  return out;
}

PacketFixedPoint solve_with_packet_model(const Network& net, double lmax,
                                         const std::unordered_map<std::string, double>& lmax_flow,
                                         const PacketSolver& solve, int max_rounds,
                                         double rel_change) {
  PacketFixedPoint fp;
  fp.effective = net;
  std::tie(fp.sol, fp.C) = solve(net);
  fp.rounds = 1;
  while (fp.rounds < max_rounds) {
    PacketModelParams p{lmax_flow, lmax, {}};
    for (std::size_t j = 0; j < net.links.size(); ++j) p.link_C[net.links[j]] = fp.C[j];
    Network shrunk = net;
    for (std::size_t i = 0; i < net.flows.size(); ++i) {
      const double D = fp.sol.D[i];
      const double R = D > 0.0 ? net.flows[i].b / D : std::numeric_limits<double>::infinity();
      shrunk.flows[i].d = packet_adjusted_deadline(net.flows[i], R, p);
      if (!(shrunk.flows[i].d > 0.0))
        throw Infeasible("deadline infeasible under packet model", net.flows[i].id);
    }
    auto [sol, C] = solve(shrunk);
    ++fp.rounds;
    double change = 0.0;
    for (std::size_t j = 0; j < C.size(); ++j)
      change = std::max(change, std::abs(C[j] - fp.C[j]) / std::max(fp.C[j], 1e-300));
    fp.effective = std::move(shrunk);
    fp.sol = std::move(sol);
    fp.C = std::move(C);
    if (change < rel_change) break;
  }
  return fp;
}

double flow_count_gain(double x) {
  if (!(x >= 0.0) || !(x < 1.0)) throw InvalidInput("flow_count_gain needs 0 <= x < 1");
  return x / (1.0 - x);
}

}  // namespace reprof
