#include "reprof/bandwidth.hpp"

#include <algorithm>
#include <numeric>

#include "reprof/errors.hpp"

namespace reprof {

double LinkServiceAssignment::R() const { return D > 0.0 ? b / D : curves::kInf; }

double beta_value(const LinkServiceAssignment& a, double t) {
  if (t < a.T) return 0.0;
  if (a.D <= 0.0) return a.b + a.r * (t - a.T);
  const double tp = a.T + a.D;
  if (t < tp) return a.b * (t - a.T) / a.D;
  return a.b + a.r * (t - tp);
}

curves::Curve sigma_curve(double r, double b, double D) {
  const curves::TokenBucket tb{r, b};
  if (D <= 0.0 || b <= 0.0) return tb.curve();
  return curves::optimal_reprofiler(tb, D).curve();
}

curves::Curve beta_curve(const LinkServiceAssignment& a) {
  return sigma_curve(a.r, a.b, a.D).shifted(a.T);
}

namespace {

double aggregate_at(const std::vector<LinkServiceAssignment>& as, double t) {
  double s = 0.0;
  for (const auto& a : as) s += beta_value(a, t);
  return s;
}

// Exactly 0 where the point's own ratio is C_star.
double slack_from(double agg, double tp, double C_star) {
  if (tp > 0.0 && agg / tp == C_star) return 0.0;
  return C_star * tp - agg;
}

}  // namespace

LinkBandwidthResult min_link_bandwidth(const std::vector<LinkServiceAssignment>& as) {
  LinkBandwidthResult res;
  for (const auto& a : as) res.C_star += a.r;
  std::vector<std::size_t> order(as.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return as[x].T_prime() < as[y].T_prime();
  });
  std::vector<double> agg(as.size());
  for (std::size_t k : order) {
    const double tp = as[k].T_prime();
    agg[k] = aggregate_at(as, tp);
    if (tp <= 0.0) {
      if (agg[k] > 0.0)
        throw Infeasible("flow needs infinite bandwidth (zero inflection point)",
                         std::to_string(as[k].flow));
      continue;
    }
    const double ratio = agg[k] / tp;
    if (ratio > res.C_star) {
      res.C_star = ratio;
      res.binding = k;
      res.binding_time = tp;
    }
  }
  res.slack.resize(as.size());
  for (std::size_t k = 0; k < as.size(); ++k) res.slack[k] = slack_from(agg[k], as[k].T_prime(), res.C_star);
  return res;
}

double slack_at(const std::vector<LinkServiceAssignment>& as, std::size_t k, double C_star) {
  const double tp = as.at(k).T_prime();
  return slack_from(aggregate_at(as, tp), tp, C_star);
}

std::vector<LinkServiceAssignment> link_assignments(const Network& net, const NetIndex& ix,
                                                    const Solution& sol, std::size_t link) {
  std::vector<LinkServiceAssignment> out;
  const auto& fl = ix.flows_on[link];
  out.reserve(fl.size());
  for (std::size_t k = 0; k < fl.size(); ++k) {
    const std::size_t i = fl[k];
    const auto& f = net.flows[i];
    out.push_back({i, sol.T[i][ix.hop_of[link][k]], sol.D[i], f.r, f.b});
  }
  return out;
}

std::vector<double> link_bandwidths(const Network& net, const NetIndex& ix, const Solution& sol) {
  std::vector<double> C(net.links.size(), 0.0);
  for (std::size_t j = 0; j < C.size(); ++j) {
    try {
      C[j] = min_link_bandwidth(link_assignments(net, ix, sol, j)).C_star;
    } catch (const Infeasible& e) {
      const std::string id = net.flows.at(std::stoul(e.flow_id())).id;
      throw Infeasible("flow '" + id + "' needs infinite bandwidth on link '" + net.links[j] + "'",
                       id);
    }
  }
  return C;
}

std::vector<double> link_bandwidths(const Network& net, const Solution& sol) {
  return link_bandwidths(net, net.index(), sol);
}

double objective_value(const std::vector<double>& C, Objective obj) {
  if (obj == Objective::Max) return C.empty() ? 0.0 : *std::max_element(C.begin(), C.end());
  return std::accumulate(C.begin(), C.end(), 0.0);
}

double total_bandwidth(const Network& net, const Solution& sol) {
  return objective_value(link_bandwidths(net, sol));
}

}  // namespace reprof
