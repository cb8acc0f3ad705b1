#include "reprof/buffers.hpp"

#include "reprof/bandwidth.hpp"
#include "reprof/curves.hpp"
#include "reprof/errors.hpp"

namespace reprof {

double scheduling_buffer_bound(const Network& net, const NetIndex& ix, const Solution& sol,
                               std::size_t link, double C) {
  curves::Curve agg;
  for (std::size_t i : ix.flows_on.at(link)) {
    const auto& f = net.flows[i];
    agg = curves::pointwise_sum(agg, sigma_curve(f.r, f.b, sol.D[i]));
  }
  return curves::vertical_deviation(agg, curves::Curve::rate_line(C));
}

double reprofiling_buffer_bound(const Network& net, const Solution& sol, std::size_t flow,
                                std::size_t hop) {
  const auto& f = net.flows.at(flow);
  if (hop == 0 || hop >= f.path.size())
    throw InvalidInput("reprofiling buffer bound needs a hop with a predecessor");
  const LinkServiceAssignment up{flow, sol.T[flow][hop - 1], sol.D[flow], f.r, f.b};
  return curves::vertical_deviation(sigma_curve(f.r, f.b, sol.D[flow]), beta_curve(up));
}

BufferReport buffer_report(const Network& net, const Solution& sol, const std::vector<double>& C) {
  const NetIndex ix = net.index();
  if (C.size() != net.links.size()) throw InvalidInput("one bandwidth per link required");
  BufferReport rep;
  for (std::size_t j = 0; j < net.links.size(); ++j)
    rep.scheduling.push_back(scheduling_buffer_bound(net, ix, sol, j, C[j]));
  rep.link_total = rep.scheduling;
  for (std::size_t i = 0; i < net.flows.size(); ++i) {
    const auto& f = net.flows[i];
    rep.ingress.push_back(f.b);
    rep.reprofiling.emplace_back(f.path.size(), 0.0);
    for (std::size_t h = 1; h < f.path.size(); ++h) {
      rep.reprofiling[i][h] = reprofiling_buffer_bound(net, sol, i, h);
      rep.link_total[ix.path[i][h]] += rep.reprofiling[i][h];
    }
  }
  for (double v : rep.link_total) rep.total += v;
  for (double v : rep.ingress) rep.total += v;
  return rep;
}

}  // namespace reprof
