#pragma once

#include <vector>

#include "reprof/netmodel.hpp"

namespace reprof {

// Buffer bounds for non-work-conserving operation.
struct BufferReport {
  std::vector<double> scheduling;               // per link
  std::vector<std::vector<double>> reprofiling;  // per flow per hop; hop 0 holds 0 (see ingress)
  std::vector<double> ingress;                  // per flow, b_i
  std::vector<double> link_total;               // scheduling + reprofiling of the link's flows
  double total = 0.0;                           // link totals plus ingress
};

// sup_t { sum_i sigma_i(t) - C t } over the flows on the link.
double scheduling_buffer_bound(const Network& net, const NetIndex& ix, const Solution& sol,
                               std::size_t link, double C);

// sup_t { sigma_i(t) - beta_ij'(t) } with j' the hop before `hop`; requires hop >= 1.
double reprofiling_buffer_bound(const Network& net, const Solution& sol, std::size_t flow,
                                std::size_t hop);

// C holds per-link bandwidths, normally link_bandwidths(net, sol).
BufferReport buffer_report(const Network& net, const Solution& sol, const std::vector<double>& C);

}  // namespace reprof
