#pragma once

#include <vector>

#include "reprof/curves.hpp"
#include "reprof/netmodel.hpp"

namespace reprof {

// One flow's service-curve parameters on one link.
struct LinkServiceAssignment {
  std::size_t flow = 0;
  double T = 0.0;
  double D = 0.0;
  double r = 0.0;
  double b = 0.0;

  double T_prime() const { return T + D; }
  double R() const;  // b / D, infinite when D = 0
  double B() const { return D > 0.0 ? b - r * D : b; }
};

// 0 before T, ramp b/D up to T' = T + D, then b + r (t - T').
// With D = 0 the value jumps to b at T (right-continuous).
double beta_value(const LinkServiceAssignment& a, double t);
curves::Curve beta_curve(const LinkServiceAssignment& a);
// The arrival-side reprofiled curve: optimal reprofiler, or the token bucket
// itself when D = 0.
curves::Curve sigma_curve(double r, double b, double D);

struct LinkBandwidthResult {
  static constexpr std::size_t kStability = static_cast<std::size_t>(-1);
  double C_star = 0.0;
  std::size_t binding = kStability;  // index into the assignments
  double binding_time = 0.0;         // T' of the binding point, 0 for stability
  std::vector<double> slack;         // per assignment, at its own T'
};

// max(sum r, max_k sum_i beta_i(T'_k) / T'_k). Ties go to the smallest T'.
// Throws Infeasible when some T'_k = 0 carries positive aggregate service.
LinkBandwidthResult min_link_bandwidth(const std::vector<LinkServiceAssignment>& as);

double slack_at(const std::vector<LinkServiceAssignment>& as, std::size_t k, double C_star);

std::vector<LinkServiceAssignment> link_assignments(const Network& net, const NetIndex& ix,
                                                    const Solution& sol, std::size_t link);

enum class Objective { Sum, Max };

std::vector<double> link_bandwidths(const Network& net, const NetIndex& ix, const Solution& sol);
std::vector<double> link_bandwidths(const Network& net, const Solution& sol);
double objective_value(const std::vector<double>& C, Objective obj = Objective::Sum);
double total_bandwidth(const Network& net, const Solution& sol);

}  // namespace reprof
