#include "reprof/greedy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "reprof/baselines.hpp"
#include "reprof/errors.hpp"

namespace reprof {

namespace {

// beta_i at T'_i - g (g > 0) as a function of the reprofiling delay.
double ramp_value(double b, double D, double g) { return D > g ? b * (1.0 - g / D) : 0.0; }

// Largest D' >= D keeping the ramp's value at distance g within slack s.
double delay_limit(double b, double D, double g, double s) {
  const double target = ramp_value(b, D, g) + std::max(0.0, s);
  if (target >= b) return std::numeric_limits<double>::infinity();
  return g / (1.0 - target / b);
}

}  // namespace

void check(const GreedyConfig& cfg) {
  if (cfg.L < 1 || cfg.K < 1 || !(cfg.eps > 0.0) || cfg.max_sweeps < 1)
    throw InvalidInput("greedy needs L >= 1, K >= 1, eps > 0 and max_sweeps >= 1");
}

std::vector<std::size_t> adjustment_link_order(const NetIndex& ix) {
  const std::size_t n = ix.flows_on.size();
  std::vector<std::size_t> reach(n);
  for (std::size_t j = 0; j < n; ++j) {
    std::set<std::size_t> s;
    for (std::size_t i : ix.flows_on[j]) s.insert(ix.path[i].begin(), ix.path[i].end());
    reach[j] = s.size();
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return reach[a] > reach[b]; });
  return order;
}

double solve_T_star(const std::vector<LinkServiceAssignment>& as, std::size_t i, double C_star) {
  const auto& a = as.at(i);
  if (a.b <= 0.0) return a.T;
  const double tp = a.T_prime();
  double limit = tp - std::max(0.0, tp - a.b / a.r);
  for (std::size_t k = 0; k < as.size(); ++k) {
    const double tk = as[k].T_prime();
    if (k == i || !(tk < tp)) continue;
    limit = std::min(limit, delay_limit(a.b, a.D, tp - tk, slack_at(as, k, C_star)));
  }
  return tp - std::max(a.D, limit);
}

double adjust(const Network& net, const NetIndex& ix, Solution& sol, const GreedyConfig& cfg,
              AdjustStats* stats) {
  AdjustStats local;
  AdjustStats& st = stats ? *stats : local;
  st = AdjustStats{};
  std::vector<double> budget(net.flows.size());
  for (std::size_t i = 0; i < budget.size(); ++i) budget[i] = sol.delay_budget(i);

  const auto links = adjustment_link_order(ix);
  double W_prev = objective_value(link_bandwidths(net, ix, sol), cfg.objective);
  st.W.push_back(W_prev);
  double W = W_prev;

  while (st.sweeps < cfg.max_sweeps) {
    const Solution before = sol;
    for (std::size_t j : links) {
      auto as = link_assignments(net, ix, sol, j);
      if (as.empty()) continue;
      const auto base = min_link_bandwidth(as);
      const double C = base.C_star;
      std::vector<double> slack = base.slack;
      std::vector<std::size_t> order(as.size());
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        const double tx = as[x].T_prime(), ty = as[y].T_prime();
        return tx != ty ? tx > ty : as[x].flow < as[y].flow;
      });

      for (std::size_t p : order) {
        auto& a = as[p];
        if (a.b <= 0.0 || a.T <= 0.0) continue;
        const double tp = a.T_prime();
        double limit = tp - std::max(0.0, tp - a.b / a.r);
        for (std::size_t q = 0; q < as.size(); ++q) {
          const double tq = as[q].T_prime();
          if (q != p && tq < tp) limit = std::min(limit, delay_limit(a.b, a.D, tp - tq, slack[q]));
        }
        if (!(limit > a.D)) continue;
        const double D_new = std::min(limit, tp);
        for (std::size_t q = 0; q < as.size(); ++q) {
          const double tq = as[q].T_prime();
          if (q != p && tq < tp)
            slack[q] -= ramp_value(a.b, D_new, tp - tq) - ramp_value(a.b, a.D, tp - tq);
        }
        const std::size_t i = a.flow;
        const std::size_t hop = ix.hop_of[j][p];
        const double delta = D_new - a.D;
        sol.D[i] += delta;
        sol.T[i][hop] = std::max(0.0, sol.T[i][hop] - delta);
        a.D = sol.D[i];
        a.T = sol.T[i][hop];
      }

      const double C_after = min_link_bandwidth(link_assignments(net, ix, sol, j)).C_star;
      st.max_neutrality_error =
          std::max(st.max_neutrality_error, std::abs(C_after - C) / std::max(C, 1e-300));
    }
    ++st.sweeps;
    W = objective_value(link_bandwidths(net, ix, sol), cfg.objective);
    if (W > W_prev * (1.0 + 1e-12)) st.monotone = false;
    // Rounding can lift W on a sweep that changes nothing in exact arithmetic.
    if (W > W_prev) {
      sol = before;
      W = W_prev;
    }
    st.W.push_back(W);
    if (!((W_prev - W) / W_prev > cfg.eps)) break;
    W_prev = W;
  }

  for (std::size_t i = 0; i < budget.size(); ++i)
    st.max_conservation_error = std::max(
        st.max_conservation_error,
        std::abs(sol.delay_budget(i) - budget[i]) / std::max(1.0, budget[i]));
  return W;
}

GreedyResult explore(const Network& net, const GreedyConfig& cfg) {
  check(cfg);
  const NetIndex ix = net.index();
  GreedyResult best;
  best.W = std::numeric_limits<double>::infinity();
  double lo = 0.0, hi = 1.0;
  double prev_round = best.W;
  bool any = false;
  for (int round = 0; round < cfg.L; ++round) {
    std::vector<double> gamma(cfg.K + 2);
    for (int k = 0; k <= cfg.K + 1; ++k) gamma[k] = lo + (hi - lo) / (cfg.K + 1) * k;
    int k_best = -1;
    for (int k = 0; k <= cfg.K + 1; ++k) {
      Solution sol = uniform_ratio(net, std::min(1.0, gamma[k]));
      AdjustStats st;
      double W;
      try {
        W = adjust(net, ix, sol, cfg, &st);
      } catch (const Infeasible&) {
        continue;
      }
      any = true;
      best.gammas.push_back(gamma[k]);
      best.stats.push_back(std::move(st));
      if (W < best.W) {
        best.W = W;
        best.sol = std::move(sol);
        k_best = k;
      }
    }
    if (!any) throw Infeasible("every sampled configuration is infeasible");
    if (round > 0 && !((prev_round - best.W) / prev_round >= cfg.eps)) break;
    prev_round = best.W;
    if (k_best < 0) break;
    const double new_lo = gamma[std::max(k_best - 1, 0)];
    const double new_hi = gamma[std::min(k_best + 1, cfg.K + 1)];
    lo = new_lo;
    hi = new_hi;
  }
  best.C = link_bandwidths(net, ix, best.sol);
  return best;
}

}  // namespace reprof
