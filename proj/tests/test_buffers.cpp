#include <gtest/gtest.h>

#include "nets.hpp"
#include "oracle.hpp"
#include "reprof/bandwidth.hpp"
#include "reprof/baselines.hpp"
#include "reprof/buffers.hpp"
#include "reprof/errors.hpp"
#include "reprof/scenarios.hpp"

using namespace reprof;

TEST(SchedulingBuffer, OneReprofiledFlow) {
  // tb(1, 2) with D = 1 gives sigma = (R = 2, B = 1, r = 1).
  const Network net = nets::single(1, 2, 3, 1);
  const NetIndex ix = net.index();
  const Solution sol{{1.0}, {{0.5}}};
  EXPECT_EQ(scheduling_buffer_bound(net, ix, sol, 0, 2.0), 0.0);
  const double ref = oracle::sup([](double t) { return oracle::two_slope(2, 1, 1, t) - 1.5 * t; }, 1e-3, 10000);
  EXPECT_NEAR(ref, 0.5, 1e-9);
  EXPECT_NEAR(scheduling_buffer_bound(net, ix, sol, 0, 1.5), 0.5, 1e-12);
}

TEST(SchedulingBuffer, PureRateFlowsAtTotalRate) {
  const Network net = nets::two_hop(1, 2, 3, 2, 1, 3);
  const NetIndex ix = net.index();
  const Solution sol = full_reprofiling(net);  // D = b / r, so B = 0
  EXPECT_NEAR(scheduling_buffer_bound(net, ix, sol, 1, 3.0), 0.0, 1e-12);
}

TEST(ReprofilingBuffer, SameCurveUpstream) {
  const Network net = nets::single(1, 2, 3, 2);
  const Solution sol{{1.0}, {{0.0, 1.0}}};
  EXPECT_NEAR(reprofiling_buffer_bound(net, sol, 0, 1), 0.0, 1e-12);
}

TEST(ReprofilingBuffer, DelayedUpstream) {
  const Network net = nets::single(1, 2, 3, 2);
  const Solution sol{{1.0}, {{1.0, 0.0}}};
  const double ref = oracle::sup(
      [](double t) { return oracle::two_slope(2, 1, 1, t) - oracle::beta(1, 1, 1, 2, t); }, 1e-3, 10000);
  EXPECT_NEAR(ref, 2.0, 1e-9);
  EXPECT_NEAR(reprofiling_buffer_bound(net, sol, 0, 1), 2.0, 1e-12);
  EXPECT_THROW(reprofiling_buffer_bound(net, sol, 0, 0), InvalidInput);
}

TEST(BufferReport, IngressAndTotals) {
  const Network net = gen_tandem(4, 3, 1, 8);
  const Solution sol = uniform_ratio(net, 0.5);
  const auto C = link_bandwidths(net, sol);
  const BufferReport rep = buffer_report(net, sol, C);
  const NetIndex ix = net.index();
  double total = 0.0;
  for (std::size_t i = 0; i < net.flows.size(); ++i) {
    EXPECT_EQ(rep.ingress[i], net.flows[i].b);
    EXPECT_EQ(rep.reprofiling[i][0], 0.0);
    total += rep.ingress[i];
  }
  for (std::size_t j = 0; j < net.links.size(); ++j) {
    double link = rep.scheduling[j];
    for (std::size_t k = 0; k < ix.flows_on[j].size(); ++k) {
      const std::size_t i = ix.flows_on[j][k], h = ix.hop_of[j][k];
      link += rep.reprofiling[i][h];
    }
    EXPECT_NEAR(rep.link_total[j], link, 1e-12 * link);
    total += rep.link_total[j];
    EXPECT_GE(rep.scheduling[j], 0.0);
  }
  EXPECT_NEAR(rep.total, total, 1e-12 * total);
}

TEST(Properties, BoundsMatchDenseGrid) {
  for (int k = 0; k < 40; ++k) {
    const Network net = gen_tandem(3, 2, 1, 600 + k);
    const NetIndex ix = net.index();
    const Solution sol = uniform_ratio(net, 0.1 + 0.02 * k);
    const auto C = link_bandwidths(net, ix, sol);
    double horizon = 0.0;
    for (const auto& f : net.flows) horizon = std::max(horizon, 2 * f.d + f.burst_time());
    const double h = horizon / 20000;
    auto sigma = [&](std::size_t i, double t) {
      const auto& f = net.flows[i];
      const double D = sol.D[i];
      return D > 0 ? oracle::two_slope(f.b / D, f.b - f.r * D, f.r, t) : oracle::tb(f.r, f.b, t);
    };
    for (std::size_t j = 0; j < net.links.size(); ++j) {
      auto gap = [&](double t) {
        double s = 0.0;
        for (std::size_t i : ix.flows_on[j]) s += sigma(i, t);
        return s - C[j] * t;
      };
      double slope = C[j];
      for (std::size_t i : ix.flows_on[j]) slope += sol.D[i] > 0 ? net.flows[i].b / sol.D[i] : 0.0;
      const double ref = oracle::sup(gap, h, 20000);
      EXPECT_NEAR(scheduling_buffer_bound(net, ix, sol, j, C[j]), ref, slope * h + 1e-9) << k;
    }
    for (std::size_t i = 0; i < net.flows.size(); ++i) {
      const auto& f = net.flows[i];
      auto gap = [&](double t) { return sigma(i, t) - oracle::beta(sol.T[i][0], sol.D[i], f.r, f.b, t); };
      const double ref = oracle::sup(gap, h, 20000);
      const double R = sol.D[i] > 0 ? f.b / sol.D[i] : 0.0;
      EXPECT_NEAR(reprofiling_buffer_bound(net, sol, i, 1), ref, 2 * R * h + 1e-9) << k;
    }
  }
}
