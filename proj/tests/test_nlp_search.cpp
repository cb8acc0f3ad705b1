#include <gtest/gtest.h>

#include "nets.hpp"
#include "reprof/bandwidth.hpp"
#include "reprof/baselines.hpp"
#include "reprof/errors.hpp"
#include "reprof/greedy.hpp"
#include "reprof/nlp_search.hpp"
#include "reprof/scenarios.hpp"

using namespace reprof;

namespace {

using Ev = Ordering::Event;

Network three_on_one() {
  Network net;
  net.links = {"l1"};
  net.flows.push_back(nets::flow("f1", 1, 2, 3, {"l1"}));
  net.flows.push_back(nets::flow("f2", 2, 3, 3, {"l1"}));
  net.flows.push_back(nets::flow("f3", 3, 1, 3, {"l1"}));
  return net;
}

Solution random_solution(const Network& net, Rng& rng) {
  Solution s;
  for (const auto& f : net.flows) {
    const double D = rng.uniform() < 0.15 ? 0.0 : rng.uniform() * f.d_hat();
    s.D.push_back(D);
    std::vector<double> w(f.path.size());
    double tot = 0.0;
    for (auto& c : w) tot += (c = rng.uniform() + 0.05);
    s.T.emplace_back();
    for (double c : w) s.T.back().push_back((f.d - D) * c / tot);
  }
  return s;
}

}  // namespace

TEST(Ordering, SingleFlowSingleLink) {
  const Network net = nets::single(1, 2, 1, 1);
  const NetIndex ix = net.index();
  Rng rng(1);
  const Ordering o = generate_feasible_ordering(net, ix, rng);
  ASSERT_EQ(o.merged.size(), 1u);
  EXPECT_EQ(o.merged[0], (std::vector<Ev>{{0, false}, {0, true}}));
}

TEST(Ordering, GeneratedOrderingsRespectImplications) {
  Rng rng(2);
  for (int k = 0; k < 1000; ++k) {
    const Network net = k % 2 ? gen_tandem(2 + k % 5, 1 + k % 3, 1, k) : gen_parking_lot(2 + 2 * (k % 2), 1 + k % 3, 1, k);
    const NetIndex ix = net.index();
    const Ordering o = generate_feasible_ordering(net, ix, rng);
    ASSERT_EQ(ordering_violation(net, ix, o), "") << k;
  }
}

TEST(Ordering, ThreeFlowExampleIsGenerated) {
  // D3 <= D1 <= D2, T1 <= T2 <= T3 and T1 <= T'1 <= T2 <= T3 <= T'2 <= T'3.
  const Network net = three_on_one();
  const NetIndex ix = net.index();
  const std::vector<Ev> target{{0, false}, {0, true}, {1, false}, {2, false}, {1, true}, {2, true}};
  Rng rng(3);
  int hits = 0;
  for (int k = 0; k < 20000; ++k) {
    const Ordering o = generate_feasible_ordering(net, ix, rng);
    if (o.d_rank == std::vector<std::size_t>{2, 0, 1} && o.t_rank[0] == std::vector<std::size_t>{0, 1, 2} &&
        o.merged[0] == target)
      ++hits;
  }
  EXPECT_GT(hits, 0);
}

TEST(Ordering, RealizedOrderingIsConsistent) {
  Rng rng(4);
  for (int k = 0; k < 300; ++k) {
    const Network net = gen_tandem(2 + k % 4, 1 + k % 3, 1 + k % 2, 100 + k);
    const NetIndex ix = net.index();
    const Solution s = random_solution(net, rng);
    ASSERT_EQ(ordering_violation(net, ix, ordering_of(net, ix, s)), "") << k;
  }
}

TEST(Ordering, CountBound) {
  const Network net = three_on_one();
  // 3! * 6! / 2^3 = 540
  EXPECT_NEAR(ordering_count_log2(net, net.index()), std::log2(540.0), 1e-9);
}

TEST(EmitConstraints, ThreeFlowExample) {
  const Network net = three_on_one();
  const NetIndex ix = net.index();
  Ordering o;
  o.d_rank = {2, 0, 1};
  o.t_rank = {{0, 1, 2}};
  o.merged = {{{0, false}, {0, true}, {1, false}, {2, false}, {1, true}, {2, true}}};
  o.d_zero = {false, false, false};
  ASSERT_EQ(ordering_violation(net, ix, o), "");
  const NlpInstance inst = emit_constraints(o, net, ix);
  ASSERT_EQ(inst.ratios.size(), 3u);
  EXPECT_DOUBLE_EQ(inst.stability[0], 6.0);
  using K = TermKind;
  auto kinds = [](const RatioConstraint& rc) {
    std::vector<K> out;
    for (const auto& t : rc.terms) out.push_back(t.kind);
    return out;
  };
  EXPECT_EQ(inst.ratios[0].at_flow, 0u);
  EXPECT_EQ(kinds(inst.ratios[0]), (std::vector<K>{K::Full, K::Zero, K::Zero}));
  EXPECT_EQ(inst.ratios[1].at_flow, 1u);
  EXPECT_EQ(kinds(inst.ratios[1]), (std::vector<K>{K::Full, K::Full, K::Ramp}));
  EXPECT_EQ(inst.ratios[2].at_flow, 2u);
  EXPECT_EQ(kinds(inst.ratios[2]), (std::vector<K>{K::Full, K::Full, K::Full}));
  // Two D-ranking rows and five merged-order rows.
  EXPECT_EQ(inst.order_rows.size(), 7u);
  EXPECT_NE(dump(inst).find("C[l1] >= 6"), std::string::npos);
}

TEST(EmitConstraints, FullyReprofiledSingleFlow) {
  const Network net = nets::single(1, 2, 3, 1);
  const NetIndex ix = net.index();
  Rng rng(5);
  const NlpInstance inst = emit_constraints(generate_feasible_ordering(net, ix, rng), net, ix);
  ASSERT_EQ(inst.ratios.size(), 1u);
  EXPECT_EQ(inst.ratios[0].terms.size(), 1u);
  EXPECT_EQ(inst.ratios[0].terms[0].kind, TermKind::Full);
  EXPECT_DOUBLE_EQ(inst.stability[0], 1.0);
  // C >= b / T' when T' < b / r, else C >= r.
  EXPECT_DOUBLE_EQ(inst.objective({{2.0}, {{0.0}}}), 1.0);
  EXPECT_DOUBLE_EQ(inst.objective({{1.0}, {{0.0}}}), 2.0);
  EXPECT_DOUBLE_EQ(inst.objective({{1.0}, {{0.5}}}), 2.0 / 1.5);
}

TEST(EmitConstraints, EmptyLinkHasOnlyStability) {
  Network net = nets::single(1, 2, 1, 1);
  net.links.push_back("idle");
  const NetIndex ix = net.index();
  Rng rng(6);
  const NlpInstance inst = emit_constraints(generate_feasible_ordering(net, ix, rng), net, ix);
  EXPECT_EQ(inst.stability[1], 0.0);
  for (const auto& rc : inst.ratios) EXPECT_NE(rc.link, 1u);
}

TEST(EmitConstraints, ClosedFormMatchesBandwidth) {
  Rng rng(7);
  for (int k = 0; k < 500; ++k) {
    const Network net = k % 2 ? gen_tandem(2 + k % 4, 1 + k % 3, 1 + k % 2, 200 + k)
                              : gen_parking_lot(2, 1 + k % 3, 1, 200 + k);
    const NetIndex ix = net.index();
    const Solution s = random_solution(net, rng);
    double W;
    try {
      W = total_bandwidth(net, s);
    } catch (const Infeasible&) {
      continue;
    }
    const NlpInstance inst = emit_constraints(ordering_of(net, ix, s), net, ix);
    ASSERT_NEAR(inst.objective(s), W, 1e-9 * W) << k;
  }
}

TEST(SolveInstance, SingleHop) {
  const Network net = nets::single(1, 2, 1, 1);
  const NetIndex ix = net.index();
  Rng rng(8);
  const auto out = solve_instance(emit_constraints(generate_feasible_ordering(net, ix, rng), net, ix), {}, 1);
  ASSERT_TRUE(out.feasible);
  EXPECT_NEAR(out.W, 2.0, 1e-12);
  EXPECT_TRUE(check_solution(net, out.sol).empty());
}

TEST(SolveInstance, PinnedZeroDelay) {
  const Network net = nets::single(1, 2, 1, 1);
  const NetIndex ix = net.index();
  Rng rng(9);
  Ordering o = generate_feasible_ordering(net, ix, rng);
  o.d_zero = {true};
  const auto out = solve_instance(emit_constraints(o, net, ix), {}, 1);
  ASSERT_TRUE(out.feasible);
  EXPECT_EQ(out.sol.D[0], 0.0);
  EXPECT_NEAR(out.W, 2.0, 1e-12);
}

TEST(SolveInstance, OutputsAreFeasibleAndConsistent) {
  for (int k = 0; k < 30; ++k) {
    const Network net = gen_tandem(2 + k % 2, 2, 1, 300 + k);
    const NetIndex ix = net.index();
    Rng rng(k);
    const NlpInstance inst = emit_constraints(generate_feasible_ordering(net, ix, rng), net, ix);
    const auto out = solve_instance(inst, {}, k);
    if (!out.feasible) continue;
    EXPECT_TRUE(check_solution(net, out.sol).empty()) << k;
    EXPECT_NEAR(out.W, total_bandwidth(net, out.sol), 1e-9 * out.W);
  }
}

TEST(Search, NotWorseThanGreedyOnSmallInstances) {
  for (int k = 0; k < 10; ++k) {
    const Network net = gen_tandem(2, 2, 1, 400 + k);
    const double Wg = explore(net).W;
    const auto res = search(net);
    EXPECT_TRUE(check_solution(net, res.sol).empty());
    EXPECT_LE(res.W, Wg * (1 + 1e-9)) << k;
    EXPECT_GE(res.orderings_tried, 1);
  }
}

TEST(Search, Deterministic) {
  const Network net = gen_tandem(3, 2, 1, 9);
  SearchOptions opt;
  opt.seed = 7;
  const auto a = search(net, opt), b = search(net, opt);
  EXPECT_EQ(a.W, b.W);
  EXPECT_EQ(a.sol.D, b.sol.D);
}

TEST(Polish, StaysFeasibleAndImproves) {
  const Network net = gen_tandem(3, 2, 1, 10);
  const Solution start = no_reprofiling(net);
  const auto out = polish(net, start, {}, 3);
  ASSERT_TRUE(out.feasible);
  EXPECT_TRUE(check_solution(net, out.sol).empty());
  EXPECT_LE(out.W, total_bandwidth(net, start));
}

TEST(GridOracle, SingleFlowTwoHops) {
  GridOptions g;
  g.step = 1e-3;
  const auto res = grid_oracle(nets::single(1, 2, 1, 2), g);
  EXPECT_NEAR(res.W, 4.0, 1e-12);
  EXPECT_NEAR(res.sol.D[0], 1.0, 1e-12);
}

TEST(GridOracle, DimensionCap) {
  EXPECT_THROW(grid_oracle(gen_tandem(3, 2, 1, 1)), InvalidInput);
  GridOptions g;
  g.step = 0;
  EXPECT_THROW(grid_oracle(nets::single(1, 2, 1, 2), g), InvalidInput);
}

TEST(GridOracle, SearchIsNotWorse) {
  GridOptions g;
  g.step = 2e-3;
  for (int k = 0; k < 6; ++k) {
    const Network net = gen_tandem(2, 2, 1, 500 + k);
    const double Wg = grid_oracle(net, g).W;
    const double Ws = search(net).W;
    EXPECT_LE(Ws, Wg * (1 + 1e-3)) << k;
  }
}
