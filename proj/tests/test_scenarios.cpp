#include <gtest/gtest.h>

#include <map>
#include <set>
#include <sstream>

#include "reprof/errors.hpp"
#include "reprof/scenarios.hpp"

using namespace reprof;

namespace {

const std::string kTsnTopo = std::string(REPROF_DATA_DIR) + "/topologies/orion_cev_sample.topo";
const std::string kDcTopo = std::string(REPROF_DATA_DIR) + "/topologies/us_topo_sample.topo";
const std::string kCdf = std::string(REPROF_DATA_DIR) + "/rate_cdf_synthetic.csv";

bool same(const Network& a, const Network& b) {
  if (a.links != b.links || a.flows.size() != b.flows.size()) return false;
  for (std::size_t i = 0; i < a.flows.size(); ++i) {
    const auto &f = a.flows[i], &g = b.flows[i];
    if (f.id != g.id || f.r != g.r || f.b != g.b || f.d != g.d || f.path != g.path) return false;
  }
  return true;
}

}  // namespace

TEST(Tandem, Structure) {
  const Network net = gen_tandem(6, 4, 1, 3);
  EXPECT_EQ(net.links, (std::vector<std::string>{"l1", "l2", "l3", "l4"}));
  ASSERT_EQ(net.flows.size(), 6u);
  const std::set<double> classes{0.01, 0.1, 1.0};
  for (const auto& f : net.flows) {
    EXPECT_EQ(f.path, net.links);
    EXPECT_GE(f.r, 1.0);
    EXPECT_LE(f.r, 100.0);
    EXPECT_GE(f.b, 1.0);
    EXPECT_LE(f.b, 100.0);
    EXPECT_EQ(classes.count(f.d / 4), 1u) << f.d;
  }
  EXPECT_TRUE(validate(net).empty());
}

TEST(Tandem, DeterministicPerSeed) {
  EXPECT_TRUE(same(gen_tandem(5, 3, 2, 11), gen_tandem(5, 3, 2, 11)));
  EXPECT_FALSE(same(gen_tandem(5, 3, 2, 11), gen_tandem(5, 3, 2, 12)));
}

TEST(Tandem, DeadlineModesAndScale) {
  const Network a = gen_tandem(30, 3, 2, 4, 0.5, DeadlineMode::EndToEndFixed);
  const std::set<double> classes{0.01, 0.025, 0.05, 0.1};
  std::set<double> seen;
  for (const auto& f : a.flows) {
    EXPECT_EQ(classes.count(f.d / 0.5), 1u) << f.d;
    seen.insert(f.d / 0.5);
  }
  EXPECT_EQ(seen, classes);
  EXPECT_THROW(gen_tandem(0, 2, 1, 1), InvalidInput);
  EXPECT_THROW(gen_tandem(2, 2, 3, 1), InvalidInput);
  EXPECT_THROW(gen_tandem(2, 2, 1, 1, 0.0), InvalidInput);
}

TEST(ParkingLot, Structure) {
  const int m = 4, n = 3;
  const Network net = gen_parking_lot(m, n, 1, 5);
  ASSERT_EQ(net.links.size(), static_cast<std::size_t>(n + 2));
  EXPECT_EQ(net.flows.size(), static_cast<std::size_t>(m + (n + 1) * m / 2));
  std::map<std::string, int> load;
  std::multiset<std::size_t> lengths;
  for (const auto& f : net.flows) {
    lengths.insert(f.path.size());
    for (const auto& l : f.path) ++load[l];
  }
  for (std::size_t j = 1; j + 1 < net.links.size(); ++j) EXPECT_EQ(load[net.links[j]], 2 * m) << j;
  EXPECT_EQ(load[net.links.front()], m / 2);
  EXPECT_EQ(load[net.links.back()], m / 2);
  EXPECT_EQ(lengths.count(n), static_cast<std::size_t>(m));
  EXPECT_EQ(lengths.count(2), static_cast<std::size_t>((n + 1) * m / 2));
  EXPECT_THROW(gen_parking_lot(3, 2, 1, 1), InvalidInput);
  EXPECT_TRUE(validate(net).empty());
}

TEST(Topology, ParseAndPaths) {
  std::istringstream in("# ring\n@endpoints a c\na b\nb c\nc d\nd a\n");
  const Topology t = parse_topology(in);
  EXPECT_EQ(t.nodes.size(), 4u);
  EXPECT_EQ(t.num_edges, 4u);
  EXPECT_EQ(t.endpoints, (std::vector<std::string>{"a", "c"}));
  EXPECT_EQ(t.link_ids().size(), 8u);
  Rng rng(1);
  std::set<std::size_t> via;
  for (int k = 0; k < 200; ++k) {
    const auto p = t.shortest_path(t.node("a"), t.node("c"), rng);
    ASSERT_EQ(p.size(), 3u);
    via.insert(p[1]);
  }
  EXPECT_EQ(via, (std::set<std::size_t>{t.node("b"), t.node("d")}));
  EXPECT_THROW(t.node("zz"), InvalidInput);
}

TEST(RateCdf, SamplesWithinSupport) {
  std::istringstream in("rate,cum_prob\n10,0\n20,0.5\n40,1\n");
  const RateCdf cdf = parse_rate_cdf(in);
  Rng rng(2);
  int low = 0;
  for (int k = 0; k < 4000; ++k) {
    const double r = cdf.sample("any", rng);
    ASSERT_GE(r, 10.0);
    ASSERT_LE(r, 40.0);
    low += r <= 20.0;
  }
  EXPECT_NEAR(low / 4000.0, 0.5, 0.04);
}

TEST(Tsn, FlowMixAndProfiles) {
  const Topology topo = load_topology(kTsnTopo);
  EXPECT_EQ(topo.endpoints.size(), 31u);
  EXPECT_EQ(topo.num_edges, 47u);
  const int apps = 300;
  const Network net = gen_tsn(topo, apps, 7);
  EXPECT_TRUE(validate(net).empty());
  // A third each of unicast (1), multicast (mean 15.5) and broadcast (30).
  const double per_app = static_cast<double>(net.flows.size()) / apps;
  EXPECT_GT(per_app, 13.5);
  EXPECT_LT(per_app, 17.5);
  const std::map<std::string, double> deadline{{"CDT", 1e-4}, {"A", 2e-3}, {"B", 5e-2}};
  for (const auto& f : net.flows) {
    ASSERT_EQ(deadline.count(f.class_label), 1u);
    EXPECT_EQ(f.d, deadline.at(f.class_label));
    EXPECT_GE(f.path.size(), 2u);
    const double frame = f.class_label == "CDT" ? 128 : 256;
    EXPECT_EQ(f.b, 25 * frame);
  }
}

TEST(InterDc, MixAndBursts) {
  const Topology topo = load_topology(kDcTopo);
  const RateCdf cdf = load_rate_cdf(kCdf);
  const Network net = gen_interdc(topo, 1300, 9, 1.0, cdf);
  EXPECT_TRUE(validate(net).empty());
  std::map<std::string, int> count;
  const std::map<std::string, std::pair<double, double>> app{
      {"Web", {1500, 10e-3}}, {"Cache", {8000, 50e-3}}, {"Hadoop", {600, 200e-3}}};
  for (const auto& f : net.flows) {
    ASSERT_EQ(app.count(f.class_label), 1u);
    ++count[f.class_label];
    EXPECT_LE(f.b, app.at(f.class_label).first);
    EXPECT_EQ(f.d, app.at(f.class_label).second);
    EXPECT_GE(f.path.size(), 2u);
  }
  EXPECT_NEAR(count["Web"] / 1300.0, 3.0 / 13, 0.04);
  EXPECT_NEAR(count["Cache"] / 1300.0, 9.0 / 13, 0.04);
  EXPECT_NEAR(count["Hadoop"] / 1300.0, 1.0 / 13, 0.03);
}

TEST(Generate, Dispatch) {
  ScenarioConfig cfg;
  cfg.kind = "parking_lot";
  cfg.m = 2;
  cfg.n = 1;
  cfg.seed = 3;
  EXPECT_TRUE(same(generate(cfg), gen_parking_lot(2, 1, 1, 3)));
  cfg.kind = "tsn";
  EXPECT_THROW(generate(cfg), InvalidInput);
  cfg.topology_file = kTsnTopo;
  cfg.count = 4;
  EXPECT_FALSE(generate(cfg).flows.empty());
  cfg.kind = "ring";
  EXPECT_THROW(generate(cfg), InvalidInput);
}
