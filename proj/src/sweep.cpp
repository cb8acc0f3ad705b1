#include "reprof/sweep.hpp"

#include <atomic>
#include <cmath>
#include <thread>

#include "reprof/baselines.hpp"
#include "reprof/errors.hpp"
#include "reprof/io.hpp"

namespace reprof {

namespace {

std::vector<SweepRow> run_instance(const SweepConfig& cfg, int k) {
  ScenarioConfig sc = cfg.scenario;
  sc.seed = derive_seed(cfg.scenario.seed, static_cast<std::uint64_t>(k));
  std::vector<SweepRow> rows;
  Network net;
  std::string failure;
  try {
    net = generate(sc);
    if (cfg.aggregate) net = aggregate(net).net;
  } catch (const std::exception& e) {
    failure = std::string("error: ") + e.what();
  }
  double W_fr = NAN, W_nr = NAN;
  if (failure.empty()) {
    try {
      W_fr = objective_value(link_bandwidths(net, full_reprofiling(net)), cfg.solve.objective);
      W_nr = objective_value(link_bandwidths(net, no_reprofiling(net)), cfg.solve.objective);
    } catch (const std::exception& e) {
      failure = std::string("error: ") + e.what();
    }
  }
  for (Method m : cfg.methods) {
    SweepRow row;
    row.instance = k;
    row.seed = sc.seed;
    row.flows = net.flows.size();
    row.links = net.links.size();
    row.method = m;
    row.W_fr = W_fr;
    row.W_nr = W_nr;
    row.W = NAN;
    if (!failure.empty()) {
      row.status = failure;
      rows.push_back(std::move(row));
      continue;
    }
    try {
      const SolveOutcome o = solve(net, m, cfg.solve);
      row.W = o.W;
      row.runtime_s = o.runtime_s;
      row.C = o.C;
      for (std::size_t i = 0; i < net.flows.size(); ++i) {
        const double dh = net.flows[i].d_hat();
        if (!(dh > 0.0)) continue;
        row.ratios.push_back(o.sol.D[i] / dh);
        row.ratio_classes.push_back(net.flows[i].class_label);
      }
    } catch (const Infeasible& e) {
      row.status = std::string("infeasible: ") + e.what();
    } catch (const std::exception& e) {
      row.status = std::string("error: ") + e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string csv_text(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '"') c = ' ';
  return s;
}

std::string num(double v) { return std::isfinite(v) ? io::format_double(v) : ""; }

struct Stat {
  double sum = 0.0, sum2 = 0.0;
  int n = 0;
  void add(double v) {
    if (!std::isfinite(v)) return;
    sum += v;
    sum2 += v * v;
    ++n;
  }
  double mean() const { return n ? sum / n : NAN; }
  double ci95() const {
    if (n < 2) return NAN;
    const double var = std::max(0.0, (sum2 - sum * sum / n) / (n - 1));
    return 1.96 * std::sqrt(var / n);
  }
};

}  // namespace

std::vector<SweepRow> run_sweep(const SweepConfig& cfg) {
  if (cfg.instances < 1) throw InvalidInput("need at least one instance");
  if (cfg.methods.empty()) throw InvalidInput("need at least one method");
  std::vector<std::vector<SweepRow>> per(cfg.instances);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int k; (k = next++) < cfg.instances;) per[k] = run_instance(cfg, k);
  };
  const int jobs = std::max(1, std::min(cfg.jobs, cfg.instances));
  std::vector<std::thread> pool;
  for (int t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  std::vector<SweepRow> rows;
  for (auto& v : per)
    for (auto& r : v) rows.push_back(std::move(r));
  return rows;
}

void write_sweep_csv(const SweepConfig& cfg, const std::vector<SweepRow>& rows, std::ostream& out) {
  const auto& sc = cfg.scenario;
  out << "schema_version,row_type,instance,seed,kind,m,n,flows,links,omega,method,status,W,W_ci95,"
         "W_fr,W_nr,improvement_vs_fr,improvement_vs_fr_ci95,improvement_vs_nr,"
         "improvement_vs_nr_ci95,runtime_s,samples,reprofiling_ratios,ratio_classes,link_C\n";
  auto prefix = [&](const char* type, const std::string& instance, std::uint64_t seed) {
    out << kSweepSchemaVersion << "," << type << "," << instance << "," << seed << "," << sc.kind << ","
        << sc.m << "," << sc.n << ",";
  };
  auto joined = [&](const auto& v, auto fmt) {
    std::string s;
    for (std::size_t k = 0; k < v.size(); ++k) s += (k ? ";" : "") + fmt(v[k]);
    return s;
  };
  for (const auto& r : rows) {
    const double ifr = (r.W_fr - r.W) / r.W_fr, inr = (r.W_nr - r.W) / r.W_nr;
    prefix("instance", std::to_string(r.instance), r.seed);
    out << r.flows << "," << r.links << "," << num(sc.omega) << "," << method_name(r.method) << ","
        << csv_text(r.status) << "," << num(r.W) << ",," << num(r.W_fr) << "," << num(r.W_nr) << ","
        << num(ifr) << ",," << num(inr) << ",," << (cfg.record_runtime ? num(r.runtime_s) : "") << ",1,"
        << joined(r.ratios, num) << "," << joined(r.ratio_classes, csv_text) << "," << joined(r.C, num)
        << "\n";
  }
  for (Method m : cfg.methods) {
    Stat W, ifr, inr, rt;
    for (const auto& r : rows) {
      if (r.method != m || r.status != "ok") continue;
      W.add(r.W);
      ifr.add((r.W_fr - r.W) / r.W_fr);
      inr.add((r.W_nr - r.W) / r.W_nr);
      rt.add(r.runtime_s);
    }
    prefix("aggregate", "", sc.seed);
    out << ",," << num(sc.omega) << "," << method_name(m) << "," << (W.n ? "ok" : "no data") << ","
        << num(W.mean()) << "," << num(W.ci95()) << ",,," << num(ifr.mean()) << "," << num(ifr.ci95())
        << "," << num(inr.mean()) << "," << num(inr.ci95()) << ","
        << (cfg.record_runtime ? num(rt.mean()) : "") << "," << W.n
        << ",,,\n";
  }
}

}  // namespace reprof
