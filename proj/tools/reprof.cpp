// Command-line front end for the reprofiling library.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "reprof/baselines.hpp"
#include "reprof/buffers.hpp"
#include "reprof/errors.hpp"
#include "reprof/io.hpp"
#include "reprof/nlp_search.hpp"
#include "reprof/scenarios.hpp"
#include "reprof/simulator.hpp"
#include "reprof/solve.hpp"
#include "reprof/sweep.hpp"

using namespace reprof;

namespace {

constexpr int kExitError = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitViolations = 3;

struct ScenarioFlags {
  ScenarioConfig cfg;
  std::string mode = "per_hop_fixed";

  void add(CLI::App* app) {
    app->add_option("--kind", cfg.kind, "tandem | parking_lot | tsn | interdc")->capture_default_str();
    app->add_option("--m", cfg.m, "flows (tandem) or main flows (parking_lot)")->capture_default_str();
    app->add_option("--n", cfg.n, "links on the main path")->capture_default_str();
    app->add_option("--config", cfg.profile_config, "synthetic profile configuration 1 or 2")
        ->capture_default_str();
    app->add_option("--count", cfg.count, "applications (tsn) or flows (interdc)")->capture_default_str();
    app->add_option("--omega", cfg.omega, "deadline scale")->capture_default_str();
    app->add_option("--seed", cfg.seed, "random seed")->capture_default_str();
    app->add_option("--deadline-mode", mode, "per_hop_fixed | end_to_end_fixed")->capture_default_str();
    app->add_option("--topology", cfg.topology_file, "edge-list topology file");
    app->add_option("--rate-cdf", cfg.rate_cdf_file, "per-application rate CDF (CSV)");
  }

  ScenarioConfig resolve() {
    if (mode == "per_hop_fixed") cfg.deadline_mode = DeadlineMode::PerHopFixed;
    else if (mode == "end_to_end_fixed") cfg.deadline_mode = DeadlineMode::EndToEndFixed;
    else throw InvalidInput("unknown deadline mode '" + mode + "'");
    return cfg;
  }
};

struct SolverFlags {
  SolveOptions opt;
  std::string objective = "sum";
  std::uint64_t seed = 1;

  void add(CLI::App* app) {
    app->add_option("--L", opt.greedy.L, "greedy exploration rounds")->capture_default_str();
    app->add_option("--K", opt.greedy.K, "greedy interior samples per round")->capture_default_str();
    app->add_option("--eps", opt.greedy.eps, "greedy relative improvement threshold")->capture_default_str();
    app->add_option("--max-sweeps", opt.greedy.max_sweeps, "cap on adjustment sweeps")->capture_default_str();
    app->add_option("--orderings", opt.nlp.num_orderings, "nlp orderings to sample (0: ceil(log2 N))")
        ->capture_default_str();
    app->add_option("--step", opt.grid.step, "grid oracle step")->capture_default_str();
    app->add_option("--objective", objective, "sum | max")->capture_default_str();
  }

  SolveOptions resolve(std::uint64_t s) {
    if (objective == "sum") opt.objective = Objective::Sum;
    else if (objective == "max") opt.objective = Objective::Max;
    else throw InvalidInput("unknown objective '" + objective + "'");
    opt.nlp.seed = s;
    check(opt.greedy);
    return opt;
  }
};

void print_summary(const Network& net, const SolveOutcome& o) {
  std::printf("%s: W=%s flows=%zu links=%zu runtime=%.3fs\n", method_name(o.method).c_str(),
              io::format_double(o.W).c_str(), net.flows.size(), net.links.size(), o.runtime_s);
}

// The network a solution refers to: embedded when solve aggregated flows.
Network solution_network(const Network& given, const io::json& doc) {
  if (doc.contains("network")) return io::network_from_json(doc.at("network"));
  return given;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bandwidth minimization with reprofiling for deadline-constrained token-bucket flows"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "Generate a scenario network");
  ScenarioFlags gen_flags;
  gen_flags.add(gen);
  std::string gen_out = "-";
  gen->add_option("--out", gen_out, "network .json file, CSV directory, or - for stdout");

  // solve
  auto* sol = app.add_subcommand("solve", "Compute reprofiling delays and local deadlines");
  std::string sol_in, sol_method = "greedy", sol_out = "-";
  bool sol_aggregate = false;
  double sol_lmax = 0.0;
  std::uint64_t sol_seed = 1;
  SolverFlags sol_flags;
  sol->add_option("network", sol_in, "network file")->required();
  sol->add_option("--method", sol_method, "greedy | fr | nr | nlp | oracle")->capture_default_str();
  sol->add_option("--seed", sol_seed, "seed for nlp orderings")->capture_default_str();
  sol->add_flag("--aggregate", sol_aggregate, "merge flows sharing path and deadline first");
  sol->add_option("--lmax", sol_lmax, "packet model: maximum packet size (0 disables)");
  sol->add_option("--out", sol_out, "solution JSON path or -");
  sol_flags.add(sol);

  // sweep
  auto* sw = app.add_subcommand("sweep", "Run many seeded instances and write a CSV");
  ScenarioFlags sw_flags;
  sw_flags.add(sw);
  SolverFlags sw_solver;
  sw_solver.add(sw);
  SweepConfig sw_cfg;
  std::string sw_methods = "greedy,fr,nr", sw_out = "-";
  bool sw_no_aggregate = false, sw_no_timing = false;
  sw->add_option("--instances", sw_cfg.instances, "instances")->capture_default_str();
  sw->add_option("--methods", sw_methods, "comma-separated methods")->capture_default_str();
  sw->add_option("--jobs", sw_cfg.jobs, "worker threads")->capture_default_str();
  sw->add_flag("--no-aggregate", sw_no_aggregate, "solve unaggregated flows");
  sw->add_flag("--no-timing", sw_no_timing, "leave the runtime column empty");
  sw->add_option("--out", sw_out, "CSV path or -");

  // validate
  auto* val = app.add_subcommand("validate", "Simulate a solution and check deadlines and buffers");
  std::string val_net, val_sol, val_out = "-", val_source = "greedy", val_trace;
  SimConfig sim_cfg;
  double val_scale_T = 1.0;
  val->add_option("network", val_net, "network file")->required();
  val->add_option("solution", val_sol, "solution JSON")->required();
  val->add_option("--step", sim_cfg.step, "time step (0: 1e-4 of the smallest deadline)");
  val->add_option("--horizon", sim_cfg.horizon, "simulated time (0: 5x the largest deadline)");
  val->add_option("--source", val_source, "greedy | periodic | onoff")->capture_default_str();
  val->add_option("--seed", sim_cfg.seed, "seed for on/off sources")->capture_default_str();
  val->add_option("--trace", val_trace, "per-step link backlog CSV");
  val->add_option("--trace-every", sim_cfg.trace_every, "trace every k-th step")->capture_default_str();
  val->add_option("--scale-T", val_scale_T, "multiply every local deadline (fault injection)");
  val->add_option("--out", val_out, "report JSON path or -");

  // buffers
  auto* buf = app.add_subcommand("buffers", "Analytic buffer bounds for a solution");
  std::string buf_net, buf_sol, buf_out = "-";
  buf->add_option("network", buf_net, "network file")->required();
  buf->add_option("solution", buf_sol, "solution JSON")->required();
  buf->add_option("--out", buf_out, "report JSON path or -");

  // gain
  auto* gain = app.add_subcommand("gain", "Flow-count gain x/(1-x) of a bandwidth saving x");
  double gain_x = 0.0;
  gain->add_option("x", gain_x, "relative bandwidth saving in [0, 1)")->required();

  // dump-nlp
  auto* dn = app.add_subcommand("dump-nlp", "Print the constraint set of one sampled ordering");
  std::string dn_net;
  std::uint64_t dn_seed = 1;
  dn->add_option("network", dn_net, "network file")->required();
  dn->add_option("--seed", dn_seed, "ordering seed")->capture_default_str();

  // aggregate
  auto* agg = app.add_subcommand("aggregate", "Merge flows sharing path and deadline");
  std::string agg_in, agg_out = "-";
  agg->add_option("network", agg_in, "network file")->required();
  agg->add_option("--out", agg_out, "network output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitError;
  }

  try {
    if (gen->parsed()) {
      io::write_network(generate(gen_flags.resolve()), gen_out);
      return 0;
    }
    if (sol->parsed()) {
      Network net = io::read_network(sol_in);
      if (sol_aggregate) net = aggregate(net).net;
      const SolveOptions opt = sol_flags.resolve(sol_seed);
      const Method method = parse_method(sol_method);
      SolveOutcome o;
      io::SolutionDoc doc;
      if (sol_lmax > 0.0) {
        std::unordered_map<std::string, double> per_flow;
        for (const auto& f : net.flows) per_flow[f.id] = sol_lmax;
        const auto fp = solve_with_packet_model(net, sol_lmax, per_flow, [&](const Network& n) {
          const auto s = solve(n, method, opt);
          return std::make_pair(s.sol, s.C);
        });
        o.method = method;
        o.sol = fp.sol;
        o.C = fp.C;
        o.W = objective_value(fp.C, opt.objective);
        doc.extra["packet_rounds"] = fp.rounds;
        doc.extra["effective_deadlines"] = io::json::array();
        for (const auto& f : fp.effective.flows) doc.extra["effective_deadlines"].push_back(f.d);
      } else {
        o = solve(net, method, opt);
      }
      doc.method = method_name(method);
      doc.sol = o.sol;
      doc.C = o.C;
      doc.W = o.W;
      doc.extra["objective"] = sol_flags.objective;
      if (sol_aggregate) doc.extra["network"] = io::network_to_json(net);
      io::write_json(io::solution_to_json(net, doc), sol_out);
      if (sol_out != "-") print_summary(net, o);
      return 0;
    }
    if (sw->parsed()) {
      sw_cfg.scenario = sw_flags.resolve();
      sw_cfg.solve = sw_solver.resolve(sw_cfg.scenario.seed);
      sw_cfg.aggregate = !sw_no_aggregate;
      sw_cfg.record_runtime = !sw_no_timing;
      sw_cfg.methods.clear();
      std::stringstream ss(sw_methods);
      for (std::string m; std::getline(ss, m, ',');) sw_cfg.methods.push_back(parse_method(m));
      const auto rows = run_sweep(sw_cfg);
      if (sw_out == "-") {
        write_sweep_csv(sw_cfg, rows, std::cout);
      } else {
        std::ofstream out(sw_out);
        if (!out) throw InvalidInput("cannot write '" + sw_out + "'");
        write_sweep_csv(sw_cfg, rows, out);
      }
      return 0;
    }
    if (val->parsed()) {
      const auto doc_json = io::read_json(val_sol);
      const Network net = solution_network(io::read_network(val_net), doc_json);
      auto doc = io::solution_from_json(net, doc_json);
      for (auto& row : doc.sol.T)
        for (double& t : row) t *= val_scale_T;
      if (doc.C.empty()) doc.C = link_bandwidths(net, doc.sol);
      if (val_source == "greedy") sim_cfg.source = SourceModel::GreedyBurst;
      else if (val_source == "periodic") sim_cfg.source = SourceModel::PeriodicBurst;
      else if (val_source == "onoff") sim_cfg.source = SourceModel::OnOff;
      else throw InvalidInput("unknown source '" + val_source + "'");
      std::ofstream trace;
      if (!val_trace.empty()) {
        trace.open(val_trace);
        if (!trace) throw InvalidInput("cannot write '" + val_trace + "'");
        sim_cfg.trace = &trace;
      }
      const SimReport rep = simulate(net, doc.sol, doc.C, sim_cfg);
      io::json out = io::sim_report_to_json(net, rep);
      out["buffers"] = io::buffer_report_to_json(net, buffer_report(net, doc.sol, doc.C));
      io::write_json(out, val_out);
      if (val_out != "-")
        std::printf("%s: %zu violation(s) over %ld steps\n", rep.ok() ? "ok" : "FAILED",
                    rep.violations.size(), rep.steps);
      return rep.ok() ? 0 : kExitViolations;
    }
    if (buf->parsed()) {
      const auto doc_json = io::read_json(buf_sol);
      const Network net = solution_network(io::read_network(buf_net), doc_json);
      auto doc = io::solution_from_json(net, doc_json);
      if (doc.C.empty()) doc.C = link_bandwidths(net, doc.sol);
      io::write_json(io::buffer_report_to_json(net, buffer_report(net, doc.sol, doc.C)), buf_out);
      return 0;
    }
    if (gain->parsed()) {
      std::printf("%s\n", io::format_double(flow_count_gain(gain_x)).c_str());
      return 0;
    }
    if (dn->parsed()) {
      const Network net = io::read_network(dn_net);
      const NetIndex ix = net.index();
      Rng rng(dn_seed);
      std::cout << dump(emit_constraints(generate_feasible_ordering(net, ix, rng), net, ix));
      return 0;
    }
    if (agg->parsed()) {
      io::write_network(aggregate(io::read_network(agg_in)).net, agg_out);
      return 0;
    }
  } catch (const Infeasible& e) {
    std::fprintf(stderr, "infeasible: %s\n", e.what());
    return kExitInfeasible;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitError;
  }
  return 0;
}
