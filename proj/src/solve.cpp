#include "reprof/solve.hpp"

#include <chrono>

#include "reprof/baselines.hpp"
#include "reprof/errors.hpp"

namespace reprof {

Method parse_method(const std::string& name) {
  if (name == "greedy") return Method::Greedy;
  if (name == "fr") return Method::FR;
  if (name == "nr") return Method::NR;
  if (name == "nlp") return Method::NLP;
  if (name == "oracle") return Method::Oracle;
  throw InvalidInput("unknown method '" + name + "' (greedy, fr, nr, nlp, oracle)");
}

std::string method_name(Method m) {
  switch (m) {
    case Method::Greedy: return "greedy";
    case Method::FR: return "fr";
    case Method::NR: return "nr";
    case Method::NLP: return "nlp";
    case Method::Oracle: return "oracle";
  }
  return "?";
}

SolveOutcome solve(const Network& net, Method method, const SolveOptions& opt) {
  const auto start = std::chrono::steady_clock::now();
  SolveOutcome out;
  out.method = method;
  switch (method) {
    case Method::Greedy: {
      GreedyConfig cfg = opt.greedy;
      cfg.objective = opt.objective;
      out.sol = explore(net, cfg).sol;
      break;
    }
    case Method::FR:
      out.sol = full_reprofiling(net);
      break;
    case Method::NR:
      out.sol = no_reprofiling(net);
      break;
    case Method::NLP:
      if (opt.objective != Objective::Sum) throw InvalidInput("nlp search minimizes the sum objective only");
      out.sol = search(net, opt.nlp).sol;
      break;
    case Method::Oracle:
      if (opt.objective != Objective::Sum) throw InvalidInput("grid oracle minimizes the sum objective only");
      out.sol = grid_oracle(net, opt.grid).sol;
      break;
  }
  out.C = link_bandwidths(net, out.sol);
  out.W = objective_value(out.C, opt.objective);
  out.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace reprof
