#pragma once

#include <string>
#include <vector>

#include "reprof/greedy.hpp"
#include "reprof/netmodel.hpp"
#include "reprof/nlp_search.hpp"

namespace reprof {

enum class Method { Greedy, FR, NR, NLP, Oracle };

Method parse_method(const std::string& name);
std::string method_name(Method m);

struct SolveOptions {
  GreedyConfig greedy;
  SearchOptions nlp;
  GridOptions grid;
  Objective objective = Objective::Sum;
};

struct SolveOutcome {
  Method method = Method::Greedy;
  Solution sol;
  std::vector<double> C;
  double W = 0.0;
  double runtime_s = 0.0;
};

// Throws Infeasible when the method finds no finite-bandwidth configuration.
SolveOutcome solve(const Network& net, Method method, const SolveOptions& opt = {});

}  // namespace reprof
