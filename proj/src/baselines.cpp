#include "reprof/baselines.hpp"

#include "reprof/errors.hpp"

namespace reprof {

Solution uniform_ratio(const Network& net, double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw InvalidInput("reprofiling ratio must lie in [0, 1]");
  Solution sol;
  for (const auto& f : net.flows) {
    const double D = gamma * f.d_hat();
    sol.D.push_back(D);
    sol.T.emplace_back(f.path.size(), (f.d - D) / static_cast<double>(f.path.size()));
  }
  return sol;
}

Solution full_reprofiling(const Network& net) { return uniform_ratio(net, 1.0); }

Solution no_reprofiling(const Network& net) { return uniform_ratio(net, 0.0); }

}  // namespace reprof
