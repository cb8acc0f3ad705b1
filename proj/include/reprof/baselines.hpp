#pragma once

#include "reprof/netmodel.hpp"

namespace reprof {

// D_i = gamma * min(d_i, b_i/r_i); the rest of d_i split evenly across hops.
Solution uniform_ratio(const Network& net, double gamma);

// gamma = 1.
Solution full_reprofiling(const Network& net);

// gamma = 0.
Solution no_reprofiling(const Network& net);

}  // namespace reprof
