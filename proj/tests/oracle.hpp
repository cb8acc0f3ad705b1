#pragma once

// Independent brute-force references for the test suites. Nothing here calls
// into the library's curve or bandwidth code.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace oracle {

using Fn = std::function<double(double)>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline double tb(double r, double b, double t) { return t > 0.0 ? b + r * t : 0.0; }

inline double two_slope(double R, double B, double r, double t) {
  return t > 0.0 ? std::min(R * t, B + r * t) : 0.0;
}

// 2SRLSC written from its three-segment definition. D = 0 jumps to b at T.
inline double beta(double T, double D, double r, double b, double t) {
  if (t < T) return 0.0;
  if (D <= 0.0) return b + r * (t - T);
  if (t < T + D) return b / D * (t - T);
  return b + r * (t - T - D);
}

// Values on t = k h, k = 0..n.
inline std::vector<double> sample(const Fn& f, double h, int n) {
  std::vector<double> v(n + 1);
  for (int k = 0; k <= n; ++k) v[k] = f(k * h);
  return v;
}

// Discrete min-plus convolution over the grid.
inline std::vector<double> convolve(const std::vector<double>& f, const std::vector<double>& g) {
  const std::size_t n = std::min(f.size(), g.size());
  std::vector<double> y(n, std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) y[i] = std::min(y[i], f[j] + g[i - j]);
  return y;
}

// sup over t = h, 2h, ..., n h of f(t) / t.
inline double sup_ratio(const Fn& f, double h, long n) {
  double best = 0.0;
  for (long k = 1; k <= n; ++k) best = std::max(best, f(k * h) / (k * h));
  return best;
}

// sup over t = 0, h, ..., n h of f(t), also probing just after each point so
// jumps at grid points are seen from the right.
inline double sup(const Fn& f, double h, long n) {
  double best = -std::numeric_limits<double>::infinity();
  for (long k = 0; k <= n; ++k) {
    best = std::max(best, f(k * h));
    best = std::max(best, f(k * h + 1e-12));
  }
  return best;
}

// Delay bound by search: for each t on the grid, the smallest grid tau with
// beta(t + tau) >= alpha(t); alpha is probed just after t for origin jumps.
inline double horizontal(const Fn& alpha, const Fn& beta, double h, long n, long max_tau) {
  double best = 0.0;
  for (long k = 0; k <= n; ++k) {
    const double t = k * h;
    const double a = alpha(t + 1e-12);
    long tau = 0;
    while (tau <= max_tau && beta(t + tau * h) < a - 1e-9) ++tau;
    best = std::max(best, tau * h);
  }
  return best;
}

// Root of a monotone function by bisection.
inline double bisect(const Fn& f, double lo, double hi, int iters = 200) {
  const bool rising = f(hi) > f(lo);
  for (int k = 0; k < iters; ++k) {
    const double mid = 0.5 * (lo + hi);
    if ((f(mid) > 0.0) == rising) hi = mid;
    else lo = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace oracle
