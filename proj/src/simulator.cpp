#include "reprof/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <set>

#include "reprof/bandwidth.hpp"
#include "reprof/buffers.hpp"
#include "reprof/errors.hpp"
#include "reprof/random.hpp"

namespace reprof {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Profile-conformant traffic generator for one flow. arrival(x) is the time at
// which cumulative emission first reaches x; arrival_after(x) the time it
// first exceeds x.
class Source {
 public:
  Source(SourceModel model, double r, double b, double dt, std::uint64_t seed, double p)
      : model_(b > 0.0 ? model : SourceModel::GreedyBurst), r_(r), b_(b), dt_(dt), rng_(seed),
        p_(p), tokens_(b) {}

  double emit(long n) {
    double e = 0.0;
    switch (model_) {
      case SourceModel::GreedyBurst:
        e = (n == 0 ? b_ : 0.0) + r_ * dt_;
        break;
      case SourceModel::PeriodicBurst: {
        const double period = b_ / r_;
        const long first = static_cast<long>(std::ceil(n * dt_ / period - 1e-12));
        const long last = static_cast<long>(std::ceil((n + 1) * dt_ / period - 1e-12));
        e = b_ * static_cast<double>(std::max(0L, last - first));
        break;
      }
      case SourceModel::OnOff: {
        if (n > 0 && rng_.uniform() < p_) on_ = !on_;
        const double avail = tokens_ + r_ * dt_;
        e = on_ ? avail : 0.0;
        tokens_ = on_ ? 0.0 : std::min(b_, avail);
        break;
      }
    }
    if (e > 0.0 && model_ == SourceModel::OnOff) {
      cum_ += e;
      steps_.push_back({n, cum_});
    }
    return e;
  }

  double arrival(double x) const {
    switch (model_) {
      case SourceModel::GreedyBurst:
        return x <= b_ ? 0.0 : (x - b_) / r_;
      case SourceModel::PeriodicBurst:
        return x <= 0.0 ? 0.0 : std::max(0.0, std::ceil(x / b_ - 1e-9) - 1.0) * b_ / r_;
      case SourceModel::OnOff: {
        const auto it = std::lower_bound(steps_.begin(), steps_.end(), x * (1 - 1e-9),
                                         [](const Step& s, double v) { return s.cum < v; });
        return it == steps_.end() ? kInf : it->n * dt_;
      }
    }
    return kInf;
  }

  double arrival_after(double x) const {
    switch (model_) {
      case SourceModel::GreedyBurst:
        return x < b_ ? 0.0 : (x - b_) / r_;
      case SourceModel::PeriodicBurst:
        return std::floor(x / b_ + 1e-9) * b_ / r_;
      case SourceModel::OnOff: {
        const auto it = std::upper_bound(steps_.begin(), steps_.end(), x * (1 + 1e-9),
                                         [](double v, const Step& s) { return v < s.cum; });
        return it == steps_.end() ? kInf : it->n * dt_;
      }
    }
    return kInf;
  }

  // Levels in (lo, hi] where arrival() jumps or bends.
  std::vector<double> breaks(double lo, double hi) const {
    std::vector<double> out;
    if (model_ == SourceModel::GreedyBurst) {
      if (b_ > lo && b_ <= hi) out.push_back(b_);
    } else if (model_ == SourceModel::PeriodicBurst) {
      for (double k = std::floor(lo / b_ + 1e-9) + 1; k * b_ <= hi * (1 + 1e-9); k += 1.0)
        out.push_back(std::min(k * b_, hi));
    } else {
      auto it = std::upper_bound(steps_.begin(), steps_.end(), lo,
                                 [](double v, const Step& s) { return v < s.cum; });
      for (; it != steps_.end() && it->cum <= hi; ++it) out.push_back(it->cum);
    }
    return out;
  }

  // Drops bookkeeping for levels that have fully left the network.
  void forget_below(double level) {
    while (steps_.size() > 1 && steps_[1].cum < level) steps_.pop_front();
  }

 private:
  struct Step {
    long n;
    double cum;
  };
  SourceModel model_;
  double r_, b_, dt_;
  Rng rng_;
  double p_;
  double tokens_;
  bool on_ = true;
  double cum_ = 0.0;
  std::deque<Step> steps_;
};

// Greedy shaper for min(R t, B + r t); R = inf for a plain token bucket.
struct Shaper {
  double R = kInf, B = 0.0, r = 0.0;
  double tokens = 0.0;
  double backlog = 0.0;

  double release(double dt) {
    const double avail = tokens + r * dt;
    const double out = std::min({backlog, avail, R * dt});
    tokens = std::min(B, avail - out);
    backlog -= out;
    return out;
  }
};

Shaper make_shaper(const FlowProfile& f, double D) {
  Shaper s;
  s.r = f.r;
  if (D > 0.0 && f.b > 0.0) {
    const double cap = f.burst_time();
    s.R = D >= cap ? f.r : f.b / D;
    s.B = D >= cap ? 0.0 : f.b - f.r * D;
  } else {
    s.B = f.b;
  }
  s.tokens = s.B;
  return s;
}

struct Chunk {
  double deadline;
  double amount;
};

std::vector<std::size_t> link_order(const Network& net, const NetIndex& ix) {
  const std::size_t n = net.links.size();
  std::vector<std::set<std::size_t>> succ(n);
  std::vector<int> indeg(n, 0);
  for (const auto& p : ix.path)
    for (std::size_t h = 0; h + 1 < p.size(); ++h)
      if (succ[p[h]].insert(p[h + 1]).second) ++indeg[p[h + 1]];
  std::set<std::size_t> ready;
  for (std::size_t j = 0; j < n; ++j)
    if (indeg[j] == 0) ready.insert(j);
  std::vector<std::size_t> order;
  std::vector<bool> done(n, false);
  while (order.size() < n) {
    if (ready.empty()) {
      // Cycle: break it at the lowest remaining index.
      for (std::size_t j = 0; j < n; ++j)
        if (!done[j]) {
          ready.insert(j);
          break;
        }
    }
    const std::size_t j = *ready.begin();
    ready.erase(ready.begin());
    if (done[j]) continue;
    done[j] = true;
    order.push_back(j);
    for (std::size_t k : succ[j])
      if (!done[k] && --indeg[k] == 0) ready.insert(k);
  }
  return order;
}

}  // namespace

SimReport simulate(const Network& net, const Solution& sol, const SimConfig& cfg) {
  return simulate(net, sol, link_bandwidths(net, sol), cfg);
}

SimReport simulate(const Network& net, const Solution& sol, const std::vector<double>& C,
                   const SimConfig& cfg) {
  const NetIndex ix = net.index();
  if (C.size() != net.links.size()) throw InvalidInput("one bandwidth per link required");
  if (!check_solution(net, sol).empty()) throw InvalidInput("solution violates its constraints");
  SimReport rep;
  const std::size_t m = net.flows.size();
  if (m == 0) return rep;

  double dmin = kInf, dmax = 0.0, scale = 0.0;
  for (const auto& f : net.flows) {
    dmin = std::min(dmin, f.d);
    dmax = std::max(dmax, f.d);
    scale += f.b + f.r * f.d;
  }
  const double dt = cfg.step > 0.0 ? cfg.step : 1e-4 * dmin;
  const double horizon = cfg.horizon > 0.0 ? cfg.horizon : 5.0 * dmax;
  if (!(horizon > dmax)) throw InvalidInput("simulation horizon must exceed the largest deadline");
  const long steps = static_cast<long>(std::ceil(horizon / dt - 1e-9));
  const double eps = 1e-12 * scale;
  rep.step = dt;
  rep.horizon = horizon;
  rep.steps = steps;

  std::vector<Source> src;
  std::vector<std::vector<Shaper>> shaper(m);
  std::vector<double> exited(m, 0.0), emitted(m, 0.0);
  rep.max_delay.assign(m, 0.0);
  rep.max_ingress_backlog.assign(m, 0.0);
  rep.max_reprofiler_backlog.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    const auto& f = net.flows[i];
    src.emplace_back(cfg.source, f.r, f.b, dt, derive_seed(cfg.seed, i), cfg.switch_prob);
    for (std::size_t h = 0; h < f.path.size(); ++h) shaper[i].push_back(make_shaper(f, sol.D[i]));
    rep.max_reprofiler_backlog[i].assign(f.path.size(), 0.0);
    rep.delay_bound.push_back(sol.delay_budget(i));
  }
  const std::size_t n = net.links.size();
  std::vector<std::vector<std::deque<Chunk>>> queue(n);
  std::vector<double> link_backlog(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) queue[j].resize(ix.flows_on[j].size());
  rep.max_link_backlog.assign(n, 0.0);
  rep.max_link_served.assign(n, 0.0);
  const auto order = link_order(net, ix);

  if (cfg.trace) {
    *cfg.trace << "t";
    for (const auto& l : net.links) *cfg.trace << "," << l;
    *cfg.trace << "\n";
  }

  std::vector<double> exit_now(m);
  for (long s = 0; s < steps; ++s) {
    const double t0 = s * dt;
    for (std::size_t i = 0; i < m; ++i) {
      const double e = src[i].emit(s);
      emitted[i] += e;
      shaper[i][0].backlog += e;
    }
    std::fill(exit_now.begin(), exit_now.end(), 0.0);
    for (std::size_t j : order) {
      const auto& fl = ix.flows_on[j];
      for (std::size_t k = 0; k < fl.size(); ++k) {
        const std::size_t i = fl[k], h = ix.hop_of[j][k];
        const double out = shaper[i][h].release(dt);
        if (out > eps) {
          queue[j][k].push_back({t0 + dt + sol.T[i][h], out});
          link_backlog[j] += out;
        } else {
          shaper[i][h].backlog += out;  // keep rounding crumbs in place
        }
      }
      double cap = C[j] * dt;
      double served = 0.0;
      while (cap > eps) {
        std::size_t best = SIZE_MAX;
        for (std::size_t k = 0; k < fl.size(); ++k)
          if (!queue[j][k].empty() &&
              (best == SIZE_MAX || queue[j][k].front().deadline < queue[j][best].front().deadline))
            best = k;
        if (best == SIZE_MAX) break;
        Chunk& c = queue[j][best].front();
        double x = std::min(cap, c.amount);
        const std::size_t i = fl[best], h = ix.hop_of[j][best];
        if (c.amount - x <= eps) {
          x = c.amount;
          queue[j][best].pop_front();
        } else {
          c.amount -= x;
        }
        cap -= x;
        served += x;
        if (h + 1 < net.flows[i].path.size()) shaper[i][h + 1].backlog += x;
        else exit_now[i] += x;
      }
      link_backlog[j] = std::max(0.0, link_backlog[j] - served);
      rep.max_link_served[j] = std::max(rep.max_link_served[j], served / dt);
    }

    for (std::size_t i = 0; i < m; ++i) {
      const double e = exit_now[i];
      if (e <= eps) continue;
      const double lo = exited[i], hi = lo + e;
      auto exit_time = [&](double x) { return t0 + (x - lo) / e * dt; };
      double worst = t0 - src[i].arrival_after(lo);
      worst = std::max(worst, exit_time(hi) - src[i].arrival(hi));
      for (double x : src[i].breaks(lo, hi)) worst = std::max(worst, exit_time(x) - src[i].arrival(x));
      rep.max_delay[i] = std::max(rep.max_delay[i], worst);
      exited[i] = hi;
      src[i].forget_below(lo);
    }
    for (std::size_t i = 0; i < m; ++i) {
      rep.max_ingress_backlog[i] = std::max(rep.max_ingress_backlog[i], shaper[i][0].backlog);
      for (std::size_t h = 1; h < shaper[i].size(); ++h)
        rep.max_reprofiler_backlog[i][h] =
            std::max(rep.max_reprofiler_backlog[i][h], shaper[i][h].backlog);
    }
    for (std::size_t j = 0; j < n; ++j) rep.max_link_backlog[j] = std::max(rep.max_link_backlog[j], link_backlog[j]);
    if (cfg.trace && s % std::max(1, cfg.trace_every) == 0) {
      *cfg.trace << t0 + dt;
      for (double v : link_backlog) *cfg.trace << "," << v;
      *cfg.trace << "\n";
    }
  }

  // Checks against the analytic guarantees.
  const BufferReport bounds = buffer_report(net, sol, C);
  const double tol = 1e-9;
  for (std::size_t i = 0; i < m; ++i) {
    const auto& f = net.flows[i];
    const std::string who = "flow '" + f.id + "'";
    if (rep.max_delay[i] > rep.delay_bound[i] + 2 * dt + tol * rep.delay_bound[i])
      rep.violations.push_back(who + ": delay " + std::to_string(rep.max_delay[i]) + " exceeds " +
                               std::to_string(rep.delay_bound[i]));
    const double first_C = C[ix.path[i][0]];
    if (rep.max_ingress_backlog[i] > bounds.ingress[i] + first_C * dt + tol * scale)
      rep.violations.push_back(who + ": ingress backlog " + std::to_string(rep.max_ingress_backlog[i]) +
                               " exceeds " + std::to_string(bounds.ingress[i]));
    for (std::size_t h = 1; h < f.path.size(); ++h) {
      const double up_C = C[ix.path[i][h - 1]];
      if (rep.max_reprofiler_backlog[i][h] > bounds.reprofiling[i][h] + up_C * dt + tol * scale)
        rep.violations.push_back(who + ": reprofiler backlog at '" + f.path[h] + "' " +
                                 std::to_string(rep.max_reprofiler_backlog[i][h]) + " exceeds " +
                                 std::to_string(bounds.reprofiling[i][h]));
    }
    double inside = 0.0;
    for (const auto& sh : shaper[i]) inside += sh.backlog;
    for (std::size_t h = 0; h < f.path.size(); ++h) {
      const std::size_t j = ix.path[i][h];
      const auto& fl = ix.flows_on[j];
      const std::size_t k = static_cast<std::size_t>(std::find(fl.begin(), fl.end(), i) - fl.begin());
      for (const auto& c : queue[j][k]) inside += c.amount;
    }
    if (std::abs(emitted[i] - exited[i] - inside) > 1e-6 * std::max(1.0, emitted[i]))
      rep.violations.push_back(who + ": fluid not conserved");
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (rep.max_link_backlog[j] > bounds.scheduling[j] + C[j] * dt + tol * scale)
      rep.violations.push_back("link '" + net.links[j] + "': backlog " +
                               std::to_string(rep.max_link_backlog[j]) + " exceeds " +
                               std::to_string(bounds.scheduling[j]));
    if (rep.max_link_served[j] > C[j] * (1 + 1e-9) + 2 * eps / dt)
      rep.violations.push_back("link '" + net.links[j] + "': served above its bandwidth");
  }
  return rep;
}

}  // namespace reprof
