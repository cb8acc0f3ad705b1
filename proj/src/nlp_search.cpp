#include "reprof/nlp_search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "reprof/bandwidth.hpp"
#include "reprof/baselines.hpp"
#include "reprof/errors.hpp"

namespace reprof {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Orderings

struct LinkEvents {
  std::vector<std::size_t> pos_T, pos_P;  // merged position per local flow
};

LinkEvents positions(const std::vector<std::size_t>& flows, const std::vector<Ordering::Event>& m) {
  LinkEvents le;
  le.pos_T.assign(flows.size(), SIZE_MAX);
  le.pos_P.assign(flows.size(), SIZE_MAX);
  for (std::size_t p = 0; p < m.size(); ++p) {
    const auto it = std::find(flows.begin(), flows.end(), m[p].flow);
    if (it == flows.end()) continue;
    const std::size_t a = static_cast<std::size_t>(it - flows.begin());
    (m[p].prime ? le.pos_P : le.pos_T)[a] = p;
  }
  return le;
}

std::vector<std::size_t> rank_of(const std::vector<std::size_t>& order, std::size_t n) {
  std::vector<std::size_t> r(n, SIZE_MAX);
  for (std::size_t k = 0; k < order.size(); ++k) r[order[k]] = k;
  return r;
}

// ---------------------------------------------------------------------------
// Variable layout and polytopes over x = (D_i, T_ih)

struct Layout {
  int n = 0;
  std::vector<int> D;
  std::vector<std::vector<int>> T;
};

Layout make_layout(const Network& net) {
  Layout L;
  L.n = static_cast<int>(net.flows.size());
  for (std::size_t i = 0; i < net.flows.size(); ++i) L.D.push_back(static_cast<int>(i));
  for (const auto& f : net.flows) {
    L.T.emplace_back();
    for (std::size_t h = 0; h < f.path.size(); ++h) L.T.back().push_back(L.n++);
  }
  return L;
}

std::vector<lp::Row> deadline_rows(const Network& net, const Layout& L) {
  std::vector<lp::Row> rows;
  for (std::size_t i = 0; i < net.flows.size(); ++i) {
    lp::Row r{{{L.D[i], 1.0}}, lp::Sense::LE, net.flows[i].d};
    for (int v : L.T[i]) r.coef.push_back({v, 1.0});
    rows.push_back(r);
    rows.push_back({{{L.D[i], 1.0}}, lp::Sense::LE, net.flows[i].burst_time()});
  }
  return rows;
}

std::vector<std::pair<int, double>> event_expr(const Layout& L, const NetIndex& ix, std::size_t link,
                                               const Ordering::Event& e) {
  const auto& fl = ix.flows_on[link];
  const std::size_t k = static_cast<std::size_t>(std::find(fl.begin(), fl.end(), e.flow) - fl.begin());
  const int t = L.T[e.flow][ix.hop_of[link][k]];
  if (!e.prime) return {{t, 1.0}};
  return {{t, 1.0}, {L.D[e.flow], 1.0}};
}

lp::Row difference_row(std::vector<std::pair<int, double>> a,
                       const std::vector<std::pair<int, double>>& b) {
  for (const auto& [v, c] : b) a.push_back({v, -c});
  return {std::move(a), lp::Sense::LE, 0.0};
}

Solution to_solution(const Layout& L, const std::vector<double>& x) {
  Solution s;
  for (std::size_t i = 0; i < L.D.size(); ++i) {
    s.D.push_back(std::max(0.0, x[L.D[i]]));
    s.T.emplace_back();
    for (int v : L.T[i]) s.T.back().push_back(std::max(0.0, x[v]));
  }
  return s;
}

std::vector<double> to_vector(const Layout& L, const Solution& s) {
  std::vector<double> x(L.n, 0.0);
  for (std::size_t i = 0; i < L.D.size(); ++i) {
    x[L.D[i]] = s.D[i];
    for (std::size_t h = 0; h < L.T[i].size(); ++h) x[L.T[i][h]] = s.T[i][h];
  }
  return x;
}

// L1-nearest point of {rows} to x0, or empty when the rows are infeasible.
std::vector<double> project(const std::vector<lp::Row>& rows, int n, const std::vector<double>& x0) {
  lp::Problem p;
  p.num_vars = 3 * n;
  p.rows = rows;
  p.cost.assign(3 * n, 0.0);
  for (int v = 0; v < n; ++v) {
    p.rows.push_back({{{v, 1.0}, {n + v, -1.0}, {2 * n + v, 1.0}}, lp::Sense::EQ, x0[v]});
    p.cost[n + v] = p.cost[2 * n + v] = 1.0;
  }
  const auto res = lp::solve(p);
  if (res.status != lp::Status::Optimal) return {};
  return {res.x.begin(), res.x.begin() + n};
}

// Projected pattern search on the objective inside a polytope {a x <= rhs, x >= 0}.
class LocalSearch {
 public:
  LocalSearch(const Network& net, const NetIndex& ix, const Layout& L, std::vector<lp::Row> rows)
      : net_(net), ix_(ix), L_(L), rows_(std::move(rows)) {
    for (auto& r : rows_) {
      if (r.sense == lp::Sense::GE) {
        for (auto& c : r.coef) c.second = -c.second;
        r.rhs = -r.rhs;
        r.sense = lp::Sense::LE;
      }
    }
    build_directions();
  }

  double eval(const std::vector<double>& x) const {
    try {
      return objective_value(link_bandwidths(net_, ix_, to_solution(L_, x)));
    } catch (const Infeasible&) {
      return kInf;
    }
  }

  double run(std::vector<double>& x, const NlpOptions& opt, Rng& rng) const {
    double f = eval(x);
    double s = 0.25;
    int evals = 0;
    while (s >= opt.min_step && evals < 200000) {
      bool improved = false;
      for (const auto& d : dirs_) improved |= try_move(x, f, d, s, evals);
      if (!improved) {
        for (int k = 0; k < opt.random_directions; ++k) improved |= try_move(x, f, random_dir(rng), s, evals);
      }
      if (!improved) s *= 0.5;
    }
    return f;
  }

 private:
  struct Dir {
    std::vector<std::pair<int, double>> v;
    double scale;
  };

  void build_directions() {
    for (std::size_t i = 0; i < L_.D.size(); ++i) {
      const double sc = net_.flows[i].d;
      std::vector<int> vars{L_.D[i]};
      vars.insert(vars.end(), L_.T[i].begin(), L_.T[i].end());
      for (std::size_t a = 0; a < vars.size(); ++a) {
        for (std::size_t b = a + 1; b < vars.size(); ++b) {
          dirs_.push_back({{{vars[a], 1.0}, {vars[b], -1.0}}, sc});
          dirs_.push_back({{{vars[a], -1.0}, {vars[b], 1.0}}, sc});
        }
      }
      for (int v : vars) {
        dirs_.push_back({{{v, 1.0}}, sc});
        dirs_.push_back({{{v, -1.0}}, sc});
      }
    }
  }

  Dir random_dir(Rng& rng) const {
    // Budget-preserving mix over one or two flows.
    Dir d{{}, 0.0};
    const int flows = L_.D.size() > 1 && rng.uniform() < 0.5 ? 2 : 1;
    for (int k = 0; k < flows; ++k) {
      const std::size_t i = rng.index(L_.D.size());
      std::vector<int> vars{L_.D[i]};
      vars.insert(vars.end(), L_.T[i].begin(), L_.T[i].end());
      std::vector<double> w(vars.size());
      double mean = 0.0;
      for (auto& c : w) mean += (c = rng.uniform(-1.0, 1.0));
      mean /= static_cast<double>(w.size());
      for (std::size_t a = 0; a < vars.size(); ++a) d.v.push_back({vars[a], w[a] - mean});
      d.scale = std::max(d.scale, net_.flows[i].d);
    }
    // The same flow may be drawn twice; merge so the ratio test sees net coefficients.
    std::sort(d.v.begin(), d.v.end());
    std::vector<std::pair<int, double>> merged;
    for (const auto& e : d.v) {
      if (!merged.empty() && merged.back().first == e.first) merged.back().second += e.second;
      else merged.push_back(e);
    }
    d.v = std::move(merged);
    return d;
  }

  double max_step(const std::vector<double>& x, const Dir& d) const {
    double a = kInf;
    for (const auto& [v, c] : d.v)
      if (c < 0.0) a = std::min(a, std::max(0.0, x[v]) / -c);
    for (const auto& r : rows_) {
      double ad = 0.0, ax = 0.0;
      for (const auto& [v, c] : r.coef) {
        ax += c * x[v];
        for (const auto& [w, e] : d.v)
          if (w == v) ad += c * e;
      }
      if (r.sense == lp::Sense::EQ && std::abs(ad) > 1e-15) return 0.0;
      if (ad > 1e-15) a = std::min(a, std::max(0.0, r.rhs - ax) / ad);
    }
    return a;
  }

  bool try_move(std::vector<double>& x, double& f, const Dir& d, double s, int& evals) const {
    const double step = std::min(s * d.scale, max_step(x, d));
    if (!(step > 1e-15 * d.scale)) return false;
    std::vector<double> y = x;
    for (const auto& [v, c] : d.v) y[v] = std::max(0.0, y[v] + step * c);
    ++evals;
    const double g = eval(y);
    if (!(g < f - 1e-13 * std::abs(f))) return false;
    x = std::move(y);
    f = g;
    return true;
  }

  const Network& net_;
  const NetIndex& ix_;
  const Layout& L_;
  std::vector<lp::Row> rows_;
  std::vector<Dir> dirs_;
};

double ramp_term(const FlowProfile& f, double D, double T, double t) {
  if (D <= 0.0) return t >= T ? f.b : 0.0;
  return f.b / D * (t - T);
}

}  // namespace

// ---------------------------------------------------------------------------

Ordering generate_feasible_ordering(const Network& net, const NetIndex& ix, Rng& rng) {
  Ordering o;
  const std::size_t m = net.flows.size();
  o.d_rank.resize(m);
  std::iota(o.d_rank.begin(), o.d_rank.end(), 0);
  rng.shuffle(o.d_rank);
  o.d_zero.assign(m, false);
  const auto rank_D = rank_of(o.d_rank, m);

  for (std::size_t j = 0; j < net.links.size(); ++j) {
    const auto& fl = ix.flows_on[j];
    const std::size_t k = fl.size();
    std::vector<std::size_t> local(k);
    std::iota(local.begin(), local.end(), 0);
    rng.shuffle(local);
    o.t_rank.emplace_back();
    for (std::size_t a : local) o.t_rank.back().push_back(fl[a]);
    std::vector<std::size_t> pos_T(k);
    for (std::size_t p = 0; p < k; ++p) pos_T[local[p]] = p;

    // Nodes 2a (T_a) and 2a+1 (T'_a); edges encode the forced relations.
    std::vector<std::vector<std::size_t>> succ(2 * k);
    std::vector<int> indeg(2 * k, 0);
    auto edge = [&](std::size_t u, std::size_t v) {
      succ[u].push_back(v);
      ++indeg[v];
    };
    for (std::size_t a = 0; a < k; ++a) edge(2 * a, 2 * a + 1);
    for (std::size_t p = 0; p + 1 < k; ++p) edge(2 * local[p], 2 * local[p + 1]);
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = 0; b < k; ++b)
        if (pos_T[a] < pos_T[b] && rank_D[fl[a]] < rank_D[fl[b]]) edge(2 * a + 1, 2 * b + 1);

    std::vector<std::size_t> ready;
    for (std::size_t u = 0; u < 2 * k; ++u)
      if (indeg[u] == 0) ready.push_back(u);
    o.merged.emplace_back();
    while (!ready.empty()) {
      const std::size_t pick = rng.index(ready.size());
      const std::size_t u = ready[pick];
      ready.erase(ready.begin() + static_cast<std::ptrdiff_t>(pick));
      o.merged.back().push_back({fl[u / 2], (u % 2) == 1});
      for (std::size_t v : succ[u])
        if (--indeg[v] == 0) ready.push_back(v);
    }
  }
  return o;
}

std::string ordering_violation(const Network& net, const NetIndex& ix, const Ordering& o) {
  const std::size_t m = net.flows.size();
  if (o.d_rank.size() != m || o.d_zero.size() != m) return "D ranking has the wrong size";
  {
    auto sorted = o.d_rank;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < m; ++i)
      if (sorted[i] != i) return "D ranking is not a permutation";
  }
  const auto rank_D = rank_of(o.d_rank, m);
  if (o.t_rank.size() != net.links.size() || o.merged.size() != net.links.size())
    return "per-link rankings have the wrong size";
  for (std::size_t j = 0; j < net.links.size(); ++j) {
    const auto& fl = ix.flows_on[j];
    const std::string where = "link '" + net.links[j] + "': ";
    if (o.merged[j].size() != 2 * fl.size() || o.t_rank[j].size() != fl.size())
      return where + "ranking has the wrong size";
    const auto le = positions(fl, o.merged[j]);
    for (std::size_t a = 0; a < fl.size(); ++a) {
      if (le.pos_T[a] == SIZE_MAX || le.pos_P[a] == SIZE_MAX) return where + "missing event";
      if (le.pos_T[a] > le.pos_P[a]) return where + "T' precedes T";
    }
    std::vector<std::size_t> pos_T(fl.size());
    for (std::size_t p = 0; p < fl.size(); ++p) {
      const auto it = std::find(fl.begin(), fl.end(), o.t_rank[j][p]);
      if (it == fl.end()) return where + "T ranking names a foreign flow";
      pos_T[static_cast<std::size_t>(it - fl.begin())] = p;
    }
    for (std::size_t a = 0; a < fl.size(); ++a) {
      for (std::size_t b = 0; b < fl.size(); ++b) {
        if (pos_T[a] < pos_T[b] && le.pos_T[a] > le.pos_T[b])
          return where + "merged order disagrees with the T ranking";
        if (pos_T[a] < pos_T[b] && rank_D[fl[a]] < rank_D[fl[b]] && le.pos_P[a] > le.pos_P[b])
          return where + "T' order violates the pairwise implication";
      }
    }
  }
  return {};
}

Ordering ordering_of(const Network& net, const NetIndex& ix, const Solution& sol) {
  Ordering o;
  const std::size_t m = net.flows.size();
  o.d_rank.resize(m);
  std::iota(o.d_rank.begin(), o.d_rank.end(), 0);
  std::stable_sort(o.d_rank.begin(), o.d_rank.end(),
                   [&](std::size_t a, std::size_t b) { return sol.D[a] < sol.D[b]; });
  o.d_zero.resize(m);
  for (std::size_t i = 0; i < m; ++i) o.d_zero[i] = sol.D[i] <= 0.0;
  const auto rank_D = rank_of(o.d_rank, m);
  for (std::size_t j = 0; j < net.links.size(); ++j) {
    const auto& fl = ix.flows_on[j];
    std::vector<std::size_t> loc(fl.size());
    std::iota(loc.begin(), loc.end(), 0);
    auto T = [&](std::size_t a) { return sol.T[fl[a]][ix.hop_of[j][a]]; };
    std::stable_sort(loc.begin(), loc.end(), [&](std::size_t a, std::size_t b) { return T(a) < T(b); });
    std::vector<std::size_t> pos_T(fl.size());
    o.t_rank.emplace_back();
    for (std::size_t p = 0; p < loc.size(); ++p) {
      o.t_rank.back().push_back(fl[loc[p]]);
      pos_T[loc[p]] = p;
    }
    struct Key {
      double v;
      int kind;
      std::size_t rank;
      Ordering::Event e;
    };
    std::vector<Key> keys;
    for (std::size_t a = 0; a < fl.size(); ++a) {
      keys.push_back({T(a), 0, pos_T[a], {fl[a], false}});
      keys.push_back({T(a) + sol.D[fl[a]], 1, rank_D[fl[a]], {fl[a], true}});
    }
    std::sort(keys.begin(), keys.end(), [](const Key& x, const Key& y) {
      if (x.v != y.v) return x.v < y.v;
      if (x.kind != y.kind) return x.kind < y.kind;
      return x.rank < y.rank;
    });
    o.merged.emplace_back();
    for (const auto& k : keys) o.merged.back().push_back(k.e);
  }
  return o;
}

double ordering_count_log2(const Network& net, const NetIndex& ix) {
  const double ln2 = std::log(2.0);
  double bits = std::lgamma(static_cast<double>(net.flows.size()) + 1.0) / ln2;
  for (const auto& fl : ix.flows_on) {
    const double k = static_cast<double>(fl.size());
    bits += std::lgamma(2.0 * k + 1.0) / ln2 - k;
  }
  return bits;
}

NlpInstance emit_constraints(const Ordering& o, const Network& net, const NetIndex& ix) {
  NlpInstance inst;
  inst.net = &net;
  inst.ix = ix;
  inst.ordering = o;
  const Layout L = make_layout(net);
  inst.D_var = L.D;
  inst.T_var = L.T;
  inst.num_vars = L.n;
  for (std::size_t j = 0; j < net.links.size(); ++j) inst.C_var.push_back(inst.num_vars++);
  inst.deadline_rows = deadline_rows(net, L);

  for (std::size_t p = 0; p + 1 < o.d_rank.size(); ++p)
    inst.order_rows.push_back(
        difference_row({{L.D[o.d_rank[p]], 1.0}}, {{L.D[o.d_rank[p + 1]], 1.0}}));
  for (std::size_t i = 0; i < o.d_zero.size(); ++i)
    if (o.d_zero[i]) inst.order_rows.push_back({{{L.D[i], 1.0}}, lp::Sense::LE, 0.0});

  for (std::size_t j = 0; j < net.links.size(); ++j) {
    const auto& fl = ix.flows_on[j];
    const auto& mg = o.merged[j];
    for (std::size_t p = 0; p + 1 < mg.size(); ++p)
      inst.order_rows.push_back(difference_row(event_expr(L, ix, j, mg[p]), event_expr(L, ix, j, mg[p + 1])));
    double sr = 0.0;
    for (std::size_t i : fl) sr += net.flows[i].r;
    inst.stability.push_back(sr);
    const auto le = positions(fl, mg);
    for (std::size_t p = 0; p < mg.size(); ++p) {
      if (!mg[p].prime) continue;
      RatioConstraint rc{j, mg[p].flow, {}};
      for (std::size_t a = 0; a < fl.size(); ++a) {
        TermKind kind = TermKind::Zero;
        if (le.pos_P[a] <= p) kind = TermKind::Full;
        else if (le.pos_T[a] < p) kind = TermKind::Ramp;
        rc.terms.push_back({fl[a], kind});
      }
      inst.ratios.push_back(std::move(rc));
    }
  }
  return inst;
}

double NlpInstance::objective(const Solution& sol) const {
  std::vector<double> C = stability;
  auto hop = [&](std::size_t i, std::size_t j) {
    const auto& fl = ix.flows_on[j];
    return ix.hop_of[j][static_cast<std::size_t>(std::find(fl.begin(), fl.end(), i) - fl.begin())];
  };
  for (const auto& rc : ratios) {
    const double tk = sol.T_prime(rc.at_flow, hop(rc.at_flow, rc.link));
    double sum = 0.0;
    for (const auto& term : rc.terms) {
      const auto& f = net->flows[term.flow];
      const std::size_t h = hop(term.flow, rc.link);
      if (term.kind == TermKind::Full) sum += f.b + f.r * (tk - sol.T_prime(term.flow, h));
      if (term.kind == TermKind::Ramp) sum += ramp_term(f, sol.D[term.flow], sol.T[term.flow][h], tk);
    }
    if (tk <= 0.0) {
      if (sum > 0.0) return kInf;
      continue;
    }
    C[rc.link] = std::max(C[rc.link], sum / tk);
  }
  return std::accumulate(C.begin(), C.end(), 0.0);
}

std::string dump(const NlpInstance& inst) {
  const Network& net = *inst.net;
  std::ostringstream os;
  os.precision(17);
  auto name = [&](int v) -> std::string {
    for (std::size_t i = 0; i < inst.D_var.size(); ++i) {
      if (inst.D_var[i] == v) return "D[" + net.flows[i].id + "]";
      for (std::size_t h = 0; h < inst.T_var[i].size(); ++h)
        if (inst.T_var[i][h] == v) return "T[" + net.flows[i].id + "," + net.flows[i].path[h] + "]";
    }
    for (std::size_t j = 0; j < inst.C_var.size(); ++j)
      if (inst.C_var[j] == v) return "C[" + net.links[j] + "]";
    return "x" + std::to_string(v);
  };
  auto row = [&](const lp::Row& r) {
    for (std::size_t k = 0; k < r.coef.size(); ++k) {
      const double c = r.coef[k].second;
      os << (k == 0 ? (c < 0 ? "-" : "") : (c < 0 ? " - " : " + "));
      if (std::abs(c) != 1.0) os << std::abs(c) << "*";
      os << name(r.coef[k].first);
    }
    os << (r.sense == lp::Sense::LE ? " <= " : r.sense == lp::Sense::GE ? " >= " : " = ") << r.rhs << "\n";
  };
  os << "# variables (all >= 0)\n";
  for (int v = 0; v < inst.num_vars; ++v) os << "var " << name(v) << "\n";
  os << "# objective\nminimize";
  for (std::size_t j = 0; j < inst.C_var.size(); ++j) os << (j ? " + " : " ") << name(inst.C_var[j]);
  os << "\n# deadline and reprofiling caps\n";
  for (const auto& r : inst.deadline_rows) row(r);
  os << "# ordering\n";
  for (const auto& r : inst.order_rows) row(r);
  os << "# stability\n";
  for (std::size_t j = 0; j < inst.C_var.size(); ++j)
    os << name(inst.C_var[j]) << " >= " << inst.stability[j] << "\n";
  os << "# inflection points\n";
  auto tvar = [&](std::size_t i, std::size_t j) {
    const auto& p = net.flows[i].path;
    const std::size_t h = static_cast<std::size_t>(std::find(p.begin(), p.end(), net.links[j]) - p.begin());
    return name(inst.T_var[i][h]);
  };
  for (const auto& rc : inst.ratios) {
    const std::string tk = "(" + tvar(rc.at_flow, rc.link) + " + " + name(inst.D_var[rc.at_flow]) + ")";
    os << name(inst.C_var[rc.link]) << " >= (";
    bool first = true;
    for (const auto& t : rc.terms) {
      if (t.kind == TermKind::Zero) continue;
      const auto& f = net.flows[t.flow];
      os << (first ? "" : " + ");
      first = false;
      if (t.kind == TermKind::Full)
        os << f.b << " + " << f.r << "*(" << tk << " - " << tvar(t.flow, rc.link) << " - "
           << name(inst.D_var[t.flow]) << ")";
      else
        os << f.b << "/" << name(inst.D_var[t.flow]) << "*(" << tk << " - " << tvar(t.flow, rc.link)
           << ")";
    }
    os << ") / " << tk << "\n";
  }
  return os.str();
}

NlpOutcome solve_instance(const NlpInstance& inst, const NlpOptions& opt, std::uint64_t seed) {
  const Network& net = *inst.net;
  const Layout L = make_layout(net);
  NlpOutcome out;
  double scale = 0.0;
  for (const auto& f : net.flows) scale = std::max(scale, f.d);
  if (net.flows.empty()) {
    out.feasible = true;
    return out;
  }

  // Interior check: every ordering gap and every T' at least eps.
  std::vector<lp::Row> closed = inst.deadline_rows;
  closed.insert(closed.end(), inst.order_rows.begin(), inst.order_rows.end());
  {
    const int e = L.n;
    lp::Problem p;
    p.num_vars = L.n + 1;
    p.rows = inst.deadline_rows;
    for (const auto& r : inst.order_rows) {
      lp::Row g = r;
      // D pinned to zero and the T/T' pair of such a flow may tie.
      bool tie_ok = g.coef.size() == 1;
      if (g.coef.size() == 3) {
        for (const auto& c : g.coef)
          for (std::size_t i = 0; i < L.D.size(); ++i)
            if (c.first == L.D[i] && inst.ordering.d_zero[i]) tie_ok = true;
      }
      if (g.coef.size() == 2) {
        bool both_zero = true;
        for (const auto& c : g.coef) {
          bool z = false;
          for (std::size_t i = 0; i < L.D.size(); ++i) z |= c.first == L.D[i] && inst.ordering.d_zero[i];
          both_zero &= z;
        }
        tie_ok |= both_zero;
      }
      if (!tie_ok) g.coef.push_back({e, 1.0});
      p.rows.push_back(g);
    }
    for (std::size_t i = 0; i < L.D.size(); ++i)
      for (int t : L.T[i]) p.rows.push_back({{{t, -1.0}, {L.D[i], -1.0}, {e, 1.0}}, lp::Sense::LE, 0.0});
    p.rows.push_back({{{e, 1.0}}, lp::Sense::LE, scale});
    p.cost.assign(L.n + 1, 0.0);
    p.cost[e] = -1.0;
    const auto res = lp::solve(p);
    if (res.status != lp::Status::Optimal || res.x[e] <= 1e-9 * scale) return out;
    out.feasible = true;
    std::vector<double> center(res.x.begin(), res.x.begin() + L.n);

    LocalSearch ls(net, inst.ix, L, closed);
    Rng rng(seed);
    std::vector<std::vector<double>> starts;
    for (const Solution& s : {full_reprofiling(net), no_reprofiling(net)}) {
      auto x = project(closed, L.n, to_vector(L, s));
      if (!x.empty()) starts.push_back(std::move(x));
    }
    while (static_cast<int>(starts.size()) < opt.starts) {
      std::vector<double> x0(L.n, 0.0);
      for (std::size_t i = 0; i < net.flows.size(); ++i) {
        const auto& f = net.flows[i];
        const double D = rng.uniform() * f.d_hat();
        x0[L.D[i]] = D;
        std::vector<double> w(L.T[i].size());
        double tot = 0.0;
        for (auto& c : w) tot += (c = rng.uniform() + 1e-3);
        for (std::size_t h = 0; h < w.size(); ++h) x0[L.T[i][h]] = (f.d - D) * w[h] / tot;
      }
      auto x = project(closed, L.n, x0);
      if (x.empty()) x = center;
      for (int v = 0; v < L.n; ++v) x[v] = 0.5 * (x[v] + center[v]);
      starts.push_back(std::move(x));
    }

    out.W = kInf;
    for (auto& x : starts) {
      const double f = ls.run(x, opt, rng);
      if (f < out.W) {
        out.W = f;
        out.sol = to_solution(L, x);
      }
    }
  }
  if (std::isfinite(out.W)) out.W = total_bandwidth(net, out.sol);
  else out.feasible = false;
  return out;
}

NlpOutcome polish(const Network& net, const Solution& start, const NlpOptions& opt,
                  std::uint64_t seed) {
  const NetIndex ix = net.index();
  const Layout L = make_layout(net);
  LocalSearch ls(net, ix, L, deadline_rows(net, L));
  std::vector<double> x = to_vector(L, start);
  Rng rng(seed);
  NlpOutcome out;
  const double f = ls.run(x, opt, rng);
  out.feasible = std::isfinite(f);
  out.sol = to_solution(L, x);
  out.W = out.feasible ? total_bandwidth(net, out.sol) : kInf;
  return out;
}

SearchResult search(const Network& net, const SearchOptions& opt) {
  const NetIndex ix = net.index();
  int count = opt.num_orderings;
  if (count <= 0) {
    const double bits = ordering_count_log2(net, ix);
    count = std::clamp(static_cast<int>(std::ceil(bits - 1e-9)), 1, opt.max_orderings);
  }
  SearchResult best;
  best.W = kInf;
  auto consider = [&](const Ordering& o, std::uint64_t seed, int label) {
    const NlpOutcome r = solve_instance(emit_constraints(o, net, ix), opt.nlp, seed);
    ++best.orderings_tried;
    if (r.feasible) ++best.orderings_feasible;
    if (!r.feasible || !(r.W < best.W)) return false;
    best.W = r.W;
    best.sol = r.sol;
    best.best_ordering = label;
    return true;
  };
  // The orderings realized by the FR and NR points come first (labels -2, -1),
  // then the sampled ones.
  if (opt.baseline_orderings) {
    consider(ordering_of(net, ix, full_reprofiling(net)), derive_seed(opt.seed, (1u << 20) + 1), -2);
    consider(ordering_of(net, ix, no_reprofiling(net)), derive_seed(opt.seed, (1u << 20) + 2), -1);
  }
  int stale = 0;
  for (int k = 0; k < count; ++k) {
    Rng rng(derive_seed(opt.seed, 2 * static_cast<std::uint64_t>(k)));
    const Ordering o = generate_feasible_ordering(net, ix, rng);
    if (consider(o, derive_seed(opt.seed, 2 * static_cast<std::uint64_t>(k) + 1), k)) stale = 0;
    else if (++stale >= opt.patience) break;
  }
  if (!std::isfinite(best.W)) throw Infeasible("no sampled ordering admits a feasible point");
  if (opt.polish) {
    const NlpOutcome p = polish(net, best.sol, opt.nlp, derive_seed(opt.seed, 1u << 20));
    if (p.feasible && p.W < best.W) {
      best.W = p.W;
      best.sol = p.sol;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Grid oracle

namespace {

struct GridVar {
  std::size_t flow;
  int hop;  // -1 for D, otherwise the hop whose share this fraction sets
  double range;
};

Solution grid_point(const Network& net, const std::vector<GridVar>& vars, const std::vector<double>& u) {
  Solution s;
  for (const auto& f : net.flows) {
    s.D.push_back(0.0);
    s.T.emplace_back(f.path.size(), 0.0);
  }
  std::vector<std::vector<double>> frac(net.flows.size());
  for (std::size_t i = 0; i < net.flows.size(); ++i) frac[i].assign(net.flows[i].path.size(), 0.0);
  for (std::size_t k = 0; k < vars.size(); ++k) {
    if (vars[k].hop < 0) s.D[vars[k].flow] = u[k] * net.flows[vars[k].flow].d_hat();
    else frac[vars[k].flow][vars[k].hop] = u[k];
  }
  for (std::size_t i = 0; i < net.flows.size(); ++i) {
    double rest = net.flows[i].d - s.D[i];
    const std::size_t hops = net.flows[i].path.size();
    for (std::size_t h = 0; h + 1 < hops; ++h) {
      s.T[i][h] = frac[i][h] * rest;
      rest -= s.T[i][h];
    }
    s.T[i][hops - 1] = std::max(0.0, rest);
  }
  return s;
}

}  // namespace

SearchResult grid_oracle(const Network& net, const GridOptions& opt) {
  const NetIndex ix = net.index();
  std::vector<GridVar> vars;
  for (std::size_t i = 0; i < net.flows.size(); ++i) {
    const auto& f = net.flows[i];
    if (f.d_hat() > 0.0) vars.push_back({i, -1, f.d_hat()});
    for (std::size_t h = 0; h + 1 < f.path.size(); ++h) vars.push_back({i, static_cast<int>(h), f.d});
  }
  if (static_cast<int>(vars.size()) > opt.max_free_vars)
    throw InvalidInput("grid oracle limited to " + std::to_string(opt.max_free_vars) +
                       " free variables, instance has " + std::to_string(vars.size()));
  if (!(opt.step > 0.0)) throw InvalidInput("grid step must be positive");

  SearchResult best;
  best.W = kInf;
  auto consider = [&](const std::vector<double>& u) {
    Solution s = grid_point(net, vars, u);
    double W;
    try {
      W = objective_value(link_bandwidths(net, ix, s));
    } catch (const Infeasible&) {
      return kInf;
    }
    ++best.orderings_tried;
    if (W < best.W) {
      best.W = W;
      best.sol = std::move(s);
    }
    return W;
  };
  const std::size_t k = vars.size();
  if (k == 0) {
    consider({});
    if (!std::isfinite(best.W)) throw Infeasible("grid oracle found no finite point");
    return best;
  }

  // Points per axis at the requested step, in normalized coordinates.
  std::vector<double> cells(k);
  double total = 1.0;
  for (std::size_t v = 0; v < k; ++v) {
    cells[v] = std::max(1.0, std::ceil(vars[v].range / opt.step - 1e-9));
    total *= cells[v] + 1.0;
  }
  auto sweep = [&](const std::vector<double>& lo, const std::vector<double>& hi,
                   const std::vector<int>& n, std::vector<std::pair<double, std::vector<double>>>* keep,
                   std::size_t keep_n) {
    std::vector<int> idx(k, 0);
    std::vector<double> u(k);
    while (true) {
      for (std::size_t v = 0; v < k; ++v)
        u[v] = n[v] == 0 ? lo[v] : std::clamp(lo[v] + (hi[v] - lo[v]) * idx[v] / n[v], 0.0, 1.0);
      const double W = consider(u);
      if (keep && std::isfinite(W)) {
        keep->push_back({W, u});
        if (keep->size() > 4 * keep_n) {
          std::nth_element(keep->begin(), keep->begin() + static_cast<std::ptrdiff_t>(keep_n), keep->end(),
                           [](const auto& a, const auto& b) { return a.first < b.first; });
          keep->resize(keep_n);
        }
      }
      std::size_t v = 0;
      while (v < k && ++idx[v] > n[v]) idx[v++] = 0;
      if (v == k) break;
    }
  };

  if (total <= opt.exhaustive_budget) {
    std::vector<int> n(k);
    for (std::size_t v = 0; v < k; ++v) n[v] = static_cast<int>(cells[v]);
    sweep(std::vector<double>(k, 0.0), std::vector<double>(k, 1.0), n, nullptr, 0);
  } else {
    // Coarse full sweep, then repeated zooms around the best candidates until
    // the cell width reaches the requested step.
    const double shrink = std::pow(opt.exhaustive_budget / total, 1.0 / static_cast<double>(k));
    std::vector<int> n(k);
    std::vector<double> width(k);
    for (std::size_t v = 0; v < k; ++v) {
      n[v] = std::max(2, static_cast<int>(cells[v] * shrink));
      width[v] = 1.0 / n[v];
    }
    constexpr std::size_t kKeep = 16;
    std::vector<std::pair<double, std::vector<double>>> cand;
    sweep(std::vector<double>(k, 0.0), std::vector<double>(k, 1.0), n, &cand, kKeep);
    const int fine = 6;
    while (true) {
      std::sort(cand.begin(), cand.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
      if (cand.size() > kKeep) cand.resize(kKeep);
      bool done = true;
      for (std::size_t v = 0; v < k; ++v) done &= width[v] * vars[v].range <= opt.step * (1 + 1e-9);
      if (done) break;
      std::vector<std::pair<double, std::vector<double>>> next;
      std::vector<double> new_width(k);
      std::vector<int> nn(k, fine);
      for (std::size_t v = 0; v < k; ++v) new_width[v] = width[v] * 3.0 / fine;
      for (const auto& c : cand) {
        std::vector<double> lo(k), hi(k);
        for (std::size_t v = 0; v < k; ++v) {
          lo[v] = c.second[v] - 1.5 * width[v];
          hi[v] = c.second[v] + 1.5 * width[v];
        }
        sweep(lo, hi, nn, &next, kKeep);
      }
      cand = std::move(next);
      width = new_width;
    }
  }
  if (!std::isfinite(best.W)) throw Infeasible("grid oracle found no finite point");
  return best;
}

}  // namespace reprof
