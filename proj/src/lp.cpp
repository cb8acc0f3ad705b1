#include "reprof/lp.hpp"

#include <cmath>
#include <limits>

#include "reprof/errors.hpp"

namespace reprof::lp {

namespace {

constexpr double kEps = 1e-10;

class Tableau {
 public:
  Tableau(int rows, int cols) : m_(rows), n_(cols), a_((rows + 1) * (cols + 1), 0.0), basis_(rows) {}

  double& at(int r, int c) { return a_[r * (n_ + 1) + c]; }
  double& rhs(int r) { return at(r, n_); }
  double& obj(int c) { return at(m_, c); }

  void pivot(int pr, int pc) {
    const double inv = 1.0 / at(pr, pc);
    for (int c = 0; c <= n_; ++c) at(pr, c) *= inv;
    for (int r = 0; r <= m_; ++r) {
      if (r == pr) continue;
      const double f = at(r, pc);
      if (f == 0.0) continue;
      for (int c = 0; c <= n_; ++c) at(r, c) -= f * at(pr, c);
      at(r, pc) = 0.0;
    }
    basis_[pr] = pc;
  }

  // Returns false when unbounded. Columns >= allowed never enter.
  bool optimize(int allowed) {
    for (int iter = 0; iter < 100000; ++iter) {
      int pc = -1;
      for (int c = 0; c < allowed; ++c)
        if (obj(c) < -kEps) {
          pc = c;
          break;
        }
      if (pc < 0) return true;
      int pr = -1;
      double best = std::numeric_limits<double>::infinity();
      for (int r = 0; r < m_; ++r) {
        if (at(r, pc) <= kEps) continue;
        const double ratio = rhs(r) / at(r, pc);
        if (ratio < best - kEps || (ratio <= best + kEps && pr >= 0 && basis_[r] < basis_[pr])) {
          best = ratio;
          pr = r;
        }
      }
      if (pr < 0) return false;
      pivot(pr, pc);
    }
    throw Infeasible("simplex iteration limit reached");
  }

  int m_, n_;
  std::vector<double> a_;
  std::vector<int> basis_;
};

}  // namespace

Result solve(const Problem& p) {
  const int m = static_cast<int>(p.rows.size());
  const int n = p.num_vars;
  int extra = 0, arts = 0;
  for (const auto& row : p.rows) {
    Sense s = row.sense;
    if (row.rhs < 0.0 && s != Sense::EQ) s = s == Sense::LE ? Sense::GE : Sense::LE;
    if (s != Sense::EQ) ++extra;
    if (s != Sense::LE) ++arts;
  }
  const int art0 = n + extra;
  Tableau tb(m, art0 + arts);
  int slack = n, art = art0;
  for (int r = 0; r < m; ++r) {
    const auto& row = p.rows[r];
    const double sign = row.rhs < 0.0 ? -1.0 : 1.0;
    Sense s = row.sense;
    if (sign < 0.0 && s != Sense::EQ) s = s == Sense::LE ? Sense::GE : Sense::LE;
    for (const auto& [v, c] : row.coef) tb.at(r, v) += sign * c;
    tb.rhs(r) = sign * row.rhs;
    if (s == Sense::LE) {
      tb.at(r, slack) = 1.0;
      tb.basis_[r] = slack++;
    } else {
      if (s == Sense::GE) tb.at(r, slack++) = -1.0;
      tb.at(r, art) = 1.0;
      tb.basis_[r] = art++;
    }
  }

  // Phase 1: minimize the sum of artificials.
  for (int r = 0; r < m; ++r) {
    if (tb.basis_[r] < art0) continue;
    for (int c = 0; c <= tb.n_; ++c) tb.obj(c) -= tb.at(r, c);
    tb.obj(tb.basis_[r]) = 0.0;
  }
  tb.optimize(tb.n_);
  Result res;
  if (-tb.obj(tb.n_) > 1e-8) return res;
  for (int r = 0; r < m; ++r) {
    if (tb.basis_[r] < art0) continue;
    for (int c = 0; c < art0; ++c)
      if (std::abs(tb.at(r, c)) > kEps) {
        tb.pivot(r, c);
        break;
      }
  }

  // Phase 2.
  for (int c = 0; c <= tb.n_; ++c) tb.obj(c) = 0.0;
  for (int v = 0; v < n && v < static_cast<int>(p.cost.size()); ++v) tb.obj(v) = p.cost[v];
  for (int r = 0; r < m; ++r) {
    const int bc = tb.basis_[r];
    const double f = tb.obj(bc);
    if (f == 0.0) continue;
    for (int c = 0; c <= tb.n_; ++c) tb.obj(c) -= f * tb.at(r, c);
  }
  if (!tb.optimize(art0)) {
    res.status = Status::Unbounded;
    return res;
  }
  res.status = Status::Optimal;
  res.x.assign(n, 0.0);
  for (int r = 0; r < m; ++r)
    if (tb.basis_[r] < n) res.x[tb.basis_[r]] = std::max(0.0, tb.rhs(r));
  res.value = 0.0;
  for (int v = 0; v < n && v < static_cast<int>(p.cost.size()); ++v) res.value += p.cost[v] * res.x[v];
  return res;
}

}  // namespace reprof::lp
