#include "reprof/curves.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "reprof/errors.hpp"

namespace reprof::curves {

namespace {

constexpr double kTol = 1e-9;

bool near(double a, double b) {
  return std::abs(a - b) <= kTol * std::max({1.0, std::abs(a), std::abs(b)});
}

std::vector<double> merged_times(const Curve& f, const Curve& g) {
  std::vector<double> ts;
  for (const auto& p : f.breakpoints()) ts.push_back(p.t);
  for (const auto& p : g.breakpoints()) ts.push_back(p.t);
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  return ts;
}

double slope_at(const Curve& c, double t) {
  const auto& pts = c.breakpoints();
  auto it = std::upper_bound(pts.begin(), pts.end(), t,
                             [](double x, const Breakpoint& p) { return x < p.t; });
  return std::prev(it)->slope;
}

// Assemble (t, right value, slope) triples into a Curve; the first triple
// must sit at t = 0 and its value becomes the origin jump.
Curve assemble(std::vector<Breakpoint> raw) {
  const double jump0 = raw.front().v;
  raw.front().v = 0.0;
  return Curve(std::move(raw), jump0);
}

// Zero on [0, L), concave afterwards: returns false when c has another shape.
bool split_latency(const Curve& c, double& latency, Curve& tail) {
  const auto& pts = c.breakpoints();
  if (c.origin_jump() > 0.0 || pts[0].slope > 0.0) {
    latency = 0.0;
    tail = c;
    return c.is_concave();
  }
  if (pts.size() == 1) return false;  // zero curve, handled by caller
  latency = pts[1].t;
  std::vector<Breakpoint> rest;
  for (std::size_t k = 1; k < pts.size(); ++k)
    rest.push_back({pts[k].t - latency, pts[k].v, pts[k].slope});
  tail = assemble(std::move(rest));
  return tail.is_concave();
}

bool is_zero(const Curve& c) {
  return c.breakpoints().size() == 1 && c.origin_jump() == 0.0 && c.final_slope() == 0.0;
}

}  // namespace

Curve::Curve() : pts_{{0.0, 0.0, 0.0}} {}

Curve::Curve(std::vector<Breakpoint> pts, double origin_jump)
    : pts_(std::move(pts)), jump0_(origin_jump) {
  if (pts_.empty()) throw InvalidInput("curve needs at least one breakpoint");
  if (pts_[0].t != 0.0 || pts_[0].v != 0.0)
    throw InvalidInput("curve must start at (0, 0)");
  if (!(jump0_ >= 0.0)) throw InvalidInput("negative origin jump");
  for (std::size_t k = 0; k < pts_.size(); ++k) {
    if (!(pts_[k].slope >= 0.0) || !std::isfinite(pts_[k].slope))
      throw InvalidInput("curve slopes must be finite and nonnegative");
    if (k == 0) continue;
    if (!(pts_[k].t > pts_[k - 1].t)) throw InvalidInput("breakpoint times must increase");
    const double left = right_value(k - 1) + pts_[k - 1].slope * (pts_[k].t - pts_[k - 1].t);
    if (pts_[k].v < left) {
      if (!near(pts_[k].v, left)) throw InvalidInput("curve must be nondecreasing");
      pts_[k].v = left;
    }
  }
  // Drop breakpoints that neither jump nor bend.
  std::vector<Breakpoint> kept{pts_[0]};
  for (std::size_t k = 1; k < pts_.size(); ++k) {
    const Breakpoint& prev = kept.back();
    const double prev_val = kept.size() == 1 ? jump0_ : prev.v;
    const double left = prev_val + prev.slope * (pts_[k].t - prev.t);
    if (near(pts_[k].v, left) && near(pts_[k].slope, prev.slope)) continue;
    kept.push_back(pts_[k]);
  }
  pts_ = std::move(kept);
}

Curve Curve::rate_line(double rate) { return Curve({{0.0, 0.0, rate}}); }

std::size_t Curve::segment(double t) const {
  auto it = std::upper_bound(pts_.begin(), pts_.end(), t,
                             [](double x, const Breakpoint& p) { return x < p.t; });
  return static_cast<std::size_t>(it - pts_.begin()) - 1;
}

double Curve::right_value(std::size_t k) const { return k == 0 ? jump0_ : pts_[k].v; }

double Curve::evaluate(double t) const {
  if (t < 0.0) throw InvalidInput("curve evaluated at negative time");
  if (t == 0.0) return 0.0;
  if (std::isinf(t)) return final_slope() > 0.0 ? kInf : right_value(pts_.size() - 1);
  const std::size_t k = segment(t);
  return right_value(k) + pts_[k].slope * (t - pts_[k].t);
}

double Curve::left_limit(double t) const {
  if (t < 0.0) throw InvalidInput("curve evaluated at negative time");
  if (t == 0.0) return 0.0;
  auto it = std::lower_bound(pts_.begin(), pts_.end(), t,
                             [](const Breakpoint& p, double x) { return p.t < x; });
  const std::size_t k = static_cast<std::size_t>(it - pts_.begin()) - 1;
  return right_value(k) + pts_[k].slope * (t - pts_[k].t);
}

double Curve::right_limit(double t) const { return t == 0.0 ? jump0_ : evaluate(t); }

bool Curve::is_concave() const {
  for (std::size_t k = 1; k < pts_.size(); ++k) {
    const double left = right_value(k - 1) + pts_[k - 1].slope * (pts_[k].t - pts_[k - 1].t);
    if (!near(pts_[k].v, left)) return false;
    if (pts_[k].slope > pts_[k - 1].slope + kTol * std::max(1.0, pts_[k - 1].slope))
      return false;
  }
  return true;
}

Curve Curve::shifted(double T) const {
  if (T < 0.0) throw InvalidInput("negative shift");
  if (T == 0.0) return *this;
  std::vector<Breakpoint> out{{0.0, 0.0, 0.0}, {T, jump0_, pts_[0].slope}};
  for (std::size_t k = 1; k < pts_.size(); ++k)
    out.push_back({pts_[k].t + T, pts_[k].v, pts_[k].slope});
  return Curve(std::move(out), 0.0);
}

void check(const TokenBucket& tb) {
  if (!(tb.r > 0.0)) throw InvalidInput("token bucket rate must be positive");
  if (!(tb.b >= 0.0)) throw InvalidInput("token bucket burst must be nonnegative");
}

void check(const TwoSlopeReprofiler& s) {
  if (!(s.r > 0.0)) throw InvalidInput("reprofiler long-term rate must be positive");
  if (!(s.R >= s.r) && !near(s.R, s.r)) throw InvalidInput("reprofiler needs R >= r");
  if (!(s.B >= 0.0)) throw InvalidInput("reprofiler offset must be nonnegative");
  if (near(s.R, s.r) && !near(s.B, 0.0)) throw InvalidInput("R = r requires B = 0");
}

Curve TokenBucket::curve() const {
  check(*this);
  return Curve({{0.0, 0.0, r}}, b);
}

double TwoSlopeReprofiler::knee() const {
  if (R <= r || B <= 0.0) return 0.0;
  return B / (R - r);
}

Curve TwoSlopeReprofiler::curve() const {
  check(*this);
  const double tk = knee();
  if (tk <= 0.0) return Curve::rate_line(r);
  return Curve({{0.0, 0.0, R}, {tk, R * tk, r}});
}

Curve TwoSlopeRateLatency::curve() const {
  if (T < 0.0) throw InvalidInput("negative local deadline");
  return sigma.curve().shifted(T);
}

Curve pointwise_min(const Curve& f, const Curve& g) {
  const std::vector<double> ts = merged_times(f, g);
  std::vector<Breakpoint> raw;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double ta = ts[i];
    const double tb = i + 1 < ts.size() ? ts[i + 1] : kInf;
    const double fa = f.right_limit(ta), ga = g.right_limit(ta);
    const double fs = slope_at(f, ta), gs = slope_at(g, ta);
    const bool f_low = fa < ga || (fa == ga && fs <= gs);
    raw.push_back({ta, std::min(fa, ga), f_low ? fs : gs});
    if (fs == gs) continue;
    const double tc = ta + (ga - fa) / (fs - gs);
    if (tc > ta && tc < tb && !near(tc, ta) && !(std::isfinite(tb) && near(tc, tb)))
      raw.push_back({tc, fa + fs * (tc - ta), f_low ? gs : fs});
  }
  return assemble(std::move(raw));
}

Curve pointwise_sum(const Curve& f, const Curve& g) {
  std::vector<Breakpoint> raw;
  for (double t : merged_times(f, g))
    raw.push_back({t, f.right_limit(t) + g.right_limit(t), slope_at(f, t) + slope_at(g, t)});
  return assemble(std::move(raw));
}

Curve min_plus_convolve(const Curve& f, const Curve& g, const GridOptions& opt) {
  if (is_zero(f) || is_zero(g)) return Curve();
  double lf = 0, lg = 0;
  Curve tf, tg;
  if (split_latency(f, lf, tf) && split_latency(g, lg, tg))
    return pointwise_min(tf, tg).shifted(lf + lg);
  return grid_convolve(f, g, opt);
}

Curve min_plus_convolve(const DelayElement& d, const Curve& c) { return c.shifted(d.T); }

TwoSlopeRateLatency min_plus_convolve(const TwoSlopeRateLatency& a,
                                      const TwoSlopeRateLatency& b) {
  return concat_2srlsc({a, b});
}

Curve grid_convolve(const Curve& f, const Curve& g, const GridOptions& opt) {
  double horizon = opt.horizon;
  if (horizon <= 0.0) {
    const double last = std::max(f.breakpoints().back().t, g.breakpoints().back().t);
    horizon = last > 0.0 ? 4.0 * last : 1.0;
  }
  const int n = std::max(opt.samples, 2);
  const double h = horizon / n;
  std::vector<double> fv(n + 1), gv(n + 1), y(n + 1);
  for (int i = 0; i <= n; ++i) {
    fv[i] = f.evaluate(i * h);
    gv[i] = g.evaluate(i * h);
  }
  for (int i = 0; i <= n; ++i) {
    double best = kInf;
    for (int j = 0; j <= i; ++j) best = std::min(best, fv[j] + gv[i - j]);
    y[i] = best;
  }
  const double jump0 = std::min(f.origin_jump(), g.origin_jump());
  std::vector<Breakpoint> raw{{0.0, jump0, std::max(0.0, (y[1] - jump0) / h)}};
  for (int i = 1; i < n; ++i) raw.push_back({i * h, y[i], std::max(0.0, (y[i + 1] - y[i]) / h)});
  raw.push_back({n * h, y[n], std::min(f.final_slope(), g.final_slope())});
  return assemble(std::move(raw));
}

TwoSlopeRateLatency concat_2srlsc(const std::vector<TwoSlopeRateLatency>& list) {
  if (list.empty()) throw InvalidInput("concatenation of an empty list");
  TwoSlopeRateLatency out = list.front();
  check(out.sigma);
  for (std::size_t k = 1; k < list.size(); ++k) {
    const auto& e = list[k];
    check(e.sigma);
    if (!near(e.sigma.r, out.sigma.r))
      throw InvalidInput("concatenated service curves must share the long-term rate");
    out.T += e.T;
    out.sigma.R = std::min(out.sigma.R, e.sigma.R);
    out.sigma.B = std::min(out.sigma.B, e.sigma.B);
  }
  return out;
}

double pseudo_inverse(const Curve& f, double y) {
  if (y <= 0.0) return 0.0;
  const auto& pts = f.breakpoints();
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const double rv = f.right_value(k);
    if (rv >= y) return pts[k].t;
    const double end = k + 1 < pts.size() ? pts[k + 1].t : kInf;
    if (pts[k].slope > 0.0) {
      const double t = pts[k].t + (y - rv) / pts[k].slope;
      if (t < end) return t;
    }
  }
  return kInf;
}

double horizontal_deviation(const Curve& alpha, const Curve& beta) {
  if (alpha.final_slope() > beta.final_slope() &&
      !near(alpha.final_slope(), beta.final_slope()))
    return kInf;

  // Between consecutive candidates alpha is affine and stays between two
  // consecutive levels of beta, so the lag below is affine there too.
  std::vector<double> cand{0.0};
  for (std::size_t k = 1; k < alpha.breakpoints().size(); ++k)
    cand.push_back(alpha.breakpoints()[k].t);
  const auto& bp = beta.breakpoints();
  for (std::size_t k = 0; k < bp.size(); ++k) {
    for (double level : {beta.right_value(k), k > 0 ? beta.left_limit(bp[k].t) : 0.0}) {
      const double t = pseudo_inverse(alpha, level);
      if (level > 0.0 && std::isfinite(t)) cand.push_back(t);
    }
  }
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());

  auto lag = [&](double t) {
    if (t == 0.0) return 0.0;
    const double s = pseudo_inverse(beta, alpha.evaluate(t));
    return std::isinf(s) ? kInf : s - t;
  };

  double sup = 0.0;
  auto piece = [&](double a, double b) {
    const double p = a + (b - a) / 3.0, q = a + 2.0 * (b - a) / 3.0;
    const double gp = lag(p), gq = lag(q);
    if (std::isinf(gp) || std::isinf(gq)) return false;
    const double slope = (gq - gp) / (q - p);
    sup = std::max({sup, gp - slope * (p - a), gq + slope * (b - q)});
    return true;
  };
  for (std::size_t i = 0; i < cand.size(); ++i) {
    const double g = lag(cand[i]);
    if (std::isinf(g)) return kInf;
    sup = std::max(sup, g);
    if (i + 1 < cand.size() && !piece(cand[i], cand[i + 1])) return kInf;
  }
  // Tail: alpha above every beta level, slope difference already checked.
  const double last = cand.back();
  const double w = std::max(1.0, last);
  const double p = last + w, q = last + 2.0 * w;
  const double gp = lag(p), gq = lag(q);
  if (std::isinf(gp) || std::isinf(gq)) return kInf;
  const double slope = (gq - gp) / (q - p);
  if (slope > kTol) return kInf;
  sup = std::max(sup, gp - slope * (p - last));
  return sup;
}

double vertical_deviation(const Curve& alpha, const Curve& beta) {
  if (alpha.final_slope() > beta.final_slope() &&
      !near(alpha.final_slope(), beta.final_slope()))
    return kInf;
  double sup = 0.0;
  for (double t : merged_times(alpha, beta)) {
    sup = std::max(sup, alpha.right_limit(t) - beta.right_limit(t));
    if (t > 0.0) sup = std::max(sup, alpha.left_limit(t) - beta.left_limit(t));
  }
  return sup;
}

TwoSlopeReprofiler optimal_reprofiler(const TokenBucket& alpha, double D) {
  check(alpha);
  if (!(D > 0.0))
    throw InvalidInput("reprofiling delay must be positive; D = 0 means no reprofiler");
  const double cap = alpha.b / alpha.r;
  if (D > cap && !near(D, cap))
    throw InvalidInput("reprofiling delay " + std::to_string(D) + " exceeds b/r");
  if (D >= cap) return {alpha.r, 0.0, alpha.r};
  return {alpha.b / D, std::max(0.0, alpha.b - alpha.r * D), alpha.r};
}

}  // namespace reprof::curves
