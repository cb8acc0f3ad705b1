#pragma once

#include <limits>
#include <vector>

namespace reprof::curves {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Breakpoint {
  double t;      // time
  double v;      // value at t, jump at t included
  double slope;  // rate until the next breakpoint
};

// Nondecreasing piecewise-linear function on t >= 0.
// f(0) = 0 always; origin_jump is the right limit f(0+). Evaluation is
// right-continuous elsewhere, and the last segment extends to infinity.
class Curve {
 public:
  Curve();  // the zero curve
  explicit Curve(std::vector<Breakpoint> pts, double origin_jump = 0.0);

  static Curve rate_line(double rate);

  double evaluate(double t) const;
  double left_limit(double t) const;  // f(t-); 0 at t = 0
  double right_limit(double t) const;  // f(t+)

  const std::vector<Breakpoint>& breakpoints() const { return pts_; }
  double origin_jump() const { return jump0_; }
  double final_slope() const { return pts_.back().slope; }

  // Concave on (0, inf): no jumps after the origin, slopes nonincreasing.
  bool is_concave() const;

  // Time shift by T >= 0: zero on [0, T), then f(t - T) with f(0+) at T.
  Curve shifted(double T) const;

  // Right-continuous value at breakpoint k (the origin jump counts at k = 0).
  double right_value(std::size_t k) const;

 private:
  std::vector<Breakpoint> pts_;
  double jump0_ = 0.0;
  std::size_t segment(double t) const;  // last k with t_k <= t
};

struct TokenBucket {
  double r;
  double b;
  Curve curve() const;
};

// sigma = (R, B, r): min(R t, B + r t).
struct TwoSlopeReprofiler {
  double R;
  double B;
  double r;
  double knee() const;
  Curve curve() const;
};

// beta = delta_T (x) sigma.
struct TwoSlopeRateLatency {
  double T;
  TwoSlopeReprofiler sigma;
  double T_prime() const { return T + sigma.knee(); }
  Curve curve() const;
};

struct DelayElement {
  double T;
};

struct GridOptions {
  double horizon = 0.0;  // 0 selects 4x the largest breakpoint time
  int samples = 10000;
};

void check(const TokenBucket& tb);
void check(const TwoSlopeReprofiler& s);

Curve pointwise_min(const Curve& f, const Curve& g);
Curve pointwise_sum(const Curve& f, const Curve& g);

// Exact for shifted-concave operands (zero up to a latency, concave after);
// otherwise falls back to grid_convolve.
Curve min_plus_convolve(const Curve& f, const Curve& g, const GridOptions& opt = {});
Curve min_plus_convolve(const DelayElement& d, const Curve& c);
TwoSlopeRateLatency min_plus_convolve(const TwoSlopeRateLatency& a,
                                      const TwoSlopeRateLatency& b);
Curve grid_convolve(const Curve& f, const Curve& g, const GridOptions& opt = {});

TwoSlopeRateLatency concat_2srlsc(const std::vector<TwoSlopeRateLatency>& list);

// Delay bound; kInf when beta never catches up with alpha.
double horizontal_deviation(const Curve& alpha, const Curve& beta);
// Backlog bound; kInf when alpha outgrows beta.
double vertical_deviation(const Curve& alpha, const Curve& beta);

// inf { s >= 0 : f(s) >= y }, kInf if never reached.
double pseudo_inverse(const Curve& f, double y);

// Smallest two-slope curve delaying alpha by exactly D, for D in (0, b/r].
TwoSlopeReprofiler optimal_reprofiler(const TokenBucket& alpha, double D);

}  // namespace reprof::curves
