#include <gtest/gtest.h>

#include <cmath>

#include "oracle.hpp"
#include "reprof/curves.hpp"
#include "reprof/errors.hpp"
#include "reprof/random.hpp"

using namespace reprof::curves;

namespace {

TwoSlopeRateLatency srl(double T, double R, double B, double r) { return {T, {R, B, r}}; }

// Concave curve through the origin as a min of token buckets; the oracle side
// evaluates the same buckets directly.
struct Buckets {
  std::vector<std::pair<double, double>> rb;
  Curve curve() const {
    Curve c = TokenBucket{rb[0].first, rb[0].second}.curve();
    for (std::size_t k = 1; k < rb.size(); ++k)
      c = pointwise_min(c, TokenBucket{rb[k].first, rb[k].second}.curve());
    return c;
  }
  double operator()(double t) const {
    double v = oracle::tb(rb[0].first, rb[0].second, t);
    for (const auto& [r, b] : rb) v = std::min(v, oracle::tb(r, b, t));
    return v;
  }
};

Buckets random_buckets(reprof::Rng& rng, int count) {
  Buckets out;
  for (int k = 0; k < count; ++k) out.rb.push_back({rng.uniform(0.5, 5.0), rng.uniform(0.0, 4.0)});
  return out;
}

}  // namespace

TEST(Evaluate, TokenBucket) {
  const Curve c = TokenBucket{1, 2}.curve();
  EXPECT_EQ(c.evaluate(0), 0.0);
  EXPECT_DOUBLE_EQ(c.evaluate(3), 5.0);
  EXPECT_DOUBLE_EQ(c.right_limit(0), 2.0);
}

TEST(Evaluate, TwoSlopeKnee) {
  const TwoSlopeReprofiler s{2, 1, 1};
  EXPECT_DOUBLE_EQ(s.knee(), 1.0);
  EXPECT_DOUBLE_EQ(s.curve().evaluate(1), 2.0);
  EXPECT_TRUE(s.curve().is_concave());
}

TEST(Evaluate, NegativeTimeRejected) {
  EXPECT_THROW(TokenBucket({1, 2}).curve().evaluate(-1.0), reprof::InvalidInput);
}

TEST(Evaluate, InvalidParameters) {
  EXPECT_THROW(check(TokenBucket{0, 1}), reprof::InvalidInput);
  EXPECT_THROW(check(TwoSlopeReprofiler{0.5, 1, 1}), reprof::InvalidInput);
  EXPECT_THROW(check(TwoSlopeReprofiler{1, 1, 1}), reprof::InvalidInput);
  EXPECT_NO_THROW(check(TwoSlopeReprofiler{1, 0, 1}));
}

TEST(Convolve, TokenBucketsArePointwiseMin) {
  const Curve c = min_plus_convolve(TokenBucket{1, 2}.curve(), TokenBucket{2, 1}.curve());
  const double h = 1e-3;
  const int n = 10000;
  const auto ref = oracle::convolve(oracle::sample([](double t) { return oracle::tb(1, 2, t); }, h, n),
                                    oracle::sample([](double t) { return oracle::tb(2, 1, t); }, h, n));
  for (int k = 0; k <= n; k += 7) EXPECT_NEAR(c.evaluate(k * h), ref[k], 1e-9) << k;
  EXPECT_DOUBLE_EQ(c.evaluate(0.5), 2.0);
  EXPECT_DOUBLE_EQ(c.evaluate(1.0), 3.0);
  EXPECT_DOUBLE_EQ(c.evaluate(4.0), 6.0);
}

TEST(Convolve, ZeroDelayIsIdentity) {
  const Curve c = TokenBucket{1, 2}.curve();
  const Curve d = min_plus_convolve(DelayElement{0.0}, c);
  for (double t : {0.0, 0.3, 1.0, 7.5}) EXPECT_EQ(d.evaluate(t), c.evaluate(t));
}

TEST(Convolve, DelayShifts) {
  const Curve d = min_plus_convolve(DelayElement{1.5}, TokenBucket{1, 2}.curve());
  EXPECT_EQ(d.evaluate(1.4), 0.0);
  EXPECT_DOUBLE_EQ(d.evaluate(1.5), 2.0);
  EXPECT_DOUBLE_EQ(d.evaluate(2.5), 3.0);
}

TEST(Concat, ClosedFormExample) {
  const auto out = min_plus_convolve(srl(1, 3, 2, 1), srl(2, 2, 3, 1));
  EXPECT_DOUBLE_EQ(out.T, 3.0);
  EXPECT_DOUBLE_EQ(out.sigma.R, 2.0);
  EXPECT_DOUBLE_EQ(out.sigma.B, 2.0);
  EXPECT_DOUBLE_EQ(out.sigma.r, 1.0);

  const double h = 1e-2;
  const int n = 1000;
  const auto ref = oracle::convolve(
      oracle::sample([](double t) { return t < 1 ? 0.0 : oracle::two_slope(3, 2, 1, t - 1); }, h, n),
      oracle::sample([](double t) { return t < 2 ? 0.0 : oracle::two_slope(2, 3, 1, t - 2); }, h, n));
  const Curve c = out.curve();
  for (int k = 0; k <= n; ++k) EXPECT_NEAR(c.evaluate(k * h), ref[k], 1e-9) << k;
}

TEST(Concat, SingleAndIdentical) {
  const auto a = srl(1, 3, 2, 1);
  const auto one = concat_2srlsc({a});
  EXPECT_EQ(one.T, a.T);
  EXPECT_EQ(one.sigma.R, a.sigma.R);
  const auto two = concat_2srlsc({a, a});
  EXPECT_DOUBLE_EQ(two.T, 2.0);
  EXPECT_EQ(two.sigma.R, 3.0);
  EXPECT_EQ(two.sigma.B, 2.0);
}

TEST(Concat, MismatchedRateRejected) {
  EXPECT_THROW(concat_2srlsc({srl(1, 3, 2, 1), srl(1, 3, 2, 2)}), reprof::InvalidInput);
  EXPECT_THROW(concat_2srlsc({}), reprof::InvalidInput);
}

TEST(Horizontal, Examples) {
  const Curve a = TokenBucket{1, 2}.curve();
  EXPECT_DOUBLE_EQ(horizontal_deviation(a, TwoSlopeReprofiler{2, 1, 1}.curve()), 1.0);
  EXPECT_EQ(horizontal_deviation(a, a), 0.0);
}

TEST(Horizontal, ShiftedTwoSlope) {
  // Oracle value first, then the closed form against the frozen number.
  const double h = 1e-4;
  const double ref = oracle::horizontal([](double t) { return oracle::tb(1, 4, t); },
                                        [](double t) { return t < 1 ? 0.0 : oracle::two_slope(4, 3, 1, t - 1); },
                                        h, 20000, 40000);
  EXPECT_NEAR(ref, 2.0, h);
  const double got = horizontal_deviation(TokenBucket{1, 4}.curve(), srl(1, 4, 3, 1).curve());
  EXPECT_NEAR(got, 2.0, 1e-12);
}

TEST(Horizontal, InfiniteWhenServiceTooSlow) {
  EXPECT_EQ(horizontal_deviation(TokenBucket{2, 1}.curve(), Curve::rate_line(1)), kInf);
}

TEST(Vertical, Examples) {
  const double ref = oracle::sup([](double t) { return oracle::tb(1, 2, t) - 2 * t; }, 1e-3, 10000);
  EXPECT_NEAR(ref, 2.0, 1e-9);
  EXPECT_NEAR(vertical_deviation(TokenBucket{1, 2}.curve(), Curve::rate_line(2)), 2.0, 1e-12);
  const Curve s = TwoSlopeReprofiler{2, 1, 1}.curve();
  EXPECT_EQ(vertical_deviation(s, s), 0.0);
  EXPECT_EQ(vertical_deviation(s, Curve::rate_line(2)), 0.0);
  EXPECT_EQ(vertical_deviation(TokenBucket{2, 1}.curve(), Curve::rate_line(1)), kInf);
}

TEST(OptimalReprofiler, Examples) {
  const auto s1 = optimal_reprofiler({1, 2}, 1);
  EXPECT_DOUBLE_EQ(s1.R, 2.0);
  EXPECT_DOUBLE_EQ(s1.B, 1.0);
  const auto s2 = optimal_reprofiler({1, 2}, 2);
  EXPECT_DOUBLE_EQ(s2.R, 1.0);
  EXPECT_DOUBLE_EQ(s2.B, 0.0);
  EXPECT_THROW(optimal_reprofiler({1, 2}, 0), reprof::InvalidInput);
  EXPECT_THROW(optimal_reprofiler({1, 2}, 2.5), reprof::InvalidInput);
}

TEST(OptimalReprofiler, TwoHopExperimentOne) {
  const TokenBucket a{98.75, 88.18};
  const auto s = optimal_reprofiler(a, 0.10);
  EXPECT_NEAR(s.R, 881.8, 1e-9);
  EXPECT_NEAR(s.B, 78.305, 1e-9);
  EXPECT_NEAR(horizontal_deviation(a.curve(), s.curve()), 0.10, 1e-12);
}

TEST(Properties, OptimalReprofilerDelayIsExact) {
  reprof::Rng rng(11);
  for (int k = 0; k < 1000; ++k) {
    const TokenBucket a{rng.uniform(0.1, 100), rng.uniform(0.1, 100)};
    const double D = rng.uniform(1e-3, 1.0) * a.b / a.r;
    EXPECT_NEAR(horizontal_deviation(a.curve(), optimal_reprofiler(a, D).curve()), D, 1e-9 * D);
  }
}

TEST(Properties, OptimalReprofilerDominates) {
  reprof::Rng rng(12);
  int checked = 0;
  for (int k = 0; k < 1000; ++k) {
    const double r = rng.uniform(0.5, 5), b = rng.uniform(0.5, 5);
    const TokenBucket a{r, b};
    // Concatenation of token buckets with rate >= r: pointwise min, plus a
    // peak-rate line so the curve starts at zero.
    Curve sigma = Curve::rate_line(r * rng.uniform(1.5, 20));
    const int count = static_cast<int>(rng.uniform_int(2, 5));
    for (int q = 0; q < count; ++q)
      sigma = pointwise_min(sigma, TokenBucket{r * rng.uniform(1.0, 4.0), rng.uniform(0.0, b)}.curve());
    const double D = horizontal_deviation(a.curve(), sigma);
    if (!(D > 0.0) || D > b / r) continue;
    ++checked;
    const Curve star = optimal_reprofiler(a, D).curve();
    for (int s = 0; s < 1000; ++s) {
      const double t = rng.uniform(0, 3 * b / r);
      ASSERT_LE(star.evaluate(t), sigma.evaluate(t) + 1e-9 * (b + r * t)) << k << " t=" << t;
    }
  }
  EXPECT_GT(checked, 900);
}

TEST(Properties, ConcatenationMatchesGridConvolution) {
  reprof::Rng rng(13);
  const double h = 1e-2;
  const int n = 1000;
  for (int k = 0; k < 40; ++k) {
    const double r = rng.uniform(0.5, 2);
    const int len = static_cast<int>(rng.uniform_int(2, 5));
    std::vector<TwoSlopeRateLatency> chain;
    std::vector<double> acc;
    for (int q = 0; q < len; ++q) {
      // Latencies on the grid keep the discrete convolution exact at grid points.
      const double T = h * static_cast<double>(rng.uniform_int(0, 60));
      const double R = r * rng.uniform(1.01, 6), B = rng.uniform(0, 3);
      chain.push_back(srl(T, R, B, r));
      auto f = oracle::sample([=](double t) { return t < T ? 0.0 : oracle::two_slope(R, B, r, t - T); }, h, n);
      acc = acc.empty() ? f : oracle::convolve(acc, f);
    }
    const Curve c = concat_2srlsc(chain).curve();
    for (int i = 0; i <= n; ++i)
      ASSERT_NEAR(c.evaluate(i * h), acc[i], 1e-6 * std::max(1.0, acc[i])) << k << " i=" << i;
  }
}

TEST(Properties, TokenBucketConvolutionIsMin) {
  reprof::Rng rng(14);
  const double h = 1e-2;
  const int n = 800;
  for (int k = 0; k < 40; ++k) {
    const int count = static_cast<int>(rng.uniform_int(2, 5));
    std::vector<TokenBucket> tbs;
    std::vector<double> acc;
    for (int q = 0; q < count; ++q) {
      const TokenBucket t{rng.uniform(0.5, 5), rng.uniform(0, 4)};
      tbs.push_back(t);
      auto f = oracle::sample([=](double x) { return oracle::tb(t.r, t.b, x); }, h, n);
      acc = acc.empty() ? f : oracle::convolve(acc, f);
    }
    Curve c = tbs[0].curve();
    for (std::size_t q = 1; q < tbs.size(); ++q) c = min_plus_convolve(c, tbs[q].curve());
    for (int i = 0; i <= n; ++i) ASSERT_NEAR(c.evaluate(i * h), acc[i], 1e-9 * std::max(1.0, acc[i]));
  }
}

TEST(Properties, ConvolutionCommutesAndAssociates) {
  reprof::Rng rng(15);
  const double h = 1e-2;
  const int n = 600;
  for (int k = 0; k < 30; ++k) {
    const Buckets f = random_buckets(rng, 3), g = random_buckets(rng, 2), q = random_buckets(rng, 4);
    const Curve fg = min_plus_convolve(f.curve(), g.curve());
    const Curve gf = min_plus_convolve(g.curve(), f.curve());
    const Curve left = min_plus_convolve(fg, q.curve());
    const Curve right = min_plus_convolve(f.curve(), min_plus_convolve(g.curve(), q.curve()));
    const auto ref = oracle::convolve(oracle::convolve(oracle::sample(f, h, n), oracle::sample(g, h, n)),
                                      oracle::sample(q, h, n));
    for (int i = 0; i <= n; ++i) {
      const double t = i * h, scale = std::max(1.0, ref[i]);
      ASSERT_NEAR(fg.evaluate(t), gf.evaluate(t), 1e-6 * scale);
      ASSERT_NEAR(left.evaluate(t), right.evaluate(t), 1e-6 * scale);
      ASSERT_NEAR(left.evaluate(t), ref[i], 1e-6 * scale);
    }
  }
}

TEST(Properties, DeviationsMatchDenseGrid) {
  reprof::Rng rng(16);
  const double h = 1e-3;
  for (int k = 0; k < 60; ++k) {
    const double r = rng.uniform(0.5, 2), b = rng.uniform(0.5, 3);
    const double T = rng.uniform(0, 1), R = r * rng.uniform(1.2, 5), B = rng.uniform(0, 3);
    const double C = R * rng.uniform(1.0, 2.0);
    const Curve a = TokenBucket{r, b}.curve();
    const Curve s = srl(T, R, B, r).curve();
    auto alpha = [=](double t) { return oracle::tb(r, b, t); };
    auto beta = [=](double t) { return t < T ? 0.0 : oracle::two_slope(R, B, r, t - T); };
    const double hd = oracle::horizontal(alpha, beta, h, 6000, 20000);
    EXPECT_NEAR(horizontal_deviation(a, s), hd, h + 1e-9) << k;
    auto gap = [=](double t) { return oracle::two_slope(R, B, r, t) - C * t; };
    const double vd = oracle::sup(gap, h, 6000);
    EXPECT_NEAR(vertical_deviation(TwoSlopeReprofiler{R, B, r}.curve(), Curve::rate_line(C)), vd,
                C * h + 1e-9);
    const double vd2 = oracle::sup([=](double t) { return alpha(t) - beta(t) - r * 2 * t; }, h, 6000);
    EXPECT_NEAR(vertical_deviation(a, pointwise_sum(s, Curve::rate_line(2 * r))), vd2, 4 * R * h + 1e-9);
  }
}

TEST(PseudoInverse, Basic) {
  const Curve s = TwoSlopeReprofiler{2, 1, 1}.curve();
  EXPECT_DOUBLE_EQ(pseudo_inverse(s, 1.0), 0.5);
  EXPECT_DOUBLE_EQ(pseudo_inverse(s, 3.0), 2.0);
  EXPECT_EQ(pseudo_inverse(TokenBucket{1, 2}.curve(), 1.0), 0.0);
}
