#include <cmath>
#include <limits>

#include "helpers.hpp"
#include "scatterlab/random_fields.hpp"
#include "scatterlab/regularity.hpp"

using namespace scatterlab;
using namespace scatterlab::regularity;

namespace {

FieldSample from_function(const Grid& g, double (*f)(const Point&)) {
  FieldSample out(g, FieldShape::scalar(g.dim()), true);
  for (std::size_t i = 0; i < g.size(); ++i) out.at(i) = f(g.node(i));
  return out;
}

RegularityEstimate with(double sobolev, double r2) {
  RegularityEstimate e;
  e.sobolev_sup_hat = sobolev;
  e.r_squared = r2;
  return e;
}

}  // namespace

TEST(Window, AdmissibleExamples) {
  const auto w2 = admissible_window(2, 1.5);
  EXPECT_DOUBLE_EQ(w2.q_hi, 4.0);
  EXPECT_TRUE(w2.q_admissible(3.0));
  EXPECT_FALSE(w2.q_admissible(4.0));
  EXPECT_FALSE(w2.q_admissible(2.0));
  const auto g3 = w2.gamma_interval(3.0);
  EXPECT_DOUBLE_EQ(g3.first, 0.25);
  EXPECT_NEAR(g3.second, 1.0 / 3.0, 1e-15);

  const auto wi = admissible_window(2, 2.0);
  EXPECT_EQ(wi.q_hi, std::numeric_limits<double>::infinity());
  EXPECT_TRUE(wi.q_admissible(1e6));

  const auto w3 = admissible_window(3, 3.0);
  EXPECT_DOUBLE_EQ(w3.q_hi, 6.0);
  const auto g4 = w3.gamma_interval(4.0);
  EXPECT_DOUBLE_EQ(g4.first, 0.0);
  EXPECT_DOUBLE_EQ(g4.second, 0.125);

  test::expect_error(ErrorKind::OrderOutOfWindow, [] { admissible_window(2, 1.0); });
  test::expect_error(ErrorKind::OrderOutOfWindow, [] { admissible_window(3, 3.5); });
}

TEST(Verdicts, Examples) {
  const auto w = admissible_window(2, 1.5);
  EXPECT_EQ(consistency_check(with(0.6, 0.99), w, 0.1), Verdict::Consistent);
  EXPECT_EQ(consistency_check(with(0.05, 0.99), w, 0.1), Verdict::Inconsistent);
  EXPECT_EQ(consistency_check(with(0.6, 0.5), w, 0.1), Verdict::Inconclusive);
  EXPECT_EQ(to_string(Verdict::Consistent), "consistent");
}

TEST(Verdicts, MonotoneInEstimateAndMargin) {
  const auto w = admissible_window(2, 1.5);
  bool seen_consistent = false;
  for (double s = -0.5; s <= 1.0; s += 0.01) {
    const bool c = consistency_check(with(s, 0.95), w, 0.1) == Verdict::Consistent;
    EXPECT_TRUE(c || !seen_consistent) << s;
    seen_consistent |= c;
    if (c) EXPECT_EQ(consistency_check(with(s, 0.95), w, 0.2), Verdict::Consistent);
  }
  EXPECT_TRUE(seen_consistent);
}

TEST(StructureFunction, LinearFieldHasExponentOne) {
  const Grid g = test::square_grid(256);
  const FieldSample u = from_function(g, [](const Point& x) { return x[0]; });
  const auto fit = structure_function_exponent(u, default_lags(g));
  EXPECT_NEAR(fit.exponent, 1.0, 0.05);
}

TEST(StructureFunction, LagLadder) {
  const auto lags = default_lags(test::square_grid(512));
  EXPECT_EQ(lags.front(), 2u);
  EXPECT_EQ(lags.back(), 64u);
  for (std::size_t i = 1; i < lags.size(); ++i) EXPECT_GT(lags[i], lags[i - 1]);
  const Grid g = test::square_grid(64);
  const FieldSample u = from_function(g, [](const Point& x) { return x[0]; });
  const std::vector<std::size_t> one{4};
  test::expect_error(ErrorKind::BandTooNarrow, [&] { structure_function_exponent(u, one); });
  const std::vector<std::size_t> wide{2, 32};
  test::expect_error(ErrorKind::BandTooNarrow, [&] { structure_function_exponent(u, wide); });
}

TEST(Spectral, WhiteNoiseIsFlat) {
  const Grid g = test::square_grid(256);
  const FieldSample w = fields::sample_white_noise(g, {11, 0});
  EXPECT_NEAR(spectral_slope(w).slope, 0.0, 0.1);
}

TEST(Spectral, SmoothBumpDecaysFast) {
  const Grid g = test::square_grid(256);
  const FieldSample u = from_function(g, [](const Point& x) {
    return fields::bump_profile(((x[0] - 0.5) * (x[0] - 0.5) + (x[1] - 0.5) * (x[1] - 0.5)) / 0.09);
  });
  EXPECT_LT(spectral_slope(u).slope, -6.0);
}

TEST(Spectral, FgfSlopeMatchesOrder) {
  const Grid g = test::square_grid(256);
  for (double m : {1.0, 2.0, 3.0}) {
    const FieldSample h = fields::sample_fgf(m, g, {21, static_cast<std::uint64_t>(m)});
    EXPECT_NEAR(spectral_slope(h).slope, -m, 0.3) << m;
  }
}

TEST(Spectral, BandChecks) {
  const Grid g = test::square_grid(64);
  const auto band = default_spectral_band(g);
  EXPECT_DOUBLE_EQ(band.lo, 4.0);
  EXPECT_DOUBLE_EQ(band.hi, 8.0);
  const FieldSample w = fields::sample_white_noise(g, {1, 0});
  test::expect_error(ErrorKind::BandTooNarrow, [&] { spectral_slope(w, {}, FitBand{4.0, 5.0}); });
  test::expect_error(ErrorKind::BandTooNarrow, [&] { spectral_slope(w, {}, FitBand{2.0, 8.0}); });
  test::expect_error(ErrorKind::BandTooNarrow, [&] { spectral_slope(w, {}, FitBand{4.0, 20.0}); });
}

TEST(Taper, ExcludesBallAroundPoint) {
  const Grid g = test::square_grid(128);
  const Point y{0.5, 0.5, 0.0};
  const Taper t = Taper::around_point_source(g, y);
  EXPECT_DOUBLE_EQ(t.exclude_radius, 8.0 * g.min_spacing());
  EXPECT_EQ(t(g, Point{0.5 + 4.0 * g.min_spacing(), 0.5, 0.0}), 0.0);
  EXPECT_GT(t(g, Point{0.5 + 20.0 * g.min_spacing(), 0.5, 0.0}), 0.0);
  EXPECT_EQ(Taper::none()(g, y), 1.0);
}

TEST(Estimate, ReportsSobolevAndHolder) {
  const Grid g = test::square_grid(256);
  const FieldSample h = fields::sample_fgf(3.0, g, {4, 4});
  const auto e = estimate(h);
  EXPECT_NEAR(e.spectral_order_hat, 3.0, 0.3);
  EXPECT_NEAR(e.sobolev_sup_hat, (e.spectral_order_hat - 2.0) / 2.0, 1e-12);
  EXPECT_NEAR(e.holder_hat, 0.5, 0.1);
}
