#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "scatterlab/random_fields.hpp"

using namespace scatterlab;
using namespace scatterlab::fields;

namespace {

StrengthFunction centered(double amplitude = 1.0) { return {Box::cube(2, 0.25, 0.75), amplitude}; }

RandomFieldSpec scalar_spec(double order) { return {order, FieldKind::Scalar, 2, {centered()}}; }

}  // namespace

TEST(Bump, Profile) {
  EXPECT_DOUBLE_EQ(bump_profile(0.0), 1.0);
  EXPECT_NEAR(bump_profile(0.5), std::exp(-1.0), 1e-15);
  EXPECT_EQ(bump_profile(1.0), 0.0);
  EXPECT_EQ(bump_profile(2.0), 0.0);
  const StrengthFunction s = centered(2.0);
  EXPECT_DOUBLE_EQ(s(Point{0.5, 0.5, 0.0}), 2.0);
  EXPECT_EQ(s(Point{0.75, 0.5, 0.0}), 0.0);
  EXPECT_DOUBLE_EQ(s.rescaled_radius2(Point{0.625, 0.5, 0.0}), 0.25);
}

TEST(WhiteNoise, VarianceIsInverseCellVolume) {
  const Grid g = test::square_grid(128);
  const FieldSample w = sample_white_noise(g, {3, 0});
  double s = 0.0, s2 = 0.0;
  for (const cplx& v : w.values()) {
    EXPECT_EQ(v.imag(), 0.0);
    s += v.real();
    s2 += v.real() * v.real();
  }
  const double n = static_cast<double>(g.size());
  EXPECT_NEAR(s / n * std::sqrt(g.cell_volume()), 0.0, 0.02);
  EXPECT_NEAR(s2 / n * g.cell_volume(), 1.0, 0.03);
}

TEST(Sampling, DeterministicPerSeed) {
  const Grid g = test::square_grid(32);
  const FieldSample a = sample_medium(scalar_spec(1.5), g, {9, 4});
  const FieldSample b = sample_medium(scalar_spec(1.5), g, {9, 4});
  const FieldSample c = sample_medium(scalar_spec(1.5), g, {9, 5});
  EXPECT_TRUE(std::equal(a.values().begin(), a.values().end(), b.values().begin()));
  EXPECT_FALSE(std::equal(a.values().begin(), a.values().end(), c.values().begin()));
  EXPECT_TRUE(a.meta().stochastic);
  EXPECT_EQ(a.meta().seed, (SeedSpec{9, 4}));
}

TEST(Sampling, LocalizedToSupport) {
  const Grid g = test::square_grid(32);
  const FieldSample f = sample_medium(scalar_spec(1.5), g, {1, 0});
  const StrengthFunction s = centered();
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (s(g.node(i)) == 0.0) EXPECT_EQ(f.at(i), cplx{});
  }
  EXPECT_GT(max_abs(f.values()), 0.0);
}

TEST(Sampling, MatrixComponentsAreIndependentDraws) {
  const Grid g = test::square_grid(16);
  const RandomFieldSpec spec{1.5, FieldKind::Matrix, 2, {centered()}};
  const FieldSample m = sample_medium(spec, g, {2, 0});
  EXPECT_EQ(m.components(), 4);
  const std::size_t mid = g.ravel({8, 8, 0});
  for (int a = 0; a < 4; ++a) {
    for (int b = a + 1; b < 4; ++b) EXPECT_NE(m.at(mid, a), m.at(mid, b));
  }
}

TEST(Sampling, FgfCovarianceDecaysWithDistance) {
  // Order 1 in 2D: covariance behaves like -log|x - y| near the diagonal.
  const Grid g = test::square_grid(32);
  std::vector<FieldSample> samples;
  for (int t = 0; t < 300; ++t) samples.push_back(sample_fgf(1.0, g, derive_stream({5, 0}, "t", t)));
  const std::size_t x = g.ravel({16, 16, 0});
  const double c0 = empirical_covariance(samples, x, x);
  const double c2 = empirical_covariance(samples, x, g.ravel({16, 18, 0}));
  const double c8 = empirical_covariance(samples, x, g.ravel({16, 24, 0}));
  EXPECT_GT(c0, c2);
  EXPECT_GT(c2, c8);
}

TEST(Sampling, Errors) {
  const Grid g = test::square_grid(32);
  test::expect_error(ErrorKind::OrderOutOfRange, [&] { sample_fgf(4.0, g, {}); });
  test::expect_error(ErrorKind::OrderOutOfRange, [&] { sample_fgf(-0.5, g, {}); });
  const FieldSample h = sample_fgf(1.0, g, {});
  test::expect_error(ErrorKind::SupportNotContained, [&] { localize(h, {Box::cube(2, 0.1, 0.6), 1.0}); });
  test::expect_error(ErrorKind::InsufficientSamples, [&] {
    std::vector<FieldSample> one{h};
    empirical_covariance(one, 0, 0);
  });
}
