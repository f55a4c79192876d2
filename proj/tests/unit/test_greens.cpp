#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/hankel.hpp>
#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "scatterlab/greens.hpp"

using namespace scatterlab;
using namespace scatterlab::greens;

namespace {

constexpr double kPi = std::numbers::pi;

Point shifted(Point x, int axis, double d) {
  x[axis] += d;
  return x;
}

}  // namespace

TEST(Wavenumbers, FromLameParameters) {
  const auto w = wavenumbers(6.0, 5.0, 4.0);
  EXPECT_DOUBLE_EQ(w.kappa_p, 6.0 / std::sqrt(13.0));
  EXPECT_DOUBLE_EQ(w.kappa_s, 3.0);
  test::expect_error(ErrorKind::InvalidLame, [] { wavenumbers(1.0, 1.0, 0.0); });
  test::expect_error(ErrorKind::InvalidLame, [] { wavenumbers(1.0, -2.0, 0.5); });
}

TEST(Acoustic, MatchesClosedForms) {
  for (double r : {0.01, 0.3, 1.7, 9.0}) {
    const cplx h0 = boost::math::cyl_hankel_1(0, 2.5 * r);
    EXPECT_NEAR(std::abs(phi_acoustic(r, {2.5, 2}) - cplx(0.0, 0.25) * h0), 0.0, 1e-13 * std::abs(h0));
    const cplx p3 = std::exp(cplx(0.0, 2.5 * r)) / (4.0 * kPi * r);
    EXPECT_NEAR(std::abs(phi_acoustic(r, {2.5, 3}) - p3), 0.0, 1e-14 * std::abs(p3));
  }
  test::expect_error(ErrorKind::DomainError, [] { phi_acoustic(0.0, {1.0, 2}); });
}

class KernelDerivatives : public ::testing::TestWithParam<int> {};

TEST_P(KernelDerivatives, GradientAndHessianMatchFiniteDifferences) {
  const int d = GetParam();
  const AcousticKernelParams p{3.0, d};
  const Point x{0.31, -0.22, d == 3 ? 0.17 : 0.0}, y{};
  const double e = 1e-5;
  const auto g = grad_phi_acoustic(x, y, p);
  const Tensor h = hessian_phi(x, y, p.k, d);
  for (int a = 0; a < d; ++a) {
    const cplx fd = (phi_acoustic(shifted(x, a, e), y, p) - phi_acoustic(shifted(x, a, -e), y, p)) / (2.0 * e);
    EXPECT_NEAR(std::abs(g[a] - fd), 0.0, 1e-7 * std::abs(fd) + 1e-9);
    const auto gp = grad_phi_acoustic(shifted(x, a, e), y, p);
    const auto gm = grad_phi_acoustic(shifted(x, a, -e), y, p);
    for (int b = 0; b < d; ++b) {
      const cplx fdh = (gp[b] - gm[b]) / (2.0 * e);
      EXPECT_NEAR(std::abs(h(a, b) - fdh), 0.0, 1e-6 * std::max(1.0, std::abs(fdh)));
    }
  }
}

TEST_P(KernelDerivatives, SolvesHelmholtzAwayFromSource) {
  const int d = GetParam();
  const double k = 4.0;
  const Point x{0.4, 0.5, d == 3 ? -0.3 : 0.0}, y{0.1, 0.0, 0.0};
  const Tensor h = hessian_phi(x, y, k, d);
  cplx lap{};
  for (int a = 0; a < d; ++a) lap += h(a, a);
  const cplx phi = phi_acoustic(x, y, {k, d});
  EXPECT_NEAR(std::abs(lap + k * k * phi), 0.0, 1e-12 * std::abs(k * k * phi));
}

TEST_P(KernelDerivatives, ElasticTensorSolvesNavier) {
  const int d = GetParam();
  const ElasticKernelParams p{2.0, 1.5, 0.8, d};
  const Point x{0.35, -0.27, d == 3 ? 0.21 : 0.0}, y{};
  const double e = 2e-3;
  // mu Lap G + (lambda + mu) grad div G + k^2 G = 0, by 4th-order differences.
  auto second = [&](int a, int b, int i, int j) {
    auto at = [&](double sa, double sb) {
      return green_tensor_elastic(shifted(shifted(x, a, sa), b, sb), y, p)(i, j);
    };
    if (a == b) {
      return (-at(2 * e, 0) + 16.0 * at(e, 0) - 30.0 * at(0, 0) + 16.0 * at(-e, 0) - at(-2 * e, 0)) / (12.0 * e * e);
    }
    return (at(e, e) - at(e, -e) - at(-e, e) + at(-e, -e)) / (4.0 * e * e);
  };
  const Tensor g = green_tensor_elastic(x, y, p);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      cplx r = p.k * p.k * g(i, j);
      for (int a = 0; a < d; ++a) r += p.mu * second(a, a, i, j) + (p.lambda + p.mu) * second(i, a, a, j);
      EXPECT_NEAR(std::abs(r), 0.0, 2e-4 * (1.0 + std::abs(p.k * p.k * g(i, j)))) << i << j;
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Dims, KernelDerivatives, ::testing::Values(2, 3));

TEST(Elastic, TensorIsSymmetricAndSplits) {
  const ElasticKernelParams p{3.0, 2.0, 1.0, 3};
  const Point x{0.2, 0.1, -0.4}, y{-0.1, 0.3, 0.05};
  const Tensor g = green_tensor_elastic(x, y, p);
  const Tensor gp = green_tensor_compressional(x, y, p);
  const Tensor h = hessian_phi(x, y, p.kappas().kappa_p, 3);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      EXPECT_NEAR(std::abs(g(i, j) - g(j, i)), 0.0, 1e-14);
      EXPECT_NEAR(std::abs(gp(i, j) + h(i, j) / (p.k * p.k)), 0.0, 1e-14);
    }
  }
  test::expect_error(ErrorKind::CoincidentPoints, [&] { green_tensor_elastic(x, x, p); });
}

class SelfWeights : public ::testing::TestWithParam<int> {};

TEST_P(SelfWeights, AcousticMatchesRadialQuadrature) {
  const int d = GetParam();
  const Grid g = d == 2 ? test::square_grid(32) : test::cube_grid(16);
  const double k = 5.0;
  const double R = equal_volume_radius(g);
  EXPECT_NEAR(d == 2 ? kPi * R * R : 4.0 / 3.0 * kPi * R * R * R, g.cell_volume(), 1e-16);
  using boost::math::quadrature::gauss_kronrod;
  auto integrand = [&](double r, bool imag) {
    const cplx v = d == 2 ? cplx(0.0, 0.25) * boost::math::cyl_hankel_1(0, k * r) * 2.0 * kPi * r
                          : std::exp(cplx(0.0, k * r)) * r;
    return imag ? v.imag() : v.real();
  };
  const double re = gauss_kronrod<double, 31>::integrate([&](double r) { return integrand(r, false); }, 0.0, R, 15, 1e-13);
  const double im = gauss_kronrod<double, 31>::integrate([&](double r) { return integrand(r, true); }, 0.0, R, 15, 1e-13);
  const cplx w = singular_cell_weight_acoustic(g, {k, d});
  EXPECT_NEAR(std::abs(w - cplx(re, im)), 0.0, 1e-11 * std::abs(w));
}

TEST_P(SelfWeights, ElasticReducesToAcousticWeights) {
  // The angular average of grad grad^T Phi is (1/d) Lap Phi I, which turns
  // the ball integral of the Green tensor into acoustic weights at kappa_s, kappa_p.
  const int d = GetParam();
  const Grid g = d == 2 ? test::square_grid(32) : test::cube_grid(16);
  const ElasticKernelParams p{4.0, 2.0, 0.7, d};
  const auto w = p.kappas();
  const cplx ws = singular_cell_weight_acoustic(g, {w.kappa_s, d});
  const cplx wp = singular_cell_weight_acoustic(g, {w.kappa_p, d});
  const cplx expect = (1.0 - 1.0 / d) / p.mu * ws + wp / (d * (p.lambda + 2.0 * p.mu));
  const Tensor t = singular_cell_weight_elastic(g, p);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      EXPECT_NEAR(std::abs(t(i, j) - (i == j ? expect : cplx{})), 0.0, 1e-10 * std::abs(expect));
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Dims, SelfWeights, ::testing::Values(2, 3));
