#include <boost/math/special_functions/bessel.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "scatterlab/specfun.hpp"

using namespace scatterlab;
using Big = boost::multiprecision::cpp_bin_float_50;

namespace {

double ref_j(int n, double x) { return static_cast<double>(boost::math::cyl_bessel_j(n, Big(x))); }
double ref_y(int n, double x) { return static_cast<double>(boost::math::cyl_neumann(n, Big(x))); }

}  // namespace

class BesselOracle : public ::testing::TestWithParam<double> {};

TEST_P(BesselOracle, MatchesHighPrecision) {
  const double x = GetParam();
  // Absolute on the series side, relative to the envelope sqrt(2/(pi x)) beyond it.
  const double tol = x <= specfun::kSeriesCutoff ? 1e-13 : 2e-14 * std::sqrt(2.0 / (std::numbers::pi * x));
  EXPECT_NEAR(specfun::bessel_j0(x), ref_j(0, x), tol);
  EXPECT_NEAR(specfun::bessel_j1(x), ref_j(1, x), tol);
  EXPECT_NEAR(specfun::bessel_y0(x), ref_y(0, x), std::max(tol, 1e-14 * std::abs(ref_y(0, x))));
  EXPECT_NEAR(specfun::bessel_y1(x), ref_y(1, x), std::max(tol, 1e-14 * std::abs(ref_y(1, x))));
}

INSTANTIATE_TEST_SUITE_P(Arguments, BesselOracle,
                         ::testing::Values(1e-6, 1e-3, 0.1, 0.5, 1.0, 2.4048, 5.0, 7.99, 8.0, 8.01, 12.0, 15.99,
                                           16.0, 16.01, 25.0, 60.0, 300.0, 5000.0));

TEST(Bessel, Wronskian) {
  for (double x = 0.05; x < 40.0; x *= 1.3) {
    const double w = specfun::bessel_j1(x) * specfun::bessel_y0(x) - specfun::bessel_j0(x) * specfun::bessel_y1(x);
    EXPECT_NEAR(w * std::numbers::pi * x / 2.0, 1.0, 1e-13) << "x=" << x;
  }
}

TEST(Bessel, DomainErrors) {
  test::expect_error(ErrorKind::DomainError, [] { specfun::bessel_y0(0.0); });
  test::expect_error(ErrorKind::DomainError, [] { specfun::bessel_y1(-1.0); });
}

TEST(Hankel, CombinesJandY) {
  const double x = 3.7;
  EXPECT_EQ(specfun::hankel1(0, x), cplx(specfun::bessel_j0(x), specfun::bessel_y0(x)));
  EXPECT_EQ(specfun::hankel1(1, x), cplx(specfun::bessel_j1(x), specfun::bessel_y1(x)));
}

TEST(FaultInjection, CorruptsSeriesAndRestores) {
  const double before = specfun::bessel_y0(1.0);
  specfun::testing::inject_coefficient_fault(true);
  EXPECT_TRUE(specfun::testing::coefficient_fault_enabled());
  EXPECT_GT(std::abs(specfun::bessel_y0(1.0) - before), 1e-9);
  specfun::testing::inject_coefficient_fault(false);
  EXPECT_EQ(specfun::bessel_y0(1.0), before);
}
