#pragma once

#include "scatterlab/core.hpp"

/// Bessel functions of the first and second kind (orders 0 and 1) and the
/// Hankel functions built from them, for real positive arguments.
///
/// Two regimes: the ascending power series, summed in extended precision, up
/// to `kSeriesCutoff`; beyond it the Hankel asymptotic expansion with the
/// phase/amplitude polynomials P and Q, truncated at the smallest term.
/// Accuracy is about 1e-13 absolute on the series side and 1e-14 relative to
/// the envelope sqrt(2/(pi x)) on the asymptotic side.
namespace scatterlab::specfun {

inline constexpr double kSeriesCutoff = 16.0;
inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

double bessel_j0(double x);
double bessel_j1(double x);
/// Throws DomainError for x <= 0.
double bessel_y0(double x);
/// Throws DomainError for x <= 0.
double bessel_y1(double x);

/// H_n^(1)(x) = J_n(x) + i Y_n(x) for n in {0, 1}.
cplx hankel1(int order, double x);

namespace testing {
/// Perturbs the Euler constant used by the Y-series (fault-injection fixture).
/// Only meant for verifying that the validation suite detects corruption.
void inject_coefficient_fault(bool enabled);
bool coefficient_fault_enabled();
}  // namespace testing

}  // namespace scatterlab::specfun
