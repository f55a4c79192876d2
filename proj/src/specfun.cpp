#include "scatterlab/specfun.hpp"

#include <atomic>
#include <cmath>
#include <numbers>

namespace scatterlab::specfun {

namespace {

using real_ext = long double;

std::atomic<bool> g_coefficient_fault{false};

constexpr real_ext kPiExt = 3.141592653589793238462643383279502884L;
constexpr real_ext kSeriesEps = 1e-21L;

real_ext euler_gamma() {
  const real_ext g = 0.577215664901532860606512090082402431L;
  return g_coefficient_fault.load(std::memory_order_relaxed) ? g * (1.0L + 1e-6L) : g;
}

void require_positive(double x, const char* name) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw Error(ErrorKind::DomainError, std::string(name) + " requires finite x > 0");
  }
}

void require_nonnegative(double x, const char* name) {
  if (!(x >= 0.0) || !std::isfinite(x)) {
    throw Error(ErrorKind::DomainError, std::string(name) + " requires finite x >= 0");
  }
}

// Ascending series. The four functions share the power (x^2/4)^k / (k! (k+n)!),
// so one pass evaluates J_n together with the harmonic-number sums of Y_n.
struct SeriesPair {
  real_ext j;
  real_ext y;
};

SeriesPair series_order0(real_ext x, bool want_y) {
  const real_ext q = 0.25L * x * x;
  real_ext term = 1.0L;  // (-q)^k / (k!)^2
  real_ext j = term;
  real_ext ysum = 0.0L;  // sum_{k>=1} (-1)^{k+1} H_k q^k / (k!)^2
  real_ext harmonic = 0.0L;
  for (int k = 1; k < 200; ++k) {
    term *= -q / (static_cast<real_ext>(k) * k);
    harmonic += 1.0L / k;
    j += term;
    ysum -= harmonic * term;
    if (std::fabs(term) * (1.0L + harmonic) < kSeriesEps * (1.0L + std::fabs(j))) break;
  }
  real_ext y = 0.0L;
  if (want_y) {
    y = (2.0L / kPiExt) * ((std::log(0.5L * x) + euler_gamma()) * j + ysum);
  }
  return {j, y};
}

SeriesPair series_order1(real_ext x, bool want_y) {
  const real_ext half = 0.5L * x;
  const real_ext q = half * half;
  real_ext term = half;  // (-1)^k (x/2)^{2k+1} / (k! (k+1)!)
  real_ext j = term;
  real_ext h_k = 0.0L;     // H_k
  real_ext h_k1 = 1.0L;    // H_{k+1}
  const real_ext g2 = 2.0L * euler_gamma();
  real_ext psi_sum = (h_k + h_k1 - g2) * term;
  for (int k = 1; k < 200; ++k) {
    term *= -q / (static_cast<real_ext>(k) * (k + 1));
    h_k = h_k1;
    h_k1 += 1.0L / (k + 1);
    j += term;
    psi_sum += (h_k + h_k1 - g2) * term;
    if (std::fabs(term) * (2.0L + h_k1) < kSeriesEps * (1.0L + std::fabs(j))) break;
  }
  real_ext y = 0.0L;
  if (want_y) {
    y = (2.0L / kPiExt) * std::log(half) * j - 2.0L / (kPiExt * x) - psi_sum / kPiExt;
  }
  return {j, y};
}

// Hankel asymptotic expansion: returns (P, Q) for order nu at argument x.
struct PhaseAmplitude {
  double p;
  double q;
};

PhaseAmplitude asymptotic_pq(int nu, double x) {
  const double mu = 4.0 * nu * nu;
  double a = 1.0;  // a_k(nu) / x^k
  double p = 1.0;
  double q = 0.0;
  double last = 1.0;
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    a *= (mu - odd * odd) / (8.0 * k * x);
    const double mag = std::fabs(a);
    if (mag > last) break;  // past the smallest term
    last = mag;
    // P collects even k with sign (-1)^{k/2}; Q odd k with sign (-1)^{(k-1)/2}.
    if (k % 2 == 0) {
      p += ((k / 2) % 2 == 0) ? a : -a;
    } else {
      q += (((k - 1) / 2) % 2 == 0) ? a : -a;
    }
    if (mag < 1e-18) break;
  }
  return {p, q};
}

// Returns (J_nu, Y_nu) for x > kSeriesCutoff.
std::pair<double, double> asymptotic(int nu, double x) {
  const auto [p, q] = asymptotic_pq(nu, x);
  const double amp = std::sqrt(2.0 / (std::numbers::pi * x));
  const double s = std::sin(x);
  const double c = std::cos(x);
  const double r2 = std::numbers::sqrt2 / 2.0;
  double cos_chi, sin_chi;
  if (nu == 0) {  // chi = x - pi/4
    cos_chi = r2 * (c + s);
    sin_chi = r2 * (s - c);
  } else {  // chi = x - 3 pi/4
    cos_chi = r2 * (s - c);
    sin_chi = -r2 * (s + c);
  }
  return {amp * (p * cos_chi - q * sin_chi), amp * (p * sin_chi + q * cos_chi)};
}

}  // namespace

double bessel_j0(double x) {
  require_nonnegative(x, "bessel_j0");
  if (x <= kSeriesCutoff) return static_cast<double>(series_order0(x, false).j);
  return asymptotic(0, x).first;
}

double bessel_j1(double x) {
  require_nonnegative(x, "bessel_j1");
  if (x <= kSeriesCutoff) return static_cast<double>(series_order1(x, false).j);
  return asymptotic(1, x).first;
}

double bessel_y0(double x) {
  require_positive(x, "bessel_y0");
  if (x <= kSeriesCutoff) return static_cast<double>(series_order0(x, true).y);
  return asymptotic(0, x).second;
}

double bessel_y1(double x) {
  require_positive(x, "bessel_y1");
  if (x <= kSeriesCutoff) return static_cast<double>(series_order1(x, true).y);
  return asymptotic(1, x).second;
}

cplx hankel1(int order, double x) {
  require_positive(x, "hankel1");
  if (order != 0 && order != 1) throw Error(ErrorKind::DomainError, "hankel1 supports orders 0 and 1");
  if (x <= kSeriesCutoff) {
    const SeriesPair s = order == 0 ? series_order0(x, true) : series_order1(x, true);
    return {static_cast<double>(s.j), static_cast<double>(s.y)};
  }
  const auto [j, y] = asymptotic(order, x);
  return {j, y};
}

namespace testing {
void inject_coefficient_fault(bool enabled) { g_coefficient_fault.store(enabled); }
bool coefficient_fault_enabled() { return g_coefficient_fault.load(); }
}  // namespace testing

}  // namespace scatterlab::specfun
