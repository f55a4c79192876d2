#include "scatterlab/regularity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "scatterlab/fft.hpp"
#include "scatterlab/random_fields.hpp"

namespace scatterlab::regularity {

namespace {

// C-infinity step: 0 for t <= 0, 1 for t >= 1.
double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / t);
  const double b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

std::size_t min_count(const Grid& grid) {
  std::size_t n = grid.n(0);
  for (int i = 1; i < grid.dim(); ++i) n = std::min(n, grid.n(i));
  return n;
}

double max_extent(const Grid& grid) {
  double l = 0.0;
  for (int i = 0; i < grid.dim(); ++i) l = std::max(l, grid.box().extent(i));
  return l;
}

// Nyquist frequency in units of the fundamental 2 pi / L_max.
double nyquist_units(const Grid& grid) {
  double nyq = std::numeric_limits<double>::infinity();
  const double lmax = max_extent(grid);
  for (int i = 0; i < grid.dim(); ++i) {
    nyq = std::min(nyq, 0.5 * static_cast<double>(grid.n(i)) * lmax / grid.box().extent(i));
  }
  return nyq;
}

}  // namespace

double Taper::operator()(const Grid& grid, const Point& x) const {
  double w = 1.0;
  if (box_bump) {
    const Box& b = grid.box();
    double s = 0.0;
    for (int i = 0; i < b.dim; ++i) {
      const double t = (x[i] - 0.5 * (b.lower[i] + b.upper[i])) / (0.5 * b.extent(i));
      s += t * t;
    }
    w *= fields::bump_profile(s);
  }
  if (exclude && w != 0.0) {
    const double r = distance(x, *exclude, grid.dim());
    w *= smooth_step(r / exclude_radius - 1.0);
  }
  return w;
}

Taper Taper::around_point_source(const Grid& grid, const Point& y) {
  return Taper{true, y, 8.0 * grid.min_spacing()};
}

FitBand default_spectral_band(const Grid& grid) { return {4.0, nyquist_units(grid) / 4.0}; }

SpectralFit spectral_slope(const FieldSample& field, const Taper& taper, std::optional<FitBand> band) {
  const Grid& grid = field.grid();
  const FitBand fb = band.value_or(default_spectral_band(grid));
  const FitBand limit = default_spectral_band(grid);
  if (fb.lo < limit.lo - 1e-12 || fb.hi > limit.hi + 1e-12 || !(fb.hi > fb.lo)) {
    std::ostringstream os;
    os << "spectral band [" << fb.lo << ", " << fb.hi << "] outside resolved range [" << limit.lo << ", " << limit.hi
       << "]";
    throw Error(ErrorKind::BandTooNarrow, os.str());
  }
  const std::size_t nodes = grid.size();
  const int nc = field.components();
  std::vector<double> w(nodes);
  double wsum = 0.0;
  for (std::size_t i = 0; i < nodes; ++i) {
    w[i] = taper(grid, grid.node(i));
    wsum += w[i];
  }
  if (wsum == 0.0) throw Error(ErrorKind::BandTooNarrow, "taper vanishes on the whole grid");

  std::vector<std::size_t> dims(grid.counts().begin(), grid.counts().begin() + grid.dim());
  const auto plan = FftPlan::get(dims);
  std::vector<double> power(nodes, 0.0);
  std::vector<cplx> buf(nodes);
  for (int c = 0; c < nc; ++c) {
    cplx mean{};
    for (std::size_t i = 0; i < nodes; ++i) mean += w[i] * field.at(i, c);
    mean /= wsum;
    for (std::size_t i = 0; i < nodes; ++i) buf[i] = w[i] * (field.at(i, c) - mean);
    plan->forward(buf);
    for (std::size_t i = 0; i < nodes; ++i) power[i] += std::norm(buf[i]);
  }

  // Radial shells of width one fundamental.
  const double lmax = max_extent(grid);
  const auto shell_hi = static_cast<std::size_t>(std::floor(fb.hi));
  const auto shell_lo = static_cast<std::size_t>(std::ceil(fb.lo));
  std::vector<double> shell_sum(shell_hi + 1, 0.0);
  std::vector<std::size_t> shell_count(shell_hi + 1, 0);
  for (std::size_t i = 0; i < nodes; ++i) {
    const auto idx = grid.unravel(i);
    double r2 = 0.0;
    for (int a = 0; a < grid.dim(); ++a) {
      const double f = static_cast<double>(fft_frequency_index(idx[a], grid.n(a))) * lmax / grid.box().extent(a);
      r2 += f * f;
    }
    const auto b = static_cast<std::size_t>(std::lround(std::sqrt(r2)));
    if (b < shell_lo || b > shell_hi) continue;
    shell_sum[b] += power[i];
    ++shell_count[b];
  }
  std::vector<double> lx, ly;
  for (std::size_t b = shell_lo; b <= shell_hi; ++b) {
    if (shell_count[b] == 0 || shell_sum[b] <= 0.0) continue;
    lx.push_back(std::log(static_cast<double>(b)));
    ly.push_back(std::log(shell_sum[b] / static_cast<double>(shell_count[b])));
  }
  if (lx.size() < 3) throw Error(ErrorKind::BandTooNarrow, "fewer than three frequency shells in band");
  const LineFit fit = fit_line(lx, ly);
  return {fit.slope, fit.r_squared, fb};
}

std::vector<std::size_t> default_lags(const Grid& grid) {
  const std::size_t hi = min_count(grid) / 8;
  std::vector<std::size_t> lags;
  if (hi < 2) return lags;
  const int steps = 12;
  for (int s = 0; s <= steps; ++s) {
    const double v = 2.0 * std::pow(static_cast<double>(hi) / 2.0, static_cast<double>(s) / steps);
    const auto l = static_cast<std::size_t>(std::lround(v));
    if (lags.empty() || lags.back() != l) lags.push_back(l);
  }
  return lags;
}

StructureFit structure_function_exponent(const FieldSample& field, std::span<const std::size_t> lags,
                                         const Taper& taper) {
  const Grid& grid = field.grid();
  const std::size_t hi = min_count(grid) / 8;
  if (lags.size() < 2) throw Error(ErrorKind::BandTooNarrow, "need at least two lags");
  for (std::size_t l : lags) {
    if (l < 2 || l > hi) {
      throw Error(ErrorKind::BandTooNarrow, "lag " + std::to_string(l) + " outside [2, " + std::to_string(hi) + "]");
    }
  }
  const std::size_t nodes = grid.size();
  const int d = grid.dim();
  const int nc = field.components();
  std::vector<double> w(nodes);
  for (std::size_t i = 0; i < nodes; ++i) w[i] = taper(grid, grid.node(i));

  std::vector<double> lx, ly;
  for (std::size_t l : lags) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < nodes; ++i) {
      if (w[i] == 0.0) continue;
      const auto idx = grid.unravel(i);
      for (int a = 0; a < d; ++a) {
        if (idx[a] + l >= grid.n(a)) continue;
        auto jdx = idx;
        jdx[a] += l;
        const std::size_t j = grid.ravel(jdx);
        const double ww = w[i] * w[j];
        if (ww == 0.0) continue;
        double inc = 0.0;
        for (int c = 0; c < nc; ++c) inc += std::norm(field.at(j, c) - field.at(i, c));
        num += ww * inc;
        den += ww;
      }
    }
    if (den == 0.0 || num <= 0.0) continue;
    lx.push_back(std::log(static_cast<double>(l) * grid.min_spacing()));
    ly.push_back(std::log(num / den));
  }
  if (lx.size() < 2) throw Error(ErrorKind::BandTooNarrow, "increments vanish at all lags");
  const LineFit fit = fit_line(lx, ly);
  const double h = grid.min_spacing();
  return {0.5 * fit.slope, fit.r_squared,
          {static_cast<double>(lags.front()) * h, static_cast<double>(lags.back()) * h}};
}

RegularityEstimate estimate(const FieldSample& field, std::optional<Point> point_source) {
  const Grid& grid = field.grid();
  Taper spectral{};
  Taper increments = Taper::none();
  if (point_source) {
    spectral = Taper::around_point_source(grid, *point_source);
    increments = Taper{false, point_source, spectral.exclude_radius};
  }
  const SpectralFit sf = spectral_slope(field, spectral);
  const auto lags = default_lags(grid);
  const StructureFit st = structure_function_exponent(field, lags, increments);
  RegularityEstimate e;
  e.spectral_order_hat = -sf.slope;
  e.sobolev_sup_hat = 0.5 * (e.spectral_order_hat - grid.dim());
  e.holder_hat = st.exponent;
  e.fit_band = sf.band;
  e.r_squared = sf.r_squared;
  return e;
}

bool AdmissibleWindow::q_admissible(double q) const { return q > q_lo && q < q_hi; }

std::pair<double, double> AdmissibleWindow::gamma_interval(double q) const {
  return {gamma_lower(), (1.0 / q - 0.5) * 0.5 * dim + 0.5};
}

AdmissibleWindow admissible_window(int dim, double order) {
  if ((dim != 2 && dim != 3) || !(order > dim - 1) || !(order <= dim)) {
    std::ostringstream os;
    os << "order " << order << " outside (d-1, d] for d = " << dim;
    throw Error(ErrorKind::OrderOutOfWindow, os.str());
  }
  AdmissibleWindow w;
  w.dim = dim;
  w.order = order;
  const double denom = 3.0 * dim - 2.0 - 2.0 * order;
  w.q_hi = denom <= 0.0 ? std::numeric_limits<double>::infinity() : 2.0 * dim / denom;
  return w;
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Consistent: return "consistent";
    case Verdict::Inconsistent: return "inconsistent";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

Verdict consistency_check(const RegularityEstimate& estimate, const AdmissibleWindow& window, double margin) {
  if (!(estimate.r_squared >= 0.9)) return Verdict::Inconclusive;
  return estimate.sobolev_sup_hat >= window.gamma_lower() - margin ? Verdict::Consistent : Verdict::Inconsistent;
}

}  // namespace scatterlab::regularity
