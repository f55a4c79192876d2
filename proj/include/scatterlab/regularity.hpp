#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "scatterlab/core.hpp"

/// Smoothness estimators for sampled fields and solutions, and the admissible
/// regularity windows they are compared against.
///
/// Smoothness is measured in the L^2 (spectral) scale: a radially averaged
/// periodogram decaying like |xi|^{-s} means the field lies in H^gamma for
/// every gamma < (s - d)/2.
namespace scatterlab::regularity {

/// Closed interval used for a fit. Spectral fits are in units of the
/// fundamental frequency, structure-function fits in physical lag length.
struct FitBand {
  double lo = 0.0;
  double hi = 0.0;
};

/// Smooth window applied before estimation: the canonical bump on the ellipsoid
/// inscribed in the grid box, optionally times a smooth cutoff that vanishes on
/// a ball around an excluded point (a point-source location).
struct Taper {
  bool box_bump = true;
  std::optional<Point> exclude;
  double exclude_radius = 0.0;

  double operator()(const Grid& grid, const Point& x) const;
  /// Bump window plus an exclusion ball of radius 8h around y.
  static Taper around_point_source(const Grid& grid, const Point& y);
  static Taper none() { return Taper{false, std::nullopt, 0.0}; }
};

struct SpectralFit {
  double slope = 0.0;
  double r_squared = 0.0;
  FitBand band{};
};

/// Default band [4, n/8]: four fundamentals up to a quarter of the Nyquist frequency.
FitBand default_spectral_band(const Grid& grid);

/// Least-squares slope of the log radially averaged periodogram of the tapered
/// field against log |xi|. Throws BandTooNarrow if the band holds fewer than
/// three frequency shells or lies outside [4, n/8].
SpectralFit spectral_slope(const FieldSample& field, const Taper& taper = {},
                           std::optional<FitBand> band = std::nullopt);

struct StructureFit {
  double exponent = 0.0;  // H_hat, half the fitted slope
  double r_squared = 0.0;
  FitBand band{};
};

/// Geometric lag ladder (in grid steps) covering [2h, L/8].
std::vector<std::size_t> default_lags(const Grid& grid);

/// Half the slope of log mean-squared axis-aligned increment against log lag.
/// Increments are weighted by the taper at both endpoints; the default taper
/// is none. Throws BandTooNarrow for fewer than two lags or lags outside [2h, L/8].
StructureFit structure_function_exponent(const FieldSample& field, std::span<const std::size_t> lags,
                                         const Taper& taper = Taper::none());

struct RegularityEstimate {
  double spectral_order_hat = 0.0;
  double sobolev_sup_hat = 0.0;
  double holder_hat = 0.0;
  FitBand fit_band{};
  double r_squared = 0.0;
};

/// Both estimators with the defaults above. When `point_source` is given the
/// ball of radius 8h around it is excluded.
RegularityEstimate estimate(const FieldSample& field, std::optional<Point> point_source = std::nullopt);

struct AdmissibleWindow {
  int dim = 2;
  double order = 2.0;
  double q_lo = 2.0;
  double q_hi = 0.0;  // +infinity when 3d - 2 - 2m <= 0

  bool q_admissible(double q) const;
  /// Open interval ((d - m)/2, (1/q - 1/2) d/2 + 1/2).
  std::pair<double, double> gamma_interval(double q) const;
  double gamma_lower() const { return 0.5 * (dim - order); }
};

/// Throws OrderOutOfWindow unless m in (d - 1, d].
AdmissibleWindow admissible_window(int dim, double order);

enum class Verdict { Consistent, Inconsistent, Inconclusive };

std::string_view to_string(Verdict v);

/// Inconclusive when r_squared < 0.9; otherwise consistent exactly when
/// sobolev_sup_hat >= (d - m)/2 - margin.
Verdict consistency_check(const RegularityEstimate& estimate, const AdmissibleWindow& window, double margin);

}  // namespace scatterlab::regularity
