#pragma once

#include <span>
#include <string>
#include <vector>

#include "scatterlab/core.hpp"

/// Sampling of microlocally isotropic Gaussian random fields of order -m.
///
/// A field with principal covariance symbol phi(x) |xi|^{-m} is realized as
/// rho = phi^{1/2} h_m, where h_m = (-Delta)^{-m/4} W is the fractional
/// Gaussian field synthesized spectrally from discrete white noise W on the
/// periodic grid. Localization keeps phi's support at least a quarter box
/// length away from the grid boundary so the periodic wrap never reaches the
/// localized field.
namespace scatterlab::fields {

/// Canonical smooth bump exp(1 - 1/(1 - s)) of the squared rescaled radius s,
/// zero for s >= 1. Equals 1 at the center.
double bump_profile(double s);

/// Micro-correlation strength phi: amplitude times the canonical bump on the
/// ellipsoid inscribed in `support`.
struct StrengthFunction {
  Box support{};
  double amplitude = 1.0;

  double operator()(const Point& x) const;
  /// Squared rescaled radius |x~|^2 of x relative to the support box.
  double rescaled_radius2(const Point& x) const;
  std::string id() const;
};

struct RandomFieldSpec {
  double order = 0.0;
  FieldKind shape = FieldKind::Scalar;
  int dim = 2;
  /// One entry (shared by every component) or one per component.
  std::vector<StrengthFunction> strengths;

  int components() const { return FieldShape{shape, dim}.components(); }
  const StrengthFunction& strength(int component) const;
  void validate() const;
};

/// Independent N(0, 1/cell_volume) values per node.
FieldSample sample_white_noise(const Grid& grid, const SeedSpec& seed);

/// Fractional Gaussian field h_m; throws OrderOutOfRange unless m in [0, d+2).
FieldSample sample_fgf(double order, const Grid& grid, const SeedSpec& seed);

/// rho = phi^{1/2} h for every component of h. Throws SupportNotContained when
/// the support is not inside the grid box with a quarter-length margin.
FieldSample localize(const FieldSample& h, const StrengthFunction& strength);

/// Scalar, vector or matrix medium/source sample. Component c is drawn from
/// derive_stream(seed, "component", c) and localized by its own strength.
FieldSample sample_medium(const RandomFieldSpec& spec, const Grid& grid, const SeedSpec& seed);

/// Unbiased sample covariance of component `comp` at nodes x and y (real parts).
double empirical_covariance(std::span<const FieldSample> samples, std::size_t x, std::size_t y, int comp = 0);

}  // namespace scatterlab::fields
