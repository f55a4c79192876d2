#pragma once

#include <array>

#include "scatterlab/core.hpp"

/// Free-space fundamental solutions of the Helmholtz and Navier operators and
/// the self-cell quadrature weights used by the volume integral operators.
///
/// Sign convention: (Delta + k^2) Phi = -delta and
/// (mu Delta + (lambda + mu) grad div + k^2) Phi_tensor = -delta I.
namespace scatterlab::greens {

struct AcousticKernelParams {
  double k = 1.0;
  int dim = 2;

  void validate() const;
};

struct Wavenumbers {
  double kappa_p;
  double kappa_s;
};

/// kappa_p = k / sqrt(lambda + 2 mu), kappa_s = k / sqrt(mu). Throws InvalidLame.
Wavenumbers wavenumbers(double k, double lambda, double mu);

struct ElasticKernelParams {
  double k = 1.0;
  double lambda = 1.0;
  double mu = 1.0;
  int dim = 2;

  void validate() const;
  Wavenumbers kappas() const { return wavenumbers(k, lambda, mu); }
};

/// Small dense d x d complex matrix, row-major.
struct Tensor {
  int dim = 2;
  std::array<cplx, 9> a{};

  cplx& operator()(int i, int j) { return a[i * 3 + j]; }
  const cplx& operator()(int i, int j) const { return a[i * 3 + j]; }
  double max_abs() const;
};

/// Phi_d(r) together with its first two radial derivatives.
struct RadialProfile {
  cplx value;
  cplx d1;
  cplx d2;
};

RadialProfile phi_radial(double r, double k, int dim);

/// Phi_2 = (i/4) H0(kr), Phi_3 = exp(ikr) / (4 pi r). Throws DomainError for r <= 0.
cplx phi_acoustic(double r, const AcousticKernelParams& params);
cplx phi_acoustic(const Point& x, const Point& y, const AcousticKernelParams& params);

/// Gradient of Phi_d(x, y) with respect to x.
std::array<cplx, 3> grad_phi_acoustic(const Point& x, const Point& y, const AcousticKernelParams& params);

/// grad grad^T Phi_d(x, y; k) with respect to x.
Tensor hessian_phi(const Point& x, const Point& y, double k, int dim);

/// Elastic Green tensor (1/mu) Phi(kappa_s) I + (1/k^2) grad grad^T [Phi(kappa_s) - Phi(kappa_p)].
/// Throws CoincidentPoints when x == y.
Tensor green_tensor_elastic(const Point& x, const Point& y, const ElasticKernelParams& params);

/// Curl-free (compressional) part of the Green tensor, -(1/k^2) grad grad^T Phi(kappa_p).
/// The shear part is the difference with green_tensor_elastic.
Tensor green_tensor_compressional(const Point& x, const Point& y, const ElasticKernelParams& params);

/// Radius of the disk/ball with the same volume as one grid cell.
double equal_volume_radius(const Grid& grid);

/// Integral of Phi_d over the equal-volume disk/ball, in closed form.
cplx singular_cell_weight_acoustic(const Grid& grid, const AcousticKernelParams& params);

/// Integral of the elastic Green tensor over the equal-volume disk/ball by
/// adaptive radial Gauss-Kronrod quadrature with an exact angular rule.
/// Results are cached per (cell geometry, parameters). Throws QuadratureNoConvergence.
Tensor singular_cell_weight_elastic(const Grid& grid, const ElasticKernelParams& params);

}  // namespace scatterlab::greens
