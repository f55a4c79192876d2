#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "scatterlab/core.hpp"
#include "scatterlab/fft.hpp"
#include "scatterlab/greens.hpp"

/// Nystrom discretization of the acoustic and elastic Lippmann-Schwinger
/// equations
///
///     u - k^2 H_k(rho u) = -H_k f,
///
/// where H_k is the volume potential of the fundamental solution. Off-diagonal
/// weights are Phi(x_i - x_j) times the cell volume; the diagonal is the
/// equal-volume self-cell integral. Because the weights only depend on the
/// integer node offset, H_k is applied as a zero-padded circular convolution
/// and the dense assembly used by the oracle solver sees identical numbers.
namespace scatterlab::ls {

enum class Physics { Acoustic, Elastic };

struct PointSource {
  Point location{};
  /// Scalar amplitude in entry 0 (acoustic) or the d-vector (elastic).
  std::array<double, 3> amplitude{1.0, 0.0, 0.0};
};

struct SourceSpec {
  enum class Kind { RandomField, Point };

  Kind kind = Kind::Point;
  FieldSample field{};
  PointSource point{};

  static SourceSpec random_field(FieldSample f);
  static SourceSpec point_source(const Point& y, std::span<const double> amplitude);
};

struct AcousticProblem {
  Grid grid;
  double k = 1.0;
  FieldSample rho;
  SourceSpec source;

  greens::AcousticKernelParams kernel() const { return {k, grid.dim()}; }
  void validate() const;
};

struct ElasticProblem {
  Grid grid;
  greens::ElasticKernelParams params;
  FieldSample M;
  SourceSpec source;

  void validate() const;
};

/// Real zero medium of the given shape.
FieldSample zero_medium(const Grid& grid, FieldKind shape);

// ---------------------------------------------------------------------------
// Operators

/// Discrete volume potential H_k (scalar) or its tensor analogue.
class VolumeOperator {
 public:
  static VolumeOperator acoustic(const Grid& grid, const greens::AcousticKernelParams& params);
  static VolumeOperator elastic(const Grid& grid, const greens::ElasticKernelParams& params);

  Physics physics() const { return physics_; }
  const Grid& grid() const { return grid_; }
  int components() const { return components_; }
  std::size_t unknowns() const { return grid_.size() * components_; }

  /// out = H in, node-major with components innermost.
  void apply(std::span<const cplx> in, std::span<cplx> out) const;

  /// Weight block coupling node `row` to node `col` (1x1 for acoustic).
  greens::Tensor weight(std::size_t row, std::size_t col) const;

  struct Spectra;

 private:
  VolumeOperator() = default;

  Physics physics_ = Physics::Acoustic;
  Grid grid_;
  int components_ = 1;
  greens::AcousticKernelParams acoustic_{};
  greens::ElasticKernelParams elastic_{};
  greens::Tensor self_weight_{};
  std::shared_ptr<const Spectra> spectra_;
  std::shared_ptr<const FftPlan> plan_;
};

/// (H_k v)(x_i) = sum_j w_ij v(x_j). Scalar fields use the acoustic kernel,
/// vector fields the elastic tensor.
FieldSample apply_Hk(const FieldSample& v, const greens::AcousticKernelParams& params);
FieldSample apply_Hk(const FieldSample& v, const greens::ElasticKernelParams& params);

/// K_k v = H_k(rho v) (acoustic) or H_k(M v) (elastic).
FieldSample apply_Kk(const FieldSample& v, const AcousticProblem& problem);
FieldSample apply_Kk(const FieldSample& v, const ElasticProblem& problem);

/// Right-hand side -H_k f; for a point source f = -delta(. - y) a this is
/// a Phi(x, y) (acoustic) or Phi_tensor(x, y) a (elastic) evaluated at each node.
FieldSample assemble_rhs(const AcousticProblem& problem);
FieldSample assemble_rhs(const ElasticProblem& problem);

/// The operator I - k^2 K_k of either problem, on flat node-major vectors.
class LippmannSchwingerSystem {
 public:
  explicit LippmannSchwingerSystem(const AcousticProblem& problem);
  explicit LippmannSchwingerSystem(const ElasticProblem& problem);

  std::size_t unknowns() const { return op_.unknowns(); }
  int components() const { return op_.components(); }
  const VolumeOperator& volume_operator() const { return op_; }

  /// out = k^2 K_k in.
  void apply_scattering(std::span<const cplx> in, std::span<cplx> out) const;
  /// out = (I - k^2 K_k) in.
  void apply(std::span<const cplx> in, std::span<cplx> out) const;
  /// Pointwise medium product (rho v or M v).
  void multiply_medium(std::span<const cplx> in, std::span<cplx> out) const;

 private:
  VolumeOperator op_;
  double k2_;
  std::vector<cplx> medium_;  // node-major, 1 or d*d entries per node
};

// ---------------------------------------------------------------------------
// Solvers

enum class SolveMethod { Gmres, Born, Dense };

std::string_view to_string(SolveMethod method);

struct SolveReport {
  FieldSample u;
  SolveMethod method = SolveMethod::Gmres;
  /// Relative residual after each iteration (GMRES), or the final residual.
  std::vector<double> residual_history;
  /// Born only: norm of each series term relative to the right-hand side.
  std::vector<double> term_norms;
  int iterations = 0;
  double final_residual = 0.0;
  double wall_time = 0.0;
};

struct GmresOptions {
  double tol = 1e-8;
  int restart = 50;
  int max_iter = 2000;
};

/// Restarted GMRES on (I - k^2 K_k) u = rhs. Throws SolverDiverged when
/// max_iter is reached before the relative residual drops to tol.
SolveReport solve_gmres(const AcousticProblem& problem, const GmresOptions& options = {});
SolveReport solve_gmres(const ElasticProblem& problem, const GmresOptions& options = {});

/// Partial Neumann series sum_{n < n_terms} (k^2 K_k)^n rhs. Throws
/// NonContractive as soon as a term is larger than its predecessor.
SolveReport solve_born(const AcousticProblem& problem, int n_terms);
SolveReport solve_born(const ElasticProblem& problem, int n_terms);

inline constexpr std::size_t kDenseMaxAcoustic = 4096;
inline constexpr std::size_t kDenseMaxElasticNodes = 2048;

/// Dense LU of the explicitly assembled system. Throws ProblemTooLarge or SingularMatrix.
SolveReport solve_dense_oracle(const AcousticProblem& problem);
SolveReport solve_dense_oracle(const ElasticProblem& problem);

/// Relative residual ||(I - k^2 K) u - rhs|| / ||rhs|| using the FFT operator.
double relative_residual(const AcousticProblem& problem, const FieldSample& u);
double relative_residual(const ElasticProblem& problem, const FieldSample& u);

// ---------------------------------------------------------------------------
// Verification

/// Smooth compactly supported test function, the canonical bump on a ball.
struct BumpTestFunction {
  Point center{};
  double radius = 1.0;
  int dim = 2;

  double value(const Point& x) const;
  std::array<double, 3> gradient(const Point& x) const;
  /// Hessian, row-major 3x3.
  std::array<double, 9> hessian(const Point& x) const;
  double laplacian(const Point& x) const;
};

/// Test functions whose supports sit inside the grid box and, for a point
/// source, keep clear of its location. Depends only on the box and seed, so a
/// refinement study sees the same functions at every resolution.
std::vector<BumpTestFunction> random_test_functions(const Grid& grid, const SourceSpec& source, int count,
                                                    const SeedSpec& seed);

/// W^{2,1} norm of psi by midpoint quadrature on the grid.
double w21_norm(const BumpTestFunction& psi, const Grid& grid);

/// max over test functions of |<u, (Delta + k^2) psi> + k^2 <rho u, psi> - <f, psi>|
/// / (||u||_inf ||psi||_{W^{2,1}}); the elastic form uses the Navier operator and
/// takes the maximum over coordinate directions of vector test functions.
double distributional_residual(const FieldSample& u, const AcousticProblem& problem, int n_test,
                               const SeedSpec& seed);
double distributional_residual(const FieldSample& u, const ElasticProblem& problem, int n_test,
                               const SeedSpec& seed);

struct RadiationResult {
  std::vector<double> radii;
  /// Acoustic: mean |du/dr - i k u| per radius. Elastic: compressional part.
  std::vector<double> residual;
  /// Elastic only: shear part.
  std::vector<double> residual_shear;
  double slope = 0.0;
  double slope_shear = 0.0;
};

/// Evaluates u outside the grid box through the volume representation and fits
/// the log-log decay of the radiation residuals along `directions` rays from the
/// box center. Throws RadiiInsideSupport when a radius does not clear the box.
RadiationResult radiation_check(const FieldSample& u, const AcousticProblem& problem,
                                std::span<const double> radii, int directions = 16);
RadiationResult radiation_check(const FieldSample& u, const ElasticProblem& problem,
                                std::span<const double> radii, int directions = 16);

/// Exterior representation u(x) = k^2 int Phi rho u - int Phi f (acoustic).
cplx represent_exterior(const FieldSample& u, const AcousticProblem& problem, const Point& x);

/// Compressional and shear parts of the elastic exterior representation.
struct ElasticExteriorValue {
  std::array<cplx, 3> total{};
  std::array<cplx, 3> compressional{};
  std::array<cplx, 3> shear{};
};
ElasticExteriorValue represent_exterior(const FieldSample& u, const ElasticProblem& problem, const Point& x);

}  // namespace scatterlab::ls
