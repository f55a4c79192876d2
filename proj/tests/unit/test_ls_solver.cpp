#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "scatterlab/ls_solver.hpp"
#include "scatterlab/random_fields.hpp"

using namespace scatterlab;
using namespace scatterlab::ls;

namespace {

FieldSample medium(const Grid& g, FieldKind shape, double amplitude, std::uint64_t seed) {
  const fields::RandomFieldSpec spec{1.5, shape, g.dim(), {{Box::cube(g.dim(), 0.25, 0.75), amplitude}}};
  return fields::sample_medium(spec, g, {seed, 0});
}

FieldSample random_vector(const Grid& g, FieldShape shape, std::uint64_t seed) {
  FieldSample v(g, shape, false);
  Rng rng({seed, 1});
  for (auto& x : v.values()) x = {rng.normal(), rng.normal()};
  return v;
}

const Point kOffNode{0.5 + 0.37 / 64, 0.5 + 0.21 / 64, 0.0};

AcousticProblem acoustic(std::size_t n, double k, double amplitude) {
  const Grid g = test::square_grid(n);
  const std::array<double, 1> a{1.0};
  return {g, k, medium(g, FieldKind::Scalar, amplitude, 3), SourceSpec::point_source(kOffNode, a)};
}

ElasticProblem elastic(std::size_t n, double k, double amplitude) {
  const Grid g = test::square_grid(n);
  const std::array<double, 2> a{1.0, 0.5};
  return {g, {k, 1.0, 1.0, 2}, medium(g, FieldKind::Matrix, amplitude, 4), SourceSpec::point_source(kOffNode, a)};
}

double rel_diff(const FieldSample& a, const FieldSample& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.value_count(); ++i) {
    num += std::norm(a.values()[i] - b.values()[i]);
    den += std::norm(b.values()[i]);
  }
  return std::sqrt(num / den);
}

}  // namespace

TEST(VolumeOperator, AcousticMatchesDirectSum) {
  const Grid g = test::square_grid(12);
  const greens::AcousticKernelParams p{5.0, 2};
  const FieldSample v = random_vector(g, FieldShape::scalar(2), 1);
  const FieldSample out = apply_Hk(v, p);
  const cplx self = greens::singular_cell_weight_acoustic(g, p);
  for (std::size_t i = 0; i < g.size(); ++i) {
    cplx s = self * v.at(i);
    for (std::size_t j = 0; j < g.size(); ++j) {
      if (j != i) s += g.cell_volume() * greens::phi_acoustic(g.node(i), g.node(j), p) * v.at(j);
    }
    EXPECT_NEAR(std::abs(out.at(i) - s), 0.0, 1e-13 * (1.0 + std::abs(s)));
  }
}

TEST(VolumeOperator, ElasticMatchesDirectSum) {
  const Grid g = test::cube_grid(8);
  const greens::ElasticKernelParams p{3.0, 2.0, 1.0, 3};
  const FieldSample v = random_vector(g, FieldShape::vector(3), 2);
  const FieldSample out = apply_Hk(v, p);
  const greens::Tensor self = greens::singular_cell_weight_elastic(g, p);
  for (std::size_t i = 0; i < g.size(); i += 7) {
    for (int a = 0; a < 3; ++a) {
      cplx s{};
      for (std::size_t j = 0; j < g.size(); ++j) {
        const greens::Tensor w = j == i ? self : greens::green_tensor_elastic(g.node(i), g.node(j), p);
        const double scale = j == i ? 1.0 : g.cell_volume();
        for (int b = 0; b < 3; ++b) s += scale * w(a, b) * v.at(j, b);
      }
      EXPECT_NEAR(std::abs(out.at(i, a) - s), 0.0, 1e-13 * (1.0 + std::abs(s)));
    }
  }
}

TEST(Rhs, PointSourceIsKernelColumn) {
  const auto pr = acoustic(16, 4.0, 0.1);
  const FieldSample rhs = assemble_rhs(pr);
  for (std::size_t i = 0; i < pr.grid.size(); i += 5) {
    EXPECT_NEAR(std::abs(rhs.at(i) - greens::phi_acoustic(pr.grid.node(i), kOffNode, pr.kernel())), 0.0, 1e-14);
  }
}

TEST(Solvers, AcousticMethodsAgree) {
  const auto pr = acoustic(16, 4.0, 0.05);
  const auto dense = solve_dense_oracle(pr);
  const auto gmres = solve_gmres(pr, {1e-12, 50, 500});
  const auto born = solve_born(pr, 40);
  EXPECT_LT(rel_diff(gmres.u, dense.u), 1e-10);
  EXPECT_LT(rel_diff(born.u, dense.u), 1e-10);
  EXPECT_LT(relative_residual(pr, dense.u), 1e-12);
  EXPECT_EQ(born.term_norms.size(), 40u);
}

TEST(Solvers, ElasticMethodsAgree) {
  const auto pr = elastic(12, 3.0, 0.05);
  const auto dense = solve_dense_oracle(pr);
  const auto gmres = solve_gmres(pr, {1e-12, 50, 500});
  EXPECT_LT(rel_diff(gmres.u, dense.u), 1e-10);
  EXPECT_LT(relative_residual(pr, gmres.u), 1e-11);
}

TEST(Solvers, FailureModes) {
  test::expect_error(ErrorKind::NonContractive, [] { solve_born(acoustic(16, 12.0, 20.0), 30); });
  test::expect_error(ErrorKind::SolverDiverged, [] { solve_gmres(acoustic(16, 8.0, 1.0), {1e-13, 2, 2}); });
  test::expect_error(ErrorKind::ProblemTooLarge, [] { solve_dense_oracle(acoustic(128, 1.0, 0.1)); });
}

TEST(Solvers, ZeroMediumGivesIncidentField) {
  auto pr = acoustic(16, 4.0, 0.0);
  pr.rho = zero_medium(pr.grid, FieldKind::Scalar);
  const auto sol = solve_gmres(pr);
  EXPECT_LT(rel_diff(sol.u, assemble_rhs(pr)), 1e-14);
  const Point x{2.0, -1.5, 0.0};
  EXPECT_NEAR(std::abs(represent_exterior(sol.u, pr, x) - greens::phi_acoustic(x, kOffNode, pr.kernel())), 0.0,
              1e-14);
}

TEST(Problem, RejectsPointSourceOnNode) {
  auto pr = acoustic(16, 4.0, 0.1);
  const std::array<double, 1> a{1.0};
  pr.source = SourceSpec::point_source(pr.grid.node(std::size_t{37}), a);
  test::expect_error(ErrorKind::PointSourceOnGridNode, [&] { pr.validate(); });
}

TEST(Verification, ZeroFieldHasZeroResidual) {
  const Grid g = test::square_grid(32);
  const AcousticProblem pr{g, 3.0, medium(g, FieldKind::Scalar, 1.0, 5),
                           SourceSpec::random_field(zero_medium(g, FieldKind::Scalar))};
  const FieldSample u = zero_medium(g, FieldKind::Scalar);
  EXPECT_EQ(distributional_residual(u, pr, 10, {1, 0}), 0.0);
}

TEST(Verification, SolutionSatisfiesWeakForm) {
  const auto pr = acoustic(128, 4.0, 0.5);
  const auto sol = solve_gmres(pr, {1e-10, 50, 500});
  EXPECT_LT(distributional_residual(sol.u, pr, 20, {8, 0}), 5e-3);
}

TEST(Verification, BumpDerivativesMatchFiniteDifferences) {
  const BumpTestFunction psi{{0.5, 0.4, 0.0}, 0.3, 2};
  const Point x{0.6, 0.5, 0.0};
  const double e = 1e-5;
  const auto g = psi.gradient(x);
  const auto h = psi.hessian(x);
  for (int a = 0; a < 2; ++a) {
    Point xp = x, xm = x;
    xp[a] += e;
    xm[a] -= e;
    EXPECT_NEAR(g[a], (psi.value(xp) - psi.value(xm)) / (2 * e), 1e-8);
    const auto gp = psi.gradient(xp), gm = psi.gradient(xm);
    for (int b = 0; b < 2; ++b) EXPECT_NEAR(h[a * 3 + b], (gp[b] - gm[b]) / (2 * e), 1e-6);
  }
  EXPECT_NEAR(psi.laplacian(x), h[0] + h[4], 1e-12);
  EXPECT_EQ(psi.value(Point{0.9, 0.4, 0.0}), 0.0);
}

TEST(Verification, TestFunctionsAvoidSourceAndBoundary) {
  const auto pr = acoustic(32, 4.0, 0.1);
  const auto tests = random_test_functions(pr.grid, pr.source, 50, {3, 0});
  ASSERT_EQ(tests.size(), 50u);
  for (const auto& t : tests) {
    EXPECT_GT(distance(t.center, kOffNode, 2), t.radius);
    for (int a = 0; a < 2; ++a) {
      EXPECT_GE(t.center[a] - t.radius, 0.0);
      EXPECT_LE(t.center[a] + t.radius, 1.0);
    }
  }
}

TEST(Verification, RadiationRadiiMustClearTheBox) {
  const auto pr = acoustic(16, 4.0, 0.1);
  const auto sol = solve_gmres(pr);
  const std::vector<double> inside{0.5, 10.0};
  test::expect_error(ErrorKind::RadiiInsideSupport, [&] { radiation_check(sol.u, pr, inside); });
  const std::vector<double> single{10.0};
  test::expect_error(ErrorKind::RadiiInsideSupport, [&] { radiation_check(sol.u, pr, single); });
}

TEST(Verification, RadiationResidualDecays) {
  const auto pr = acoustic(32, 4.0, 0.5);
  const auto sol = solve_gmres(pr);
  const std::vector<double> radii{5.0, 10.0, 20.0, 40.0};
  const auto r = radiation_check(sol.u, pr, radii);
  EXPECT_NEAR(r.slope, -1.5, 0.1);
}
