#include <cmath>
#include <numbers>

#include "scatterlab/ls_solver.hpp"
#include "scatterlab/random_fields.hpp"

namespace scatterlab::ls {

// ---------------------------------------------------------------------------
// Bump test functions

namespace {

// psi = exp(q(s)), q(s) = 1 - 1/(1 - s), s = |x - c|^2 / r^2.
struct BumpLocal {
  double s;
  double psi;
  double q1;  // q'(s)
  double q2;  // q''(s)
};

BumpLocal bump_local(const BumpTestFunction& f, const Point& x) {
  double s = 0.0;
  for (int i = 0; i < f.dim; ++i) s += (x[i] - f.center[i]) * (x[i] - f.center[i]);
  s /= f.radius * f.radius;
  if (s >= 1.0) return {s, 0.0, 0.0, 0.0};
  const double t = 1.0 / (1.0 - s);
  return {s, std::exp(1.0 - t), -t * t, -2.0 * t * t * t};
}

}  // namespace

double BumpTestFunction::value(const Point& x) const { return bump_local(*this, x).psi; }

std::array<double, 3> BumpTestFunction::gradient(const Point& x) const {
  const BumpLocal b = bump_local(*this, x);
  std::array<double, 3> g{};
  if (b.psi == 0.0) return g;
  const double r2 = radius * radius;
  for (int i = 0; i < dim; ++i) g[i] = b.psi * b.q1 * 2.0 * (x[i] - center[i]) / r2;
  return g;
}

std::array<double, 9> BumpTestFunction::hessian(const Point& x) const {
  const BumpLocal b = bump_local(*this, x);
  std::array<double, 9> h{};
  if (b.psi == 0.0) return h;
  const double r2 = radius * radius;
  std::array<double, 3> ds{};
  for (int i = 0; i < dim; ++i) ds[i] = 2.0 * (x[i] - center[i]) / r2;
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      const double dss = i == j ? 2.0 / r2 : 0.0;
      h[i * 3 + j] = b.psi * ((b.q2 + b.q1 * b.q1) * ds[i] * ds[j] + b.q1 * dss);
    }
  }
  return h;
}

double BumpTestFunction::laplacian(const Point& x) const {
  const auto h = hessian(x);
  double lap = 0.0;
  for (int i = 0; i < dim; ++i) lap += h[i * 3 + i];
  return lap;
}

std::vector<BumpTestFunction> random_test_functions(const Grid& grid, const SourceSpec& source, int count,
                                                    const SeedSpec& seed) {
  const Box& box = grid.box();
  const int d = grid.dim();
  double lmin = box.extent(0);
  for (int i = 1; i < d; ++i) lmin = std::min(lmin, box.extent(i));
  Rng rng(derive_stream(seed, "test-functions", 0));
  std::vector<BumpTestFunction> out;
  for (int attempt = 0; attempt < 100000 && static_cast<int>(out.size()) < count; ++attempt) {
    BumpTestFunction f;
    f.dim = d;
    f.radius = lmin * (0.125 + 0.125 * rng.uniform());
    const double margin = f.radius + 0.02 * lmin;
    for (int i = 0; i < d; ++i) {
      f.center[i] = box.lower[i] + margin + (box.extent(i) - 2.0 * margin) * rng.uniform();
    }
    if (source.kind == SourceSpec::Kind::Point &&
        distance(f.center, source.point.location, d) < f.radius + 0.02 * lmin) {
      continue;
    }
    out.push_back(f);
  }
  if (static_cast<int>(out.size()) < count) {
    throw Error(ErrorKind::DomainError, "could not place the requested test functions");
  }
  return out;
}

double w21_norm(const BumpTestFunction& psi, const Grid& grid) {
  const int d = grid.dim();
  double acc = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Point x = grid.node(i);
    const double v = psi.value(x);
    if (v == 0.0) continue;
    const auto g = psi.gradient(x);
    const auto h = psi.hessian(x);
    double s = std::abs(v);
    for (int a = 0; a < d; ++a) {
      s += std::abs(g[a]);
      for (int b = 0; b < d; ++b) s += std::abs(h[a * 3 + b]);
    }
    acc += s;
  }
  return acc * grid.cell_volume();
}

double distributional_residual(const FieldSample& u, const AcousticProblem& problem, int n_test,
                               const SeedSpec& seed) {
  problem.validate();
  const Grid& grid = problem.grid;
  if (!(u.grid() == grid) || u.components() != 1) {
    throw Error(ErrorKind::ShapeMismatch, "u must be a scalar field on the problem grid");
  }
  const double k2 = problem.k * problem.k;
  const double vol = grid.cell_volume();
  const double unorm = max_abs(u.values());
  const auto tests = random_test_functions(grid, problem.source, n_test, seed);
  const bool point = problem.source.kind == SourceSpec::Kind::Point;
  double worst = 0.0;
  for (const auto& psi : tests) {
    cplx lhs{}, forcing{};
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const Point x = grid.node(i);
      const double v = psi.value(x);
      if (v == 0.0) continue;
      lhs += u.at(i) * (psi.laplacian(x) + k2 * v) + k2 * problem.rho.at(i) * u.at(i) * v;
      if (!point) forcing += problem.source.field.at(i) * v;
    }
    lhs *= vol;
    forcing *= vol;
    if (point) forcing = -problem.source.point.amplitude[0] * psi.value(problem.source.point.location);
    const double num = std::abs(lhs - forcing);
    if (num == 0.0) continue;
    worst = std::max(worst, num / (unorm * w21_norm(psi, grid)));
  }
  return worst;
}

double distributional_residual(const FieldSample& u, const ElasticProblem& problem, int n_test,
                               const SeedSpec& seed) {
  problem.validate();
  const Grid& grid = problem.grid;
  const int d = grid.dim();
  if (!(u.grid() == grid) || u.components() != d) {
    throw Error(ErrorKind::ShapeMismatch, "u must be a vector field on the problem grid");
  }
  const auto& p = problem.params;
  const double k2 = p.k * p.k;
  const double vol = grid.cell_volume();
  const double unorm = max_abs(u.values());
  const auto tests = random_test_functions(grid, problem.source, n_test, seed);
  const bool point = problem.source.kind == SourceSpec::Kind::Point;
  double worst = 0.0;
  for (const auto& psi : tests) {
    const double w21 = w21_norm(psi, grid);
    for (int j = 0; j < d; ++j) {
      // Test function psi e_j.
      cplx lhs{}, forcing{};
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const Point x = grid.node(i);
        const double v = psi.value(x);
        if (v == 0.0) continue;
        const auto h = psi.hessian(x);
        double lap = 0.0;
        for (int a = 0; a < d; ++a) lap += h[a * 3 + a];
        cplx navier{};
        for (int a = 0; a < d; ++a) {
          const double op = (a == j ? p.mu * lap : 0.0) + (p.lambda + p.mu) * h[a * 3 + j];
          navier += u.at(i, a) * op;
        }
        cplx mu_j{};
        for (int b = 0; b < d; ++b) mu_j += problem.M.at(i, j * d + b) * u.at(i, b);
        lhs += navier + k2 * u.at(i, j) * v + k2 * mu_j * v;
        if (!point) forcing += problem.source.field.at(i, j) * v;
      }
      lhs *= vol;
      forcing *= vol;
      if (point) forcing = -problem.source.point.amplitude[j] * psi.value(problem.source.point.location);
      const double num = std::abs(lhs - forcing);
      if (num == 0.0) continue;
      worst = std::max(worst, num / (unorm * w21));
    }
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Exterior representation and radiation conditions

namespace {

struct ExteriorSources {
  std::vector<Point> positions;
  std::vector<std::array<cplx, 3>> strengths;  // already multiplied by the cell volume
};

// g = k^2 (medium u) - f, keeping only nonzero nodes.
template <class Problem>
ExteriorSources collect_sources(const FieldSample& u, const Problem& problem, const FieldSample& medium, double k2) {
  const Grid& grid = problem.grid;
  const int nc = u.components();
  const double vol = grid.cell_volume();
  const bool random = problem.source.kind == SourceSpec::Kind::RandomField;
  ExteriorSources s;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    std::array<cplx, 3> g{};
    bool nonzero = false;
    for (int a = 0; a < nc; ++a) {
      cplx mu{};
      if (nc == 1) {
        mu = medium.at(i) * u.at(i);
      } else {
        for (int b = 0; b < nc; ++b) mu += medium.at(i, a * nc + b) * u.at(i, b);
      }
      g[a] = vol * (k2 * mu - (random ? problem.source.field.at(i, a) : cplx{}));
      nonzero = nonzero || g[a] != cplx{};
    }
    if (nonzero) {
      s.positions.push_back(grid.node(i));
      s.strengths.push_back(g);
    }
  }
  return s;
}

void require_exterior(const Grid& grid, std::span<const double> radii) {
  const Box& box = grid.box();
  double half_diag = 0.0;
  for (int i = 0; i < box.dim; ++i) half_diag += 0.25 * box.extent(i) * box.extent(i);
  half_diag = std::sqrt(half_diag);
  if (radii.size() < 2) throw Error(ErrorKind::RadiiInsideSupport, "need at least two radii");
  for (double r : radii) {
    if (!(r > half_diag)) {
      throw Error(ErrorKind::RadiiInsideSupport, "radius " + std::to_string(r) + " does not clear the grid box");
    }
  }
}

std::vector<Point> ray_directions(int dim, int count) {
  std::vector<Point> dirs;
  if (dim == 2) {
    for (int a = 0; a < count; ++a) {
      const double t = 2.0 * std::numbers::pi * (a + 0.5) / count;
      dirs.push_back({std::cos(t), std::sin(t), 0.0});
    }
    return dirs;
  }
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int a = 0; a < count; ++a) {
    const double z = 1.0 - 2.0 * (a + 0.5) / count;
    const double r = std::sqrt(1.0 - z * z);
    dirs.push_back({r * std::cos(golden * a), r * std::sin(golden * a), z});
  }
  return dirs;
}

double log_log_slope(std::span<const double> radii, std::span<const double> values) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    lx.push_back(std::log(radii[i]));
    ly.push_back(std::log(std::max(values[i], 1e-300)));
  }
  return fit_line(lx, ly).slope;
}

struct AcousticExterior {
  cplx value;
  cplx radial;  // derivative along `dir`
};

AcousticExterior acoustic_exterior(const ExteriorSources& src, const AcousticProblem& problem, const Point& x,
                                   const Point& dir) {
  const int d = problem.grid.dim();
  AcousticExterior e{};
  auto add = [&](const Point& y, cplx strength) {
    Point diff{};
    double r = 0.0;
    for (int i = 0; i < d; ++i) {
      diff[i] = x[i] - y[i];
      r += diff[i] * diff[i];
    }
    r = std::sqrt(r);
    const greens::RadialProfile p = greens::phi_radial(r, problem.k, d);
    double cosang = 0.0;
    for (int i = 0; i < d; ++i) cosang += dir[i] * diff[i] / r;
    e.value += strength * p.value;
    e.radial += strength * p.d1 * cosang;
  };
  for (std::size_t j = 0; j < src.positions.size(); ++j) add(src.positions[j], src.strengths[j][0]);
  if (problem.source.kind == SourceSpec::Kind::Point) {
    add(problem.source.point.location, problem.source.point.amplitude[0]);
  }
  return e;
}

ElasticExteriorValue elastic_exterior(const ExteriorSources& src, const ElasticProblem& problem, const Point& x) {
  const int d = problem.grid.dim();
  ElasticExteriorValue v{};
  auto add = [&](const Point& y, const std::array<cplx, 3>& g) {
    const greens::Tensor full = greens::green_tensor_elastic(x, y, problem.params);
    const greens::Tensor comp = greens::green_tensor_compressional(x, y, problem.params);
    for (int a = 0; a < d; ++a) {
      for (int b = 0; b < d; ++b) {
        v.total[a] += full(a, b) * g[b];
        v.compressional[a] += comp(a, b) * g[b];
      }
    }
  };
  for (std::size_t j = 0; j < src.positions.size(); ++j) add(src.positions[j], src.strengths[j]);
  if (problem.source.kind == SourceSpec::Kind::Point) {
    std::array<cplx, 3> a{};
    for (int i = 0; i < d; ++i) a[i] = problem.source.point.amplitude[i];
    add(problem.source.point.location, a);
  }
  for (int a = 0; a < d; ++a) v.shear[a] = v.total[a] - v.compressional[a];
  return v;
}

}  // namespace

cplx represent_exterior(const FieldSample& u, const AcousticProblem& problem, const Point& x) {
  problem.validate();
  const auto src = collect_sources(u, problem, problem.rho, problem.k * problem.k);
  return acoustic_exterior(src, problem, x, Point{1.0, 0.0, 0.0}).value;
}

ElasticExteriorValue represent_exterior(const FieldSample& u, const ElasticProblem& problem, const Point& x) {
  problem.validate();
  const auto src = collect_sources(u, problem, problem.M, problem.params.k * problem.params.k);
  return elastic_exterior(src, problem, x);
}

RadiationResult radiation_check(const FieldSample& u, const AcousticProblem& problem, std::span<const double> radii,
                                int directions) {
  problem.validate();
  require_exterior(problem.grid, radii);
  const int d = problem.grid.dim();
  const auto src = collect_sources(u, problem, problem.rho, problem.k * problem.k);
  const auto dirs = ray_directions(d, directions);
  const Point c = problem.grid.box().center();
  const cplx ik{0.0, problem.k};
  RadiationResult out;
  out.radii.assign(radii.begin(), radii.end());
  for (double r : radii) {
    double acc = 0.0;
    for (const auto& dir : dirs) {
      Point x{};
      for (int i = 0; i < d; ++i) x[i] = c[i] + r * dir[i];
      const AcousticExterior e = acoustic_exterior(src, problem, x, dir);
      acc += std::abs(e.radial - ik * e.value);
    }
    out.residual.push_back(acc / static_cast<double>(dirs.size()));
  }
  out.slope = log_log_slope(out.radii, out.residual);
  return out;
}

RadiationResult radiation_check(const FieldSample& u, const ElasticProblem& problem, std::span<const double> radii,
                                int directions) {
  problem.validate();
  require_exterior(problem.grid, radii);
  const int d = problem.grid.dim();
  const auto src = collect_sources(u, problem, problem.M, problem.params.k * problem.params.k);
  const auto dirs = ray_directions(d, directions);
  const Point c = problem.grid.box().center();
  const auto kw = problem.params.kappas();
  const double step = 0.02 / std::max(kw.kappa_p, kw.kappa_s);
  RadiationResult out;
  out.radii.assign(radii.begin(), radii.end());
  for (double r : radii) {
    double acc_p = 0.0, acc_s = 0.0;
    for (const auto& dir : dirs) {
      // Fourth-order central difference along the ray.
      std::array<ElasticExteriorValue, 5> samples;
      for (int m = -2; m <= 2; ++m) {
        Point x{};
        for (int i = 0; i < d; ++i) x[i] = c[i] + (r + m * step) * dir[i];
        samples[m + 2] = elastic_exterior(src, problem, x);
      }
      double res_p = 0.0, res_s = 0.0;
      for (int a = 0; a < d; ++a) {
        const cplx dp = ((samples[0].compressional[a] - samples[4].compressional[a]) +
                         8.0 * (samples[3].compressional[a] - samples[1].compressional[a])) /
                        (12.0 * step);
        const cplx ds = ((samples[0].shear[a] - samples[4].shear[a]) +
                         8.0 * (samples[3].shear[a] - samples[1].shear[a])) /
                        (12.0 * step);
        res_p += std::norm(dp - cplx{0.0, kw.kappa_p} * samples[2].compressional[a]);
        res_s += std::norm(ds - cplx{0.0, kw.kappa_s} * samples[2].shear[a]);
      }
      acc_p += std::sqrt(res_p);
      acc_s += std::sqrt(res_s);
    }
    out.residual.push_back(acc_p / static_cast<double>(dirs.size()));
    out.residual_shear.push_back(acc_s / static_cast<double>(dirs.size()));
  }
  out.slope = log_log_slope(out.radii, out.residual);
  out.slope_shear = log_log_slope(out.radii, out.residual_shear);
  return out;
}

}  // namespace scatterlab::ls
