#include "scatterlab/greens.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <queue>
#include <tuple>

#include "scatterlab/specfun.hpp"

namespace scatterlab::greens {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr cplx kI{0.0, 1.0};

void require_dim(int dim) {
  if (dim != 2 && dim != 3) throw Error(ErrorKind::DomainError, "dimension must be 2 or 3");
}

struct Separation {
  double r;
  Point unit;
};

Separation separation(const Point& x, const Point& y, int dim) {
  Separation s{0.0, {}};
  for (int i = 0; i < dim; ++i) {
    s.unit[i] = x[i] - y[i];
    s.r += s.unit[i] * s.unit[i];
  }
  s.r = std::sqrt(s.r);
  if (!(s.r > 0.0)) throw Error(ErrorKind::CoincidentPoints, "kernel evaluated at coincident points");
  for (int i = 0; i < dim; ++i) s.unit[i] /= s.r;
  return s;
}

// g'' rr^T + (g'/r)(I - rr^T)
Tensor radial_hessian(const Point& unit, double r, cplx d1, cplx d2, int dim) {
  Tensor t;
  t.dim = dim;
  const cplx tangential = d1 / r;
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      const double rr = unit[i] * unit[j];
      t(i, j) = d2 * rr + tangential * ((i == j ? 1.0 : 0.0) - rr);
    }
  }
  return t;
}

}  // namespace

double Tensor::max_abs() const {
  double m = 0.0;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) m = std::max(m, std::abs((*this)(i, j)));
  return m;
}

void AcousticKernelParams::validate() const {
  require_dim(dim);
  if (!(k > 0.0) || !std::isfinite(k)) throw Error(ErrorKind::DomainError, "wavenumber must be positive");
}

Wavenumbers wavenumbers(double k, double lambda, double mu) {
  if (!(mu > 0.0) || !(lambda + 2.0 * mu > 0.0)) {
    throw Error(ErrorKind::InvalidLame, "need mu > 0 and lambda + 2 mu > 0");
  }
  return {k / std::sqrt(lambda + 2.0 * mu), k / std::sqrt(mu)};
}

void ElasticKernelParams::validate() const {
  require_dim(dim);
  if (!(k > 0.0) || !std::isfinite(k)) throw Error(ErrorKind::DomainError, "wavenumber must be positive");
  (void)wavenumbers(k, lambda, mu);
}

RadialProfile phi_radial(double r, double k, int dim) {
  if (!(r > 0.0)) throw Error(ErrorKind::DomainError, "Green function needs r > 0");
  require_dim(dim);
  if (dim == 2) {
    const double z = k * r;
    const cplx h0 = specfun::hankel1(0, z);
    const cplx h1 = specfun::hankel1(1, z);
    const cplx q = 0.25 * kI;
    return {q * h0, -q * k * h1, -q * k * k * (h0 - h1 / z)};
  }
  const cplx e = std::exp(kI * (k * r));
  const double c = 1.0 / (4.0 * kPi);
  const cplx ikr = kI * (k * r);
  return {c * e / r, c * e * (ikr - 1.0) / (r * r), c * e * (2.0 - 2.0 * ikr - k * k * r * r) / (r * r * r)};
}

cplx phi_acoustic(double r, const AcousticKernelParams& params) {
  params.validate();
  if (!(r > 0.0)) throw Error(ErrorKind::DomainError, "Green function needs r > 0");
  if (params.dim == 2) return 0.25 * kI * specfun::hankel1(0, params.k * r);
  return std::exp(kI * (params.k * r)) / (4.0 * kPi * r);
}

cplx phi_acoustic(const Point& x, const Point& y, const AcousticKernelParams& params) {
  return phi_acoustic(distance(x, y, params.dim), params);
}

std::array<cplx, 3> grad_phi_acoustic(const Point& x, const Point& y, const AcousticKernelParams& params) {
  const Separation s = separation(x, y, params.dim);
  const RadialProfile p = phi_radial(s.r, params.k, params.dim);
  std::array<cplx, 3> g{};
  for (int i = 0; i < params.dim; ++i) g[i] = p.d1 * s.unit[i];
  return g;
}

Tensor hessian_phi(const Point& x, const Point& y, double k, int dim) {
  const Separation s = separation(x, y, dim);
  const RadialProfile p = phi_radial(s.r, k, dim);
  return radial_hessian(s.unit, s.r, p.d1, p.d2, dim);
}

Tensor green_tensor_elastic(const Point& x, const Point& y, const ElasticKernelParams& params) {
  const Separation s = separation(x, y, params.dim);
  const Wavenumbers kw = params.kappas();
  const RadialProfile ps = phi_radial(s.r, kw.kappa_s, params.dim);
  const RadialProfile pp = phi_radial(s.r, kw.kappa_p, params.dim);
  const double inv_k2 = 1.0 / (params.k * params.k);
  Tensor t = radial_hessian(s.unit, s.r, inv_k2 * (ps.d1 - pp.d1), inv_k2 * (ps.d2 - pp.d2), params.dim);
  for (int i = 0; i < params.dim; ++i) t(i, i) += ps.value / params.mu;
  return t;
}

Tensor green_tensor_compressional(const Point& x, const Point& y, const ElasticKernelParams& params) {
  const Separation s = separation(x, y, params.dim);
  const RadialProfile pp = phi_radial(s.r, params.kappas().kappa_p, params.dim);
  const double inv_k2 = 1.0 / (params.k * params.k);
  return radial_hessian(s.unit, s.r, -inv_k2 * pp.d1, -inv_k2 * pp.d2, params.dim);
}

double equal_volume_radius(const Grid& grid) {
  const double v = grid.cell_volume();
  if (grid.dim() == 2) return std::sqrt(v / kPi);
  return std::cbrt(3.0 * v / (4.0 * kPi));
}

cplx singular_cell_weight_acoustic(const Grid& grid, const AcousticKernelParams& params) {
  params.validate();
  const double k = params.k;
  const double radius = equal_volume_radius(grid);
  if (grid.dim() == 2) {
    // d/dr [r H1(kr)] = k r H0(kr); r H1(kr) -> -2i/(pi k) as r -> 0.
    return (kI * kPi * radius / (2.0 * k)) * specfun::hankel1(1, k * radius) - 1.0 / (k * k);
  }
  const cplx e = std::exp(kI * (k * radius));
  return e * (radius / (kI * k) + 1.0 / (k * k)) - 1.0 / (k * k);
}

// ---------------------------------------------------------------------------
// Elastic self-cell weight

namespace {

// Gauss-Kronrod 7/15 abscissae and weights on [-1, 1].
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Direction {
  Point unit;
  double weight;
};

// Angular rules exact for the quadratic dependence of the tensor on the direction.
std::vector<Direction> angular_rule(int dim) {
  std::vector<Direction> rule;
  if (dim == 2) {
    constexpr int n = 8;
    for (int a = 0; a < n; ++a) {
      const double t = 0.3 + 2.0 * kPi * a / n;
      rule.push_back({{std::cos(t), std::sin(t), 0.0}, 2.0 * kPi / n});
    }
    return rule;
  }
  // Icosahedron vertices: a spherical 5-design.
  const double phi = 0.5 * (1.0 + std::sqrt(5.0));
  const double norm = std::sqrt(1.0 + phi * phi);
  for (double s1 : {-1.0, 1.0}) {
    for (double s2 : {-1.0, 1.0}) {
      const double a = s1 / norm;
      const double b = s2 * phi / norm;
      rule.push_back({{0.0, a, b}, 0.0});
      rule.push_back({{a, b, 0.0}, 0.0});
      rule.push_back({{b, 0.0, a}, 0.0});
    }
  }
  for (auto& d : rule) d.weight = 4.0 * kPi / 12.0;
  return rule;
}

struct Segment {
  double a, b;
  Tensor kronrod;
  double error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

template <class F>
Segment gauss_kronrod(const F& f, double a, double b, int dim) {
  const double c = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  Tensor k, g;
  k.dim = g.dim = dim;
  auto accumulate = [&](Tensor& acc, const Tensor& v, double w) {
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) acc(i, j) += w * v(i, j);
  };
  const Tensor fc = f(c);
  accumulate(k, fc, kWgk[7]);
  accumulate(g, fc, kWg[3]);
  for (int n = 0; n < 7; ++n) {
    const double dx = half * kXgk[n];
    const Tensor f1 = f(c - dx);
    const Tensor f2 = f(c + dx);
    accumulate(k, f1, kWgk[n]);
    accumulate(k, f2, kWgk[n]);
    if (n % 2 == 1) {
      accumulate(g, f1, kWg[n / 2]);
      accumulate(g, f2, kWg[n / 2]);
    }
  }
  double err = 0.0;
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      k(i, j) *= half;
      g(i, j) *= half;
      err = std::max(err, std::abs(k(i, j) - g(i, j)));
    }
  }
  return {a, b, k, err};
}

Tensor integrate_elastic_ball(const ElasticKernelParams& params, double radius) {
  const int dim = params.dim;
  const auto rule = angular_rule(dim);
  const Point origin{};
  auto radial = [&](double r) {
    Tensor acc;
    acc.dim = dim;
    const double jac = dim == 2 ? r : r * r;
    for (const auto& d : rule) {
      Point x{};
      for (int i = 0; i < dim; ++i) x[i] = r * d.unit[i];
      const Tensor g = green_tensor_elastic(x, origin, params);
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) acc(i, j) += (d.weight * jac) * g(i, j);
    }
    return acc;
  };

  constexpr double kAbsTol = 1e-13;
  constexpr double kRelTol = 1e-12;
  constexpr double kStallThreshold = 1e-8;
  constexpr int kMaxSegments = 4000;

  auto add = [dim](Tensor& acc, const Tensor& v, double sign) {
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) acc(i, j) += sign * v(i, j);
  };

  std::priority_queue<Segment> heap;
  heap.push(gauss_kronrod(radial, 0.0, radius, dim));
  Tensor total = heap.top().kronrod;
  double total_err = heap.top().error;
  for (int iter = 0; iter < kMaxSegments; ++iter) {
    if (total_err <= std::max(kAbsTol, kRelTol * total.max_abs())) return total;
    const Segment worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break;
    heap.pop();
    Segment left = gauss_kronrod(radial, worst.a, mid, dim);
    Segment right = gauss_kronrod(radial, mid, worst.b, dim);
    add(total, worst.kronrod, -1.0);
    add(total, left.kronrod, 1.0);
    add(total, right.kronrod, 1.0);
    total_err += left.error + right.error - worst.error;
    heap.push(std::move(left));
    heap.push(std::move(right));
  }
  // Refinement stalled; accept only below the stall threshold.
  total_err = 0.0;
  total = Tensor{};
  total.dim = dim;
  while (!heap.empty()) {
    total_err += heap.top().error;
    add(total, heap.top().kronrod, 1.0);
    heap.pop();
  }
  if (total_err > kStallThreshold * std::max(1.0, total.max_abs())) {
    throw Error(ErrorKind::QuadratureNoConvergence,
                "elastic self-cell quadrature stalled at error " + std::to_string(total_err));
  }
  return total;
}

}  // namespace

Tensor singular_cell_weight_elastic(const Grid& grid, const ElasticKernelParams& params) {
  params.validate();
  if (grid.dim() != params.dim) throw Error(ErrorKind::ShapeMismatch, "grid and kernel dimension differ");
  using Key = std::tuple<int, double, double, double, double>;
  static std::mutex mutex;
  static std::map<Key, Tensor> cache;
  const double radius = equal_volume_radius(grid);
  const Key key{params.dim, radius, params.k, params.lambda, params.mu};
  {
    std::lock_guard lock(mutex);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  const Tensor w = integrate_elastic_ball(params, radius);
  std::lock_guard lock(mutex);
  return cache.emplace(key, w).first->second;
}

}  // namespace scatterlab::greens
