#include "scatterlab/random_fields.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "scatterlab/fft.hpp"

namespace scatterlab::fields {

double bump_profile(double s) {
  if (s >= 1.0 || s < 0.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - s));
}

double StrengthFunction::rescaled_radius2(const Point& x) const {
  double s = 0.0;
  for (int i = 0; i < support.dim; ++i) {
    const double half = 0.5 * support.extent(i);
    const double c = 0.5 * (support.lower[i] + support.upper[i]);
    const double t = (x[i] - c) / half;
    s += t * t;
  }
  return s;
}

double StrengthFunction::operator()(const Point& x) const {
  if (amplitude == 0.0) return 0.0;
  return amplitude * bump_profile(rescaled_radius2(x));
}

std::string StrengthFunction::id() const {
  std::ostringstream os;
  os.precision(17);
  os << "bump(";
  for (int i = 0; i < support.dim; ++i) os << (i ? "," : "") << support.lower[i];
  os << ";";
  for (int i = 0; i < support.dim; ++i) os << (i ? "," : "") << support.upper[i];
  os << ")*" << amplitude;
  return os.str();
}

const StrengthFunction& RandomFieldSpec::strength(int component) const {
  if (strengths.size() == 1) return strengths.front();
  return strengths.at(static_cast<std::size_t>(component));
}

void RandomFieldSpec::validate() const {
  if (dim != 2 && dim != 3) throw Error(ErrorKind::DomainError, "field dimension must be 2 or 3");
  if (!(order >= 0.0 && order < dim + 2.0)) {
    throw Error(ErrorKind::OrderOutOfRange, "order m must lie in [0, d+2)");
  }
  const auto n = strengths.size();
  if (n != 1 && n != static_cast<std::size_t>(components())) {
    throw Error(ErrorKind::ShapeMismatch, "need one strength function or one per component");
  }
  for (const auto& s : strengths) {
    if (s.support.dim != dim) throw Error(ErrorKind::ShapeMismatch, "strength support dimension mismatch");
    s.support.validate();
    if (!(s.amplitude >= 0.0)) throw Error(ErrorKind::DomainError, "strength amplitude must be >= 0");
  }
}

FieldSample sample_white_noise(const Grid& grid, const SeedSpec& seed) {
  FieldMeta meta;
  meta.seed = seed;
  meta.stochastic = true;
  meta.generator = "white_noise";
  FieldSample w(grid, FieldShape::scalar(grid.dim()), true, meta);
  Rng rng(seed);
  const double sd = 1.0 / std::sqrt(grid.cell_volume());
  for (auto& v : w.values()) v = {sd * rng.normal(), 0.0};
  return w;
}

FieldSample sample_fgf(double order, const Grid& grid, const SeedSpec& seed) {
  const int d = grid.dim();
  if (!(order >= 0.0 && order < d + 2.0)) {
    throw Error(ErrorKind::OrderOutOfRange, "order m must lie in [0, d+2)");
  }
  FieldSample h = sample_white_noise(grid, seed);
  h.meta().generator = "fgf";
  h.meta().order = order;

  std::vector<std::size_t> dims(grid.counts().begin(), grid.counts().begin() + d);
  const auto plan = FftPlan::get(dims);
  auto values = h.values();
  plan->forward(values);

  std::array<double, 3> dxi{};
  for (int i = 0; i < d; ++i) dxi[i] = 2.0 * std::numbers::pi / grid.box().extent(i);
  const double exponent = -0.25 * order;  // |xi|^{-m/2} = (|xi|^2)^{-m/4}
  const double inv_n = 1.0 / static_cast<double>(grid.size());
  for (std::size_t lin = 0; lin < grid.size(); ++lin) {
    const auto idx = grid.unravel(lin);
    double xi2 = 0.0;
    for (int i = 0; i < d; ++i) {
      const double xi = dxi[i] * static_cast<double>(fft_frequency_index(idx[i], grid.n(i)));
      xi2 += xi * xi;
    }
    const double mult = xi2 == 0.0 ? 0.0 : std::pow(xi2, exponent);
    values[lin] *= mult * inv_n;
  }
  plan->backward(values);
  for (auto& v : values) v = {v.real(), 0.0};
  return h;
}

FieldSample localize(const FieldSample& h, const StrengthFunction& strength) {
  const Grid& grid = h.grid();
  const Box& box = grid.box();
  Point margin{};
  for (int i = 0; i < box.dim; ++i) margin[i] = 0.25 * box.extent(i) * (1.0 - 1e-12);
  if (strength.support.dim != box.dim || !box.contains(strength.support, margin)) {
    throw Error(ErrorKind::SupportNotContained,
                "strength support must sit inside the grid box at least a quarter box length from its boundary");
  }
  FieldSample rho = h;
  rho.meta().strength = strength.id();
  const int nc = h.components();
  for (std::size_t lin = 0; lin < grid.size(); ++lin) {
    const double w = std::sqrt(strength(grid.node(lin)));
    for (int c = 0; c < nc; ++c) rho.at(lin, c) *= w;
  }
  return rho;
}

FieldSample sample_medium(const RandomFieldSpec& spec, const Grid& grid, const SeedSpec& seed) {
  spec.validate();
  if (spec.dim != grid.dim()) throw Error(ErrorKind::ShapeMismatch, "field spec and grid dimension differ");
  const int nc = spec.components();
  FieldMeta meta;
  meta.seed = seed;
  meta.stochastic = true;
  meta.generator = "fgf";
  meta.order = spec.order;
  meta.strength = spec.strengths.size() == 1 ? spec.strengths.front().id() : "per-component";
  FieldSample out(grid, FieldShape{spec.shape, spec.dim}, true, meta);
  for (int c = 0; c < nc; ++c) {
    const FieldSample comp =
        localize(sample_fgf(spec.order, grid, derive_stream(seed, "component", static_cast<std::uint64_t>(c))),
                 spec.strength(c));
    for (std::size_t lin = 0; lin < grid.size(); ++lin) out.at(lin, c) = comp.at(lin);
  }
  return out;
}

double empirical_covariance(std::span<const FieldSample> samples, std::size_t x, std::size_t y, int comp) {
  if (samples.size() < 2) throw Error(ErrorKind::InsufficientSamples, "covariance needs at least two samples");
  const Grid& grid = samples.front().grid();
  double mx = 0.0, my = 0.0;
  for (const auto& s : samples) {
    if (!(s.grid() == grid)) throw Error(ErrorKind::ShapeMismatch, "samples live on different grids");
    mx += s.at(x, comp).real();
    my += s.at(y, comp).real();
  }
  const double n = static_cast<double>(samples.size());
  mx /= n;
  my /= n;
  double acc = 0.0;
  for (const auto& s : samples) acc += (s.at(x, comp).real() - mx) * (s.at(y, comp).real() - my);
  return acc / (n - 1.0);
}

}  // namespace scatterlab::fields
