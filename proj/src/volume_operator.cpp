#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

#include "scatterlab/ls_solver.hpp"

namespace scatterlab::ls {

struct VolumeOperator::Spectra {
  std::vector<std::size_t> padded_dims;
  std::size_t padded_size = 0;
  int components = 1;
  /// Kernel transforms, block (a, b) at index a * components + b.
  std::vector<std::vector<cplx>> blocks;
  /// Padded linear index of every grid node.
  std::vector<std::size_t> node_to_padded;
};

namespace {

using Offset = std::array<long, 3>;

greens::Tensor scalar_tensor(cplx v) {
  greens::Tensor t;
  t.dim = 1;
  t(0, 0) = v;
  return t;
}

// Weight block for an integer node offset. Both the FFT kernel and the dense
// oracle go through here so that they see bit-identical weights.
greens::Tensor kernel_block(Physics physics, const Grid& grid, const Offset& offset,
                            const greens::AcousticKernelParams& ap, const greens::ElasticKernelParams& ep,
                            const greens::Tensor& self_weight) {
  const int d = grid.dim();
  bool zero = true;
  Point delta{};
  for (int i = 0; i < d; ++i) {
    delta[i] = static_cast<double>(offset[i]) * grid.spacing(i);
    zero = zero && offset[i] == 0;
  }
  if (zero) return self_weight;
  const Point origin{};
  const double v = grid.cell_volume();
  if (physics == Physics::Acoustic) return scalar_tensor(v * greens::phi_acoustic(delta, origin, ap));
  greens::Tensor t = greens::green_tensor_elastic(delta, origin, ep);
  for (auto& z : t.a) z *= v;
  return t;
}

std::string spectra_key(Physics physics, const Grid& grid, const greens::AcousticKernelParams& ap,
                        const greens::ElasticKernelParams& ep) {
  std::ostringstream os;
  os.precision(17);
  os << (physics == Physics::Acoustic ? "A" : "E") << grid.dim();
  for (int i = 0; i < grid.dim(); ++i) os << ":" << grid.n(i) << "/" << grid.spacing(i);
  if (physics == Physics::Acoustic) {
    os << "|k=" << ap.k;
  } else {
    os << "|k=" << ep.k << "|l=" << ep.lambda << "|m=" << ep.mu;
  }
  return os.str();
}

}  // namespace

namespace {

std::shared_ptr<const VolumeOperator::Spectra> build_spectra(Physics physics, const Grid& grid,
                                                             const greens::AcousticKernelParams& ap,
                                                             const greens::ElasticKernelParams& ep,
                                                             const greens::Tensor& self_weight, int nc) {
  auto s = std::make_shared<VolumeOperator::Spectra>();
  const int d = grid.dim();
  s->components = nc;
  s->padded_size = 1;
  for (int i = 0; i < d; ++i) {
    s->padded_dims.push_back(2 * grid.n(i));
    s->padded_size *= 2 * grid.n(i);
  }
  s->node_to_padded.resize(grid.size());
  for (std::size_t lin = 0; lin < grid.size(); ++lin) {
    const auto idx = grid.unravel(lin);
    std::size_t p = 0;
    for (int i = 0; i < d; ++i) p = p * s->padded_dims[i] + idx[i];
    s->node_to_padded[lin] = p;
  }

  s->blocks.assign(static_cast<std::size_t>(nc * nc), std::vector<cplx>(s->padded_size, cplx{}));
  std::array<std::size_t, 3> pidx{0, 0, 0};
  for (std::size_t p = 0; p < s->padded_size; ++p) {
    std::size_t rem = p;
    for (int i = d - 1; i >= 0; --i) {
      pidx[i] = rem % s->padded_dims[i];
      rem /= s->padded_dims[i];
    }
    Offset off{0, 0, 0};
    bool unused = false;
    for (int i = 0; i < d; ++i) {
      off[i] = fft_frequency_index(pidx[i], s->padded_dims[i]);
      // Offset -n never occurs between nodes of an n-point axis.
      unused = unused || off[i] == -static_cast<long>(grid.n(i));
    }
    if (unused) continue;
    const greens::Tensor w = kernel_block(physics, grid, off, ap, ep, self_weight);
    for (int a = 0; a < nc; ++a)
      for (int b = 0; b < nc; ++b) s->blocks[a * nc + b][p] = w(a, b);
  }
  const auto plan = FftPlan::get(s->padded_dims);
  for (auto& blk : s->blocks) plan->forward(blk);
  return s;
}

std::shared_ptr<const VolumeOperator::Spectra> cached_spectra(Physics physics, const Grid& grid,
                                                              const greens::AcousticKernelParams& ap,
                                                              const greens::ElasticKernelParams& ep,
                                                              const greens::Tensor& self_weight, int nc) {
  static std::mutex mutex;
  static std::map<std::string, std::shared_ptr<const VolumeOperator::Spectra>> cache;
  const std::string key = spectra_key(physics, grid, ap, ep);
  {
    std::lock_guard lock(mutex);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  auto s = build_spectra(physics, grid, ap, ep, self_weight, nc);
  std::lock_guard lock(mutex);
  // Bounded cache: Monte Carlo runs reuse a handful of grids.
  if (cache.size() > 32) cache.clear();
  return cache.emplace(key, std::move(s)).first->second;
}

}  // namespace

VolumeOperator VolumeOperator::acoustic(const Grid& grid, const greens::AcousticKernelParams& params) {
  params.validate();
  if (params.dim != grid.dim()) throw Error(ErrorKind::ShapeMismatch, "grid and kernel dimension differ");
  VolumeOperator op;
  op.physics_ = Physics::Acoustic;
  op.grid_ = grid;
  op.components_ = 1;
  op.acoustic_ = params;
  op.self_weight_ = scalar_tensor(greens::singular_cell_weight_acoustic(grid, params));
  op.spectra_ = cached_spectra(op.physics_, grid, params, {}, op.self_weight_, 1);
  op.plan_ = FftPlan::get(op.spectra_->padded_dims);
  return op;
}

VolumeOperator VolumeOperator::elastic(const Grid& grid, const greens::ElasticKernelParams& params) {
  params.validate();
  if (params.dim != grid.dim()) throw Error(ErrorKind::ShapeMismatch, "grid and kernel dimension differ");
  VolumeOperator op;
  op.physics_ = Physics::Elastic;
  op.grid_ = grid;
  op.components_ = grid.dim();
  op.elastic_ = params;
  op.self_weight_ = greens::singular_cell_weight_elastic(grid, params);
  op.spectra_ = cached_spectra(op.physics_, grid, {}, params, op.self_weight_, op.components_);
  op.plan_ = FftPlan::get(op.spectra_->padded_dims);
  return op;
}

greens::Tensor VolumeOperator::weight(std::size_t row, std::size_t col) const {
  const auto ri = grid_.unravel(row);
  const auto ci = grid_.unravel(col);
  Offset off{0, 0, 0};
  for (int i = 0; i < grid_.dim(); ++i) off[i] = static_cast<long>(ri[i]) - static_cast<long>(ci[i]);
  return kernel_block(physics_, grid_, off, acoustic_, elastic_, self_weight_);
}

void VolumeOperator::apply(std::span<const cplx> in, std::span<cplx> out) const {
  if (in.size() != unknowns() || out.size() != unknowns()) {
    throw Error(ErrorKind::ShapeMismatch, "operator input/output length does not match the grid");
  }
  const auto& s = *spectra_;
  const int nc = components_;
  const std::size_t np = s.padded_size;
  std::vector<cplx> padded(static_cast<std::size_t>(nc) * np, cplx{});
  std::vector<cplx> result(static_cast<std::size_t>(nc) * np, cplx{});
  for (int b = 0; b < nc; ++b) {
    std::span<cplx> pb(padded.data() + b * np, np);
    for (std::size_t lin = 0; lin < grid_.size(); ++lin) pb[s.node_to_padded[lin]] = in[lin * nc + b];
    plan_->forward(pb);
  }
  for (int a = 0; a < nc; ++a) {
    cplx* ra = result.data() + a * np;
    for (int b = 0; b < nc; ++b) {
      const cplx* kb = s.blocks[a * nc + b].data();
      const cplx* pb = padded.data() + b * np;
      for (std::size_t p = 0; p < np; ++p) ra[p] += kb[p] * pb[p];
    }
    plan_->backward(std::span<cplx>(ra, np));
  }
  const double scale = 1.0 / static_cast<double>(np);
  for (std::size_t lin = 0; lin < grid_.size(); ++lin) {
    for (int a = 0; a < nc; ++a) out[lin * nc + a] = result[a * np + s.node_to_padded[lin]] * scale;
  }
}

// ---------------------------------------------------------------------------
// Problems

SourceSpec SourceSpec::random_field(FieldSample f) {
  SourceSpec s;
  s.kind = Kind::RandomField;
  s.field = std::move(f);
  return s;
}

SourceSpec SourceSpec::point_source(const Point& y, std::span<const double> amplitude) {
  SourceSpec s;
  s.kind = Kind::Point;
  s.point.location = y;
  s.point.amplitude = {0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < amplitude.size() && i < 3; ++i) s.point.amplitude[i] = amplitude[i];
  return s;
}

namespace {

void validate_source(const SourceSpec& source, const Grid& grid, int components) {
  if (source.kind == SourceSpec::Kind::RandomField) {
    if (!(source.field.grid() == grid) || source.field.components() != components) {
      throw Error(ErrorKind::ShapeMismatch, "random source must live on the problem grid with matching shape");
    }
    return;
  }
  const Point& y = source.point.location;
  const Box& box = grid.box();
  for (int i = 0; i < grid.dim(); ++i) {
    if (!(y[i] > box.lower[i] && y[i] < box.upper[i])) {
      throw Error(ErrorKind::SupportNotContained, "point source must lie strictly inside the grid box");
    }
  }
  bool on_node = true;
  for (int i = 0; i < grid.dim(); ++i) {
    const double t = (y[i] - box.lower[i]) / grid.spacing(i) - 0.5;
    on_node = on_node && std::abs(t - std::round(t)) < 1e-8;
  }
  if (on_node) throw Error(ErrorKind::PointSourceOnGridNode, "point source coincides with a grid node");
}

}  // namespace

void AcousticProblem::validate() const {
  kernel().validate();
  if (!(rho.grid() == grid) || rho.components() != 1) {
    throw Error(ErrorKind::ShapeMismatch, "rho must be a scalar field on the problem grid");
  }
  validate_source(source, grid, 1);
}

void ElasticProblem::validate() const {
  params.validate();
  if (params.dim != grid.dim()) throw Error(ErrorKind::ShapeMismatch, "Lame parameter dimension differs from grid");
  if (!(M.grid() == grid) || M.components() != grid.dim() * grid.dim()) {
    throw Error(ErrorKind::ShapeMismatch, "M must be a matrix field on the problem grid");
  }
  validate_source(source, grid, grid.dim());
}

FieldSample zero_medium(const Grid& grid, FieldKind shape) {
  FieldMeta meta;
  meta.generator = "zero";
  return FieldSample(grid, FieldShape{shape, grid.dim()}, true, meta);
}

FieldSample apply_Hk(const FieldSample& v, const greens::AcousticKernelParams& params) {
  if (v.components() != 1) throw Error(ErrorKind::ShapeMismatch, "acoustic H_k acts on scalar fields");
  const auto op = VolumeOperator::acoustic(v.grid(), params);
  FieldSample out(v.grid(), v.shape(), false);
  op.apply(v.values(), out.values());
  return out;
}

FieldSample apply_Hk(const FieldSample& v, const greens::ElasticKernelParams& params) {
  if (v.shape().kind != FieldKind::Vector) throw Error(ErrorKind::ShapeMismatch, "elastic H_k acts on vector fields");
  const auto op = VolumeOperator::elastic(v.grid(), params);
  FieldSample out(v.grid(), v.shape(), false);
  op.apply(v.values(), out.values());
  return out;
}

namespace {

FieldSample pointwise_scalar(const FieldSample& rho, const FieldSample& v) {
  if (!(rho.grid() == v.grid()) || v.components() != 1) {
    throw Error(ErrorKind::ShapeMismatch, "rho v needs a scalar field on the medium grid");
  }
  FieldSample out(v.grid(), v.shape(), false);
  for (std::size_t i = 0; i < v.grid().size(); ++i) out.at(i) = rho.at(i) * v.at(i);
  return out;
}

FieldSample pointwise_matrix(const FieldSample& M, const FieldSample& v) {
  const int d = v.grid().dim();
  if (!(M.grid() == v.grid()) || v.components() != d) {
    throw Error(ErrorKind::ShapeMismatch, "M v needs a vector field on the medium grid");
  }
  FieldSample out(v.grid(), v.shape(), false);
  for (std::size_t i = 0; i < v.grid().size(); ++i) {
    for (int a = 0; a < d; ++a) {
      cplx acc{};
      for (int b = 0; b < d; ++b) acc += M.at(i, a * d + b) * v.at(i, b);
      out.at(i, a) = acc;
    }
  }
  return out;
}

}  // namespace

FieldSample apply_Kk(const FieldSample& v, const AcousticProblem& problem) {
  return apply_Hk(pointwise_scalar(problem.rho, v), problem.kernel());
}

FieldSample apply_Kk(const FieldSample& v, const ElasticProblem& problem) {
  return apply_Hk(pointwise_matrix(problem.M, v), problem.params);
}

FieldSample assemble_rhs(const AcousticProblem& problem) {
  problem.validate();
  const Grid& grid = problem.grid;
  if (problem.source.kind == SourceSpec::Kind::RandomField) {
    FieldSample rhs = apply_Hk(problem.source.field, problem.kernel());
    for (auto& z : rhs.values()) z = -z;
    return rhs;
  }
  FieldSample rhs(grid, FieldShape::scalar(grid.dim()), false);
  const auto& ps = problem.source.point;
  const auto params = problem.kernel();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    rhs.at(i) = ps.amplitude[0] * greens::phi_acoustic(grid.node(i), ps.location, params);
  }
  return rhs;
}

FieldSample assemble_rhs(const ElasticProblem& problem) {
  problem.validate();
  const Grid& grid = problem.grid;
  const int d = grid.dim();
  if (problem.source.kind == SourceSpec::Kind::RandomField) {
    FieldSample rhs = apply_Hk(problem.source.field, problem.params);
    for (auto& z : rhs.values()) z = -z;
    return rhs;
  }
  FieldSample rhs(grid, FieldShape::vector(d), false);
  const auto& ps = problem.source.point;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const greens::Tensor g = greens::green_tensor_elastic(grid.node(i), ps.location, problem.params);
    for (int a = 0; a < d; ++a) {
      cplx acc{};
      for (int b = 0; b < d; ++b) acc += g(a, b) * ps.amplitude[b];
      rhs.at(i, a) = acc;
    }
  }
  return rhs;
}

// ---------------------------------------------------------------------------
// System

LippmannSchwingerSystem::LippmannSchwingerSystem(const AcousticProblem& problem)
    : op_(VolumeOperator::acoustic(problem.grid, problem.kernel())), k2_(problem.k * problem.k) {
  problem.validate();
  medium_.assign(problem.rho.values().begin(), problem.rho.values().end());
}

LippmannSchwingerSystem::LippmannSchwingerSystem(const ElasticProblem& problem)
    : op_(VolumeOperator::elastic(problem.grid, problem.params)), k2_(problem.params.k * problem.params.k) {
  problem.validate();
  medium_.assign(problem.M.values().begin(), problem.M.values().end());
}

void LippmannSchwingerSystem::multiply_medium(std::span<const cplx> in, std::span<cplx> out) const {
  const int nc = op_.components();
  const std::size_t nodes = op_.grid().size();
  if (nc == 1) {
    for (std::size_t i = 0; i < nodes; ++i) out[i] = medium_[i] * in[i];
    return;
  }
  for (std::size_t i = 0; i < nodes; ++i) {
    const cplx* m = medium_.data() + i * nc * nc;
    const cplx* v = in.data() + i * nc;
    for (int a = 0; a < nc; ++a) {
      cplx acc{};
      for (int b = 0; b < nc; ++b) acc += m[a * nc + b] * v[b];
      out[i * nc + a] = acc;
    }
  }
}

void LippmannSchwingerSystem::apply_scattering(std::span<const cplx> in, std::span<cplx> out) const {
  std::vector<cplx> tmp(in.size());
  multiply_medium(in, tmp);
  op_.apply(tmp, out);
  for (auto& z : out) z *= k2_;
}

void LippmannSchwingerSystem::apply(std::span<const cplx> in, std::span<cplx> out) const {
  apply_scattering(in, out);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = in[i] - out[i];
}

}  // namespace scatterlab::ls
