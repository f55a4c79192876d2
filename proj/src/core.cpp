#include "scatterlab/core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace scatterlab {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidBox: return "InvalidBox";
    case ErrorKind::TooCoarse: return "TooCoarse";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::OrderOutOfRange: return "OrderOutOfRange";
    case ErrorKind::SupportNotContained: return "SupportNotContained";
    case ErrorKind::InsufficientSamples: return "InsufficientSamples";
    case ErrorKind::InvalidLame: return "InvalidLame";
    case ErrorKind::CoincidentPoints: return "CoincidentPoints";
    case ErrorKind::QuadratureNoConvergence: return "QuadratureNoConvergence";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::PointSourceOnGridNode: return "PointSourceOnGridNode";
    case ErrorKind::SolverDiverged: return "SolverDiverged";
    case ErrorKind::NonContractive: return "NonContractive";
    case ErrorKind::ProblemTooLarge: return "ProblemTooLarge";
    case ErrorKind::SingularMatrix: return "SingularMatrix";
    case ErrorKind::RadiiInsideSupport: return "RadiiInsideSupport";
    case ErrorKind::BandTooNarrow: return "BandTooNarrow";
    case ErrorKind::OrderOutOfWindow: return "OrderOutOfWindow";
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
    case ErrorKind::FormatError: return "FormatError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

// ---------------------------------------------------------------------------
// Box

Box Box::make(std::span<const double> lower, std::span<const double> upper) {
  if (lower.size() != upper.size() || lower.size() < 2 || lower.size() > 3) {
    throw Error(ErrorKind::InvalidBox, "corner vectors must both have length 2 or 3");
  }
  Box b;
  b.dim = static_cast<int>(lower.size());
  for (int i = 0; i < b.dim; ++i) {
    b.lower[i] = lower[i];
    b.upper[i] = upper[i];
  }
  b.validate();
  return b;
}

Box Box::cube(int dim, double lo, double hi) {
  Box b;
  b.dim = dim;
  for (int i = 0; i < dim; ++i) {
    b.lower[i] = lo;
    b.upper[i] = hi;
  }
  b.validate();
  return b;
}

Point Box::center() const {
  Point c{};
  for (int i = 0; i < dim; ++i) c[i] = 0.5 * (lower[i] + upper[i]);
  return c;
}

bool Box::contains(const Point& x) const {
  for (int i = 0; i < dim; ++i) {
    if (x[i] < lower[i] || x[i] > upper[i]) return false;
  }
  return true;
}

bool Box::contains(const Box& inner, const Point& margin) const {
  if (inner.dim != dim) return false;
  for (int i = 0; i < dim; ++i) {
    if (inner.lower[i] < lower[i] + margin[i] || inner.upper[i] > upper[i] - margin[i]) return false;
  }
  return true;
}

void Box::validate() const {
  if (dim != 2 && dim != 3) throw Error(ErrorKind::InvalidBox, "dimension must be 2 or 3");
  for (int i = 0; i < dim; ++i) {
    if (!std::isfinite(lower[i]) || !std::isfinite(upper[i]) || !(upper[i] > lower[i])) {
      std::ostringstream os;
      os << "axis " << i << ": need upper > lower, got [" << lower[i] << ", " << upper[i] << "]";
      throw Error(ErrorKind::InvalidBox, os.str());
    }
  }
}

// ---------------------------------------------------------------------------
// Grid

Grid::Grid(const Box& box, std::span<const std::size_t> n) : box_(box) {
  box_.validate();
  if (n.size() != static_cast<std::size_t>(box.dim)) {
    throw Error(ErrorKind::InvalidBox, "point counts must match the box dimension");
  }
  size_ = 1;
  cell_volume_ = 1.0;
  for (int i = 0; i < box.dim; ++i) {
    if (n[i] < kMinPointsPerAxis) {
      throw Error(ErrorKind::TooCoarse, "need at least 8 points per axis, got " + std::to_string(n[i]));
    }
    n_[i] = n[i];
    h_[i] = box.extent(i) / static_cast<double>(n[i]);
    cell_volume_ *= h_[i];
    size_ *= n[i];
  }
}

Grid make_grid(const Box& box, std::span<const std::size_t> n) { return Grid(box, n); }

double Grid::min_spacing() const {
  double h = h_[0];
  for (int i = 1; i < dim(); ++i) h = std::min(h, h_[i]);
  return h;
}

std::array<std::size_t, 3> Grid::unravel(std::size_t linear) const {
  std::array<std::size_t, 3> idx{0, 0, 0};
  for (int i = dim() - 1; i >= 0; --i) {
    idx[i] = linear % n_[i];
    linear /= n_[i];
  }
  return idx;
}

std::size_t Grid::ravel(const std::array<std::size_t, 3>& idx) const {
  std::size_t linear = 0;
  for (int i = 0; i < dim(); ++i) linear = linear * n_[i] + idx[i];
  return linear;
}

Point Grid::node(const std::array<std::size_t, 3>& idx) const {
  Point x{};
  for (int i = 0; i < dim(); ++i) {
    x[i] = box_.lower[i] + (static_cast<double>(idx[i]) + 0.5) * h_[i];
  }
  return x;
}

Point Grid::node(std::size_t linear) const { return node(unravel(linear)); }

bool Grid::operator==(const Grid& other) const {
  return box_.dim == other.box_.dim && box_.lower == other.box_.lower &&
         box_.upper == other.box_.upper && n_ == other.n_;
}

double distance(const Point& a, const Point& b, int dim) {
  double s = 0.0;
  for (int i = 0; i < dim; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

// ---------------------------------------------------------------------------
// Seeding

std::uint64_t mix64(std::uint64_t x) noexcept {
  // SplitMix64 finalizer; a bijection on 64-bit words.
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

namespace {

std::uint64_t fnv1a(std::string_view s) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

}  // namespace

SeedSpec derive_stream(const SeedSpec& seed, std::string_view purpose, std::uint64_t index) {
  const std::uint64_t anchor = mix64(mix64(seed.stream ^ fnv1a(purpose)) + kGolden);
  return {seed.base_seed, mix64(anchor + index)};
}

Rng::Rng(const SeedSpec& seed)
    : key0_(mix64(seed.base_seed + kGolden)),
      key1_(mix64(seed.stream ^ 0xD1B54A32D192ED03ULL) ^ mix64(seed.base_seed)) {}

std::uint64_t Rng::next_u64() noexcept {
  ++counter_;
  return mix64(mix64(key0_ ^ (counter_ * kGolden)) + key1_);
}

double Rng::uniform() noexcept {
  // 53 random bits, shifted off zero.
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::normal() noexcept {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double t = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(t);
  has_spare_ = true;
  return r * std::cos(t);
}

// ---------------------------------------------------------------------------
// Fields

FieldShape FieldShape::from_components(int components, int dim) {
  if (components == 1) return scalar(dim);
  if (components == dim) return vector(dim);
  if (components == dim * dim) return matrix(dim);
  throw Error(ErrorKind::ShapeMismatch,
              "component count " + std::to_string(components) + " is not 1, d or d*d");
}

int FieldShape::components() const {
  switch (kind) {
    case FieldKind::Scalar: return 1;
    case FieldKind::Vector: return dim;
    case FieldKind::Matrix: return dim * dim;
  }
  return 1;
}

std::string_view to_string(FieldKind kind) {
  switch (kind) {
    case FieldKind::Scalar: return "scalar";
    case FieldKind::Vector: return "vector";
    case FieldKind::Matrix: return "matrix";
  }
  return "?";
}

FieldSample::FieldSample(Grid grid, FieldShape shape, bool real_valued, FieldMeta meta)
    : grid_(std::move(grid)),
      shape_(shape),
      components_(shape.components()),
      real_(real_valued),
      meta_(std::move(meta)),
      values_(grid_.size() * static_cast<std::size_t>(components_), cplx{0.0, 0.0}) {
  if (shape.dim != grid_.dim()) {
    throw Error(ErrorKind::ShapeMismatch, "field shape dimension differs from grid dimension");
  }
}

void require_compatible(const FieldSample& a, const FieldSample& b, std::string_view what) {
  if (!(a.grid() == b.grid()) || a.components() != b.components()) {
    throw Error(ErrorKind::ShapeMismatch, std::string(what) + ": fields differ in grid or shape");
  }
}

double max_abs(std::span<const cplx> v) {
  double m = 0.0;
  for (const auto& z : v) m = std::max(m, std::abs(z));
  return m;
}

double norm2(std::span<const cplx> v) {
  double s = 0.0;
  for (const auto& z : v) s += std::norm(z);
  return std::sqrt(s);
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw Error(ErrorKind::BandTooNarrow, "line fit needs at least two points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw Error(ErrorKind::BandTooNarrow, "line fit needs distinct abscissae");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r_squared = syy == 0.0 ? 1.0 : std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0);
  return f;
}

}  // namespace scatterlab
