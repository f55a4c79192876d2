#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "scatterlab/error.hpp"

namespace scatterlab {

using cplx = std::complex<double>;
using Point = std::array<double, 3>;

inline constexpr int kMaxDim = 3;
inline constexpr std::size_t kMinPointsPerAxis = 8;

/// Axis-aligned box in 2 or 3 dimensions. Unused trailing coordinates are zero.
struct Box {
  int dim = 2;
  Point lower{};
  Point upper{};

  static Box make(std::span<const double> lower, std::span<const double> upper);
  static Box cube(int dim, double lo, double hi);

  double extent(int axis) const { return upper[axis] - lower[axis]; }
  Point center() const;
  bool contains(const Point& x) const;
  /// True when `inner` lies inside this box with at least `margin[i]` clearance per axis.
  bool contains(const Box& inner, const Point& margin = {}) const;
  void validate() const;
};

/// Uniform cell-centered tensor-product grid. Node j on axis i sits at
/// lower[i] + (j + 1/2) h[i]. Linear indices are row-major, last axis fastest.
class Grid {
 public:
  Grid() = default;
  Grid(const Box& box, std::span<const std::size_t> n);

  int dim() const { return box_.dim; }
  const Box& box() const { return box_; }
  std::size_t n(int axis) const { return n_[axis]; }
  const std::array<std::size_t, 3>& counts() const { return n_; }
  double spacing(int axis) const { return h_[axis]; }
  double min_spacing() const;
  double cell_volume() const { return cell_volume_; }
  std::size_t size() const { return size_; }

  Point node(std::size_t linear) const;
  Point node(const std::array<std::size_t, 3>& idx) const;
  std::array<std::size_t, 3> unravel(std::size_t linear) const;
  std::size_t ravel(const std::array<std::size_t, 3>& idx) const;

  bool operator==(const Grid& other) const;

 private:
  Box box_{};
  std::array<std::size_t, 3> n_{1, 1, 1};
  std::array<double, 3> h_{0.0, 0.0, 0.0};
  double cell_volume_ = 0.0;
  std::size_t size_ = 0;
};

Grid make_grid(const Box& box, std::span<const std::size_t> n);

double distance(const Point& a, const Point& b, int dim);

// ---------------------------------------------------------------------------
// Seeding

struct SeedSpec {
  std::uint64_t base_seed = 0;
  std::uint64_t stream = 0;

  bool operator==(const SeedSpec&) const = default;
};

/// Child stream for a labelled purpose. For a fixed parent and purpose the map
/// index -> stream is a bijection, so distinct indices never collide.
SeedSpec derive_stream(const SeedSpec& seed, std::string_view purpose, std::uint64_t index);

std::uint64_t mix64(std::uint64_t x) noexcept;

/// Counter-based generator: the n-th draw is a pure function of (seed, n).
class Rng {
 public:
  explicit Rng(const SeedSpec& seed);

  std::uint64_t next_u64() noexcept;
  /// Uniform on the open interval (0, 1).
  double uniform() noexcept;
  double normal() noexcept;

 private:
  std::uint64_t key0_;
  std::uint64_t key1_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// ---------------------------------------------------------------------------
// Fields

enum class FieldKind : std::uint8_t { Scalar, Vector, Matrix };

struct FieldShape {
  FieldKind kind = FieldKind::Scalar;
  int dim = 2;

  static FieldShape scalar(int dim) { return {FieldKind::Scalar, dim}; }
  static FieldShape vector(int dim) { return {FieldKind::Vector, dim}; }
  static FieldShape matrix(int dim) { return {FieldKind::Matrix, dim}; }
  static FieldShape from_components(int components, int dim);

  int components() const;
  bool operator==(const FieldShape&) const = default;
};

std::string_view to_string(FieldKind kind);

struct FieldMeta {
  SeedSpec seed{};
  bool stochastic = false;
  std::string generator = "none";
  double order = 0.0;
  std::string strength = "none";
};

/// Values on a grid; components are innermost (node-major layout).
class FieldSample {
 public:
  FieldSample() = default;
  FieldSample(Grid grid, FieldShape shape, bool real_valued, FieldMeta meta = {});

  const Grid& grid() const { return grid_; }
  const FieldShape& shape() const { return shape_; }
  int components() const { return components_; }
  bool real_valued() const { return real_; }
  void set_real_valued(bool real) { real_ = real; }
  const FieldMeta& meta() const { return meta_; }
  FieldMeta& meta() { return meta_; }

  std::span<cplx> values() { return values_; }
  std::span<const cplx> values() const { return values_; }
  cplx& at(std::size_t node, int comp = 0) { return values_[node * components_ + comp]; }
  const cplx& at(std::size_t node, int comp = 0) const { return values_[node * components_ + comp]; }

  std::size_t value_count() const { return values_.size(); }

 private:
  Grid grid_{};
  FieldShape shape_{};
  int components_ = 1;
  bool real_ = true;
  FieldMeta meta_{};
  std::vector<cplx> values_;
};

/// Throws ShapeMismatch unless both fields live on the same grid with the same shape.
void require_compatible(const FieldSample& a, const FieldSample& b, std::string_view what);

double max_abs(std::span<const cplx> v);
double norm2(std::span<const cplx> v);

/// Ordinary least-squares line y = slope x + intercept.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

LineFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace scatterlab
