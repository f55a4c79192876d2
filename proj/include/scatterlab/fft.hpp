#pragma once

#include <memory>
#include <span>
#include <vector>

#include "scatterlab/core.hpp"

namespace scatterlab {

/// In-place complex multidimensional FFT (row-major, last axis fastest).
///
/// Plans are created once per shape and shared; execution is re-entrant and
/// bit-reproducible because plans are made with estimate-only, alignment-free
/// flags.
class FftPlan {
 public:
  /// Shared plan for the given dimensions (thread-safe).
  static std::shared_ptr<const FftPlan> get(std::span<const std::size_t> dims);

  ~FftPlan();
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  std::size_t size() const { return size_; }
  const std::vector<std::size_t>& dims() const { return dims_; }

  void forward(std::span<cplx> data) const;
  /// Unnormalized inverse; divide by size() to invert forward().
  void backward(std::span<cplx> data) const;

 private:
  explicit FftPlan(std::span<const std::size_t> dims);

  std::vector<std::size_t> dims_;
  std::size_t size_ = 0;
  void* forward_ = nullptr;
  void* backward_ = nullptr;
};

/// Signed integer frequency index for FFT bin j of an n-point axis, in [-n/2, n/2).
inline long fft_frequency_index(std::size_t j, std::size_t n) {
  const long jj = static_cast<long>(j);
  const long nn = static_cast<long>(n);
  return jj < (nn + 1) / 2 ? jj : jj - nn;
}

}  // namespace scatterlab
