#include "scatterlab/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace scatterlab {

namespace {

// The FFTW planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

FftPlan::FftPlan(std::span<const std::size_t> dims) : dims_(dims.begin(), dims.end()) {
  size_ = 1;
  std::vector<int> n;
  for (auto d : dims_) {
    size_ *= d;
    n.push_back(static_cast<int>(d));
  }
  std::vector<cplx> scratch(size_);
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  forward_ = fftw_plan_dft(static_cast<int>(n.size()), n.data(), buf, buf, FFTW_FORWARD, flags);
  backward_ = fftw_plan_dft(static_cast<int>(n.size()), n.data(), buf, buf, FFTW_BACKWARD, flags);
  if (forward_ == nullptr || backward_ == nullptr) {
    throw Error(ErrorKind::ShapeMismatch, "FFT planning failed");
  }
}

FftPlan::~FftPlan() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(forward_));
  fftw_destroy_plan(static_cast<fftw_plan>(backward_));
}

std::shared_ptr<const FftPlan> FftPlan::get(std::span<const std::size_t> dims) {
  static std::map<std::vector<std::size_t>, std::shared_ptr<const FftPlan>> cache;
  std::vector<std::size_t> key(dims.begin(), dims.end());
  std::lock_guard lock(planner_mutex());
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  std::shared_ptr<const FftPlan> plan(new FftPlan(dims));
  cache.emplace(std::move(key), plan);
  return plan;
}

void FftPlan::forward(std::span<cplx> data) const {
  if (data.size() != size_) throw Error(ErrorKind::ShapeMismatch, "FFT buffer size mismatch");
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(static_cast<fftw_plan>(forward_), buf, buf);
}

void FftPlan::backward(std::span<cplx> data) const {
  if (data.size() != size_) throw Error(ErrorKind::ShapeMismatch, "FFT buffer size mismatch");
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(static_cast<fftw_plan>(backward_), buf, buf);
}

}  // namespace scatterlab
