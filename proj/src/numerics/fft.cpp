#include "madphys/numerics/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <mutex>
#include <numeric>

#include "madphys/core/error.hpp"

namespace madphys::numerics {

namespace {

// The FFTW planner is not thread-safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::vector<std::size_t> normalize_axes(std::span<const std::size_t> axes, std::size_t rank) {
  std::vector<std::size_t> out;
  if (axes.empty()) {
    out.resize(rank);
    std::iota(out.begin(), out.end(), std::size_t{0});
    return out;
  }
  out.assign(axes.begin(), axes.end());
  std::sort(out.begin(), out.end());
  if (std::adjacent_find(out.begin(), out.end()) != out.end())
    throw ConfigError("fft: duplicate axis");
  if (out.back() >= rank) throw ConfigError("fft: axis out of range");
  return out;
}

}  // namespace

bool fft_size_supported(std::size_t n) noexcept {
  return n >= 1 && n <= (std::size_t{1} << 20) && (n & (n - 1)) == 0;
}

ComplexGrid::ComplexGrid(std::vector<std::size_t> d, std::vector<double> l)
    : dims(std::move(d)), lengths(std::move(l)) {
  const std::size_t total =
      std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
  values.assign(total, Complex{0.0, 0.0});
  if (lengths.empty()) lengths.assign(dims.size(), 1.0);
}

void ComplexGrid::validate() const {
  const std::size_t total =
      std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
  if (dims.empty() || total != values.size())
    throw ArgumentError("ComplexGrid: value count does not match dims");
  if (lengths.size() != dims.size())
    throw ArgumentError("ComplexGrid: axis-lengths count does not match dims");
}

struct FftPlan::Impl {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  ~Impl() {
    std::lock_guard lock(planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
  }
};

FftPlan::FftPlan(std::vector<std::size_t> dims, std::vector<std::size_t> axes)
    : dims_(std::move(dims)), impl_(std::make_unique<Impl>()) {
  if (dims_.empty() || dims_.size() > 4)
    throw ConfigError("fft: unsupported dimension count " + std::to_string(dims_.size()));
  for (auto n : dims_)
    if (!fft_size_supported(n))
      throw ConfigError("fft: unsupported axis length " + std::to_string(n));
  const auto chosen = normalize_axes(axes, dims_.size());

  total_ = std::accumulate(dims_.begin(), dims_.end(), std::size_t{1}, std::multiplies<>());
  std::vector<int> strides(dims_.size());
  int stride = 1;
  for (std::size_t k = dims_.size(); k-- > 0;) {
    strides[k] = stride;
    stride *= static_cast<int>(dims_[k]);
  }

  std::vector<fftw_iodim> transform_dims;
  std::vector<fftw_iodim> loop_dims;
  std::size_t transformed = 1;
  for (std::size_t k = 0; k < dims_.size(); ++k) {
    fftw_iodim d{static_cast<int>(dims_[k]), strides[k], strides[k]};
    if (std::binary_search(chosen.begin(), chosen.end(), k)) {
      transform_dims.push_back(d);
      transformed *= dims_[k];
    } else {
      loop_dims.push_back(d);
    }
  }
  inverse_scale_ = 1.0 / static_cast<double>(transformed);

  ComplexVector scratch(total_);
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  std::lock_guard lock(planner_mutex());
  const unsigned flags = FFTW_ESTIMATE;
  impl_->forward = fftw_plan_guru_dft(static_cast<int>(transform_dims.size()),
                                      transform_dims.data(), static_cast<int>(loop_dims.size()),
                                      loop_dims.data(), buf, buf, FFTW_FORWARD, flags);
  impl_->backward = fftw_plan_guru_dft(static_cast<int>(transform_dims.size()),
                                       transform_dims.data(), static_cast<int>(loop_dims.size()),
                                       loop_dims.data(), buf, buf, FFTW_BACKWARD, flags);
  if (!impl_->forward || !impl_->backward) throw ConfigError("fft: planner failed");
}

FftPlan::~FftPlan() = default;
FftPlan::FftPlan(FftPlan&&) noexcept = default;
FftPlan& FftPlan::operator=(FftPlan&&) noexcept = default;

namespace {

void execute(fftw_plan plan, std::span<Complex> data, std::size_t expected) {
  if (data.size() != expected) throw ArgumentError("fft: buffer size does not match plan");
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  // Plans were made on 64-byte aligned storage; fall back to a copy otherwise.
  if (fftw_alignment_of(reinterpret_cast<double*>(ptr)) == 0) {
    fftw_execute_dft(plan, ptr, ptr);
    return;
  }
  ComplexVector tmp(data.begin(), data.end());
  auto* t = reinterpret_cast<fftw_complex*>(tmp.data());
  fftw_execute_dft(plan, t, t);
  std::copy(tmp.begin(), tmp.end(), data.begin());
}

}  // namespace

void FftPlan::forward(std::span<Complex> data) const { execute(impl_->forward, data, total_); }

void FftPlan::inverse(std::span<Complex> data) const {
  execute(impl_->backward, data, total_);
  for (auto& v : data) v *= inverse_scale_;
}

ComplexGrid fft_forward(ComplexGrid grid, std::span<const std::size_t> axes) {
  grid.validate();
  FftPlan plan(grid.dims, std::vector<std::size_t>(axes.begin(), axes.end()));
  plan.forward(grid.values);
  return grid;
}

ComplexGrid fft_inverse(ComplexGrid grid, std::span<const std::size_t> axes) {
  grid.validate();
  FftPlan plan(grid.dims, std::vector<std::size_t>(axes.begin(), axes.end()));
  plan.inverse(grid.values);
  return grid;
}

}  // namespace madphys::numerics
