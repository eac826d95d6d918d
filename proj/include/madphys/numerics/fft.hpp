#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <new>
#include <span>
#include <vector>

namespace madphys::numerics {

using Complex = std::complex<double>;

/// Allocator returning 64-byte aligned storage so FFTW can use SIMD kernels.
template <typename T>
struct AlignedAllocator {
  using value_type = T;
  static constexpr std::align_val_t kAlignment{64};

  AlignedAllocator() noexcept = default;
  template <typename U>
  AlignedAllocator(const AlignedAllocator<U>&) noexcept {}

  T* allocate(std::size_t n) {
    return static_cast<T*>(::operator new(n * sizeof(T), kAlignment));
  }
  void deallocate(T* p, std::size_t) noexcept { ::operator delete(p, kAlignment); }

  template <typename U>
  bool operator==(const AlignedAllocator<U>&) const noexcept {
    return true;
  }
};

using ComplexVector = std::vector<Complex, AlignedAllocator<Complex>>;

/// Complex amplitudes on a rectangular grid stored in row-major order
/// (last axis fastest).
struct ComplexGrid {
  std::vector<std::size_t> dims;
  ComplexVector values;
  std::vector<double> lengths;

  ComplexGrid() = default;
  ComplexGrid(std::vector<std::size_t> dims, std::vector<double> lengths);

  std::size_t size() const noexcept { return values.size(); }
  std::size_t rank() const noexcept { return dims.size(); }
  /// Throws ArgumentError unless values.size() == prod(dims).
  void validate() const;
};

/// Reusable transform over a fixed grid shape and axis subset.
///
/// Forward transforms are unnormalized; inverse() divides by the product of
/// the transformed dimensions so inverse(forward(x)) == x.
class FftPlan {
 public:
  /// Empty `axes` means every axis.
  explicit FftPlan(std::vector<std::size_t> dims, std::vector<std::size_t> axes = {});
  ~FftPlan();
  FftPlan(FftPlan&&) noexcept;
  FftPlan& operator=(FftPlan&&) noexcept;
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  const std::vector<std::size_t>& dims() const noexcept { return dims_; }
  std::size_t size() const noexcept { return total_; }

  void forward(std::span<Complex> data) const;
  void inverse(std::span<Complex> data) const;

 private:
  struct Impl;
  std::vector<std::size_t> dims_;
  std::size_t total_ = 0;
  double inverse_scale_ = 1.0;
  std::unique_ptr<Impl> impl_;
};

/// Supported transform lengths: powers of two, 1 .. 2^20 per axis, rank 1..4.
bool fft_size_supported(std::size_t n) noexcept;

ComplexGrid fft_forward(ComplexGrid grid, std::span<const std::size_t> axes = {});
ComplexGrid fft_inverse(ComplexGrid grid, std::span<const std::size_t> axes = {});

/// Integer wavenumber index for position i of an n-point transform
/// (0, 1, ..., n/2-1, -n/2, ..., -1).
inline long fft_frequency(std::size_t i, std::size_t n) noexcept {
  const long li = static_cast<long>(i);
  const long ln = static_cast<long>(n);
  return li < (ln + 1) / 2 ? li : li - ln;
}

}  // namespace madphys::numerics
