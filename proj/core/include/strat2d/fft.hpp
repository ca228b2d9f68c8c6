#pragma once

#include <complex>
#include <cstddef>
#include <limits>
#include <new>
#include <vector>

namespace strat2d {

namespace detail {
void* fft_alloc(std::size_t bytes);
void fft_free(void* p) noexcept;
}  // namespace detail

/// Allocator returning SIMD-aligned storage so buffers can be handed to the
/// shared transform plans.
template <class T>
struct FftAllocator {
  using value_type = T;
  FftAllocator() noexcept = default;
  template <class U>
  FftAllocator(const FftAllocator<U>&) noexcept {}

  T* allocate(std::size_t n) {
    if (n > std::numeric_limits<std::size_t>::max() / sizeof(T)) throw std::bad_alloc();
    return static_cast<T*>(detail::fft_alloc(n * sizeof(T)));
  }
  void deallocate(T* p, std::size_t) noexcept { detail::fft_free(p); }

  template <class U>
  bool operator==(const FftAllocator<U>&) const noexcept {
    return true;
  }
};

using Complex = std::complex<double>;
using ComplexBuffer = std::vector<Complex, FftAllocator<Complex>>;

/// Unnormalized in-place 2D complex transforms of an n x n row-major buffer.
/// Plans are created once per size with FFTW_ESTIMATE (deterministic plan
/// selection) and executed thread-safely on caller-owned buffers.
void fft2d_forward(ComplexBuffer& data, int n);
void fft2d_backward(ComplexBuffer& data, int n);

}  // namespace strat2d
