#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <new>
#include <vector>

namespace rotbec {

using cplx = std::complex<double>;

namespace detail {
void* fft_aligned_alloc(std::size_t bytes);
void fft_aligned_free(void* p) noexcept;
struct PlanSet;
}  // namespace detail

/// Allocator returning SIMD-aligned storage so that cached FFT plans can be
/// executed on any buffer.
template <class T>
struct AlignedAllocator {
  using value_type = T;
  AlignedAllocator() = default;
  template <class U>
  constexpr AlignedAllocator(const AlignedAllocator<U>&) noexcept {}

  T* allocate(std::size_t n) {
    if (n == 0) return nullptr;
    void* p = detail::fft_aligned_alloc(n * sizeof(T));
    if (p == nullptr) throw std::bad_alloc();
    return static_cast<T*>(p);
  }
  void deallocate(T* p, std::size_t) noexcept { detail::fft_aligned_free(p); }

  template <class U>
  friend constexpr bool operator==(const AlignedAllocator&, const AlignedAllocator<U>&) {
    return true;
  }
};

using CVector = std::vector<cplx, AlignedAllocator<cplx>>;
using RVector = std::vector<double>;

/// Two-dimensional complex DFT on an n x n row-major array.
///
/// Plans are built once per size with a deterministic planner and shared
/// between instances; executing them is safe from several threads.
/// forward() is unnormalized, inverse() divides by n^2.
class Fft2D {
 public:
  explicit Fft2D(int n);

  [[nodiscard]] int size() const { return n_; }

  void forward(const CVector& in, CVector& out) const;
  void inverse(const CVector& in, CVector& out) const;
  void forward_in_place(CVector& data) const;
  void inverse_in_place(CVector& data) const;

 private:
  int n_;
  std::shared_ptr<const detail::PlanSet> plans_;
};

}  // namespace rotbec
