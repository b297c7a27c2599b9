#include "rotbec/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

#include "rotbec/error.hpp"

namespace rotbec {

namespace detail {

void* fft_aligned_alloc(std::size_t bytes) { return fftw_malloc(bytes); }
void fft_aligned_free(void* p) noexcept { fftw_free(p); }

struct PlanSet {
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;
  fftw_plan forward_inplace = nullptr;
  fftw_plan inverse_inplace = nullptr;

  ~PlanSet() {
    for (fftw_plan p : {forward, inverse, forward_inplace, inverse_inplace}) {
      if (p != nullptr) fftw_destroy_plan(p);
    }
  }
};

}  // namespace detail

namespace {

// FFTW's planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::shared_ptr<const detail::PlanSet> plans_for(int n) {
  static std::map<int, std::shared_ptr<const detail::PlanSet>> cache;
  std::lock_guard lock(planner_mutex());
  if (auto it = cache.find(n); it != cache.end()) return it->second;

  // FFTW_ESTIMATE keeps the chosen algorithm, and hence round-off, identical
  // between runs.
  const unsigned flags = FFTW_ESTIMATE | FFTW_PRESERVE_INPUT;
  const std::size_t count = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
  CVector a(count), b(count);
  auto* pa = reinterpret_cast<fftw_complex*>(a.data());
  auto* pb = reinterpret_cast<fftw_complex*>(b.data());

  auto set = std::make_shared<detail::PlanSet>();
  set->forward = fftw_plan_dft_2d(n, n, pa, pb, FFTW_FORWARD, flags);
  set->inverse = fftw_plan_dft_2d(n, n, pa, pb, FFTW_BACKWARD, flags);
  set->forward_inplace = fftw_plan_dft_2d(n, n, pa, pa, FFTW_FORWARD, FFTW_ESTIMATE);
  set->inverse_inplace = fftw_plan_dft_2d(n, n, pa, pa, FFTW_BACKWARD, FFTW_ESTIMATE);
  if (!set->forward || !set->inverse || !set->forward_inplace || !set->inverse_inplace) {
    throw NumericalError("FFT planner failed for n = " + std::to_string(n));
  }
  cache.emplace(n, set);
  return set;
}

fftw_complex* as_fftw(const CVector& v) {
  return reinterpret_cast<fftw_complex*>(const_cast<cplx*>(v.data()));
}

void scale(CVector& v, double s) {
  for (auto& z : v) z *= s;
}

}  // namespace

Fft2D::Fft2D(int n) : n_(n), plans_(plans_for(n)) {}

void Fft2D::forward(const CVector& in, CVector& out) const {
  out.resize(in.size());
  fftw_execute_dft(plans_->forward, as_fftw(in), as_fftw(out));
}

void Fft2D::inverse(const CVector& in, CVector& out) const {
  out.resize(in.size());
  fftw_execute_dft(plans_->inverse, as_fftw(in), as_fftw(out));
  scale(out, 1.0 / (static_cast<double>(n_) * n_));
}

void Fft2D::forward_in_place(CVector& data) const {
  fftw_execute_dft(plans_->forward_inplace, as_fftw(data), as_fftw(data));
}

void Fft2D::inverse_in_place(CVector& data) const {
  fftw_execute_dft(plans_->inverse_inplace, as_fftw(data), as_fftw(data));
  scale(data, 1.0 / (static_cast<double>(n_) * n_));
}

}  // namespace rotbec
