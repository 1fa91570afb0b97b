#include "pmri/core/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <type_traits>
#include <vector>

namespace pmri {

namespace {
// FFTW's planner is not re-entrant; only plan creation/destruction is serialized.
std::mutex &planner_mutex()
{
  static std::mutex m;
  return m;
}
} // namespace

template <typename Real>
struct Fft2<Real>::Plans
{
  using Plan = std::conditional_t<std::is_same_v<Real, double>, fftw_plan, fftwf_plan>;
  Plan fwd = nullptr;
  Plan bwd = nullptr;
};

template <typename Real>
Fft2<Real>::Fft2(Grid grid)
  : grid_{grid}
  , plans_{std::make_unique<Plans>()}
{
  if (grid.nx < 1 || grid.ny < 1) { throw DimensionError("fft grid must be at least 1x1"); }
  std::vector<Scalar> scratch(static_cast<size_t>(grid.size()));
  auto const flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  int const n0 = int(grid.nx);
  int const n1 = int(grid.ny);
  std::lock_guard lock(planner_mutex());
  if constexpr (std::is_same_v<Real, double>) {
    auto *buf = reinterpret_cast<fftw_complex *>(scratch.data());
    plans_->fwd = fftw_plan_dft_2d(n0, n1, buf, buf, FFTW_FORWARD, flags);
    plans_->bwd = fftw_plan_dft_2d(n0, n1, buf, buf, FFTW_BACKWARD, flags);
  } else {
    auto *buf = reinterpret_cast<fftwf_complex *>(scratch.data());
    plans_->fwd = fftwf_plan_dft_2d(n0, n1, buf, buf, FFTW_FORWARD, flags);
    plans_->bwd = fftwf_plan_dft_2d(n0, n1, buf, buf, FFTW_BACKWARD, flags);
  }
  if (!plans_->fwd || !plans_->bwd) { throw std::runtime_error("FFTW planning failed"); }
}

template <typename Real>
Fft2<Real>::~Fft2()
{
  std::lock_guard lock(planner_mutex());
  if constexpr (std::is_same_v<Real, double>) {
    if (plans_->fwd) { fftw_destroy_plan(plans_->fwd); }
    if (plans_->bwd) { fftw_destroy_plan(plans_->bwd); }
  } else {
    if (plans_->fwd) { fftwf_destroy_plan(plans_->fwd); }
    if (plans_->bwd) { fftwf_destroy_plan(plans_->bwd); }
  }
}

template <typename Real>
void Fft2<Real>::forward(Scalar *data) const
{
  if constexpr (std::is_same_v<Real, double>) {
    auto *buf = reinterpret_cast<fftw_complex *>(data);
    fftw_execute_dft(plans_->fwd, buf, buf);
  } else {
    auto *buf = reinterpret_cast<fftwf_complex *>(data);
    fftwf_execute_dft(plans_->fwd, buf, buf);
  }
}

template <typename Real>
void Fft2<Real>::backward(Scalar *data) const
{
  if constexpr (std::is_same_v<Real, double>) {
    auto *buf = reinterpret_cast<fftw_complex *>(data);
    fftw_execute_dft(plans_->bwd, buf, buf);
  } else {
    auto *buf = reinterpret_cast<fftwf_complex *>(data);
    fftwf_execute_dft(plans_->bwd, buf, buf);
  }
}

template class Fft2<double>;
template class Fft2<float>;

CVector fft2(Fft2<double> const &fft, CVector x)
{
  if (x.size() != fft.grid().size()) { throw DimensionError("fft2: vector length does not match grid"); }
  fft.forward(x.data());
  return x;
}

CVector ifft2_adjoint(Fft2<double> const &fft, CVector x)
{
  if (x.size() != fft.grid().size()) { throw DimensionError("ifft2: vector length does not match grid"); }
  fft.backward(x.data());
  return x;
}

} // namespace pmri
