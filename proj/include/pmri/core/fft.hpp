#pragma once

#include "pmri/core/types.hpp"

#include <complex>
#include <memory>

namespace pmri {

enum class FftNorm
{
  unnormalized ///< forward sums without scaling, so F'F = N I on a full grid
};

/// Unnormalized in-place 2D DFT on a row-major nx-by-ny buffer, backed by FFTW.
/// Plans are created once; execution on caller buffers is thread-safe.
template <typename Real>
class Fft2
{
public:
  using Scalar = std::complex<Real>;

  explicit Fft2(Grid grid);
  ~Fft2();
  Fft2(Fft2 const &) = delete;
  Fft2 &operator=(Fft2 const &) = delete;

  Grid const &grid() const { return grid_; }

  /// X(k) = sum_j x(j) exp(-2 pi i k.j / n)
  void forward(Scalar *data) const;
  /// x(j) = sum_k X(k) exp(+2 pi i k.j / n); this is F' (no 1/N)
  void backward(Scalar *data) const;

private:
  struct Plans;
  Grid grid_;
  std::unique_ptr<Plans> plans_;
};

extern template class Fft2<double>;
extern template class Fft2<float>;

/// Convenience: forward transform of a flat image vector.
CVector fft2(Fft2<double> const &fft, CVector x);
/// Convenience: adjoint (unnormalized backward) transform of a flat vector.
CVector ifft2_adjoint(Fft2<double> const &fft, CVector x);

} // namespace pmri
