#pragma once

#include "pmri/core/fft.hpp"
#include "pmri/core/types.hpp"

#include <memory>
#include <vector>

namespace pmri {

/// Cartesian k-space sampling pattern shared by all coils.
class SamplingMask
{
public:
  SamplingMask() = default;
  SamplingMask(Grid grid, std::vector<uint8_t> keep);

  static SamplingMask full(Grid grid);

  Grid const &grid() const { return grid_; }
  /// Number of sampled locations M.
  Index count() const { return Index(indices_.size()); }
  bool sampled(Index i, Index j) const { return keep_[size_t(grid_.flat(i, j))] != 0; }
  std::vector<uint8_t> const &keep() const { return keep_; }
  /// Flat indices of sampled locations in row-major raster order (the k-space sample order).
  std::vector<Index> const &indices() const { return indices_; }
  /// Fraction M / N.
  double fraction() const { return double(count()) / double(grid_.size()); }
  /// 0/1 weights over the full grid.
  RVector weights() const;

  bool operator==(SamplingMask const &o) const { return grid_ == o.grid_ && keep_ == o.keep_; }

private:
  Grid grid_;
  std::vector<uint8_t> keep_;
  std::vector<Index> indices_;
};

/// Coil sensitivity maps, one column per coil, each column a flat row-major image.
class SensitivityMaps
{
public:
  static constexpr double kNormalizedTolerance = 1e-6;

  SensitivityMaps() = default;
  /// `normalized` claims sum_l |c_l(j)|^2 = 1 at every pixel; the claim is verified.
  SensitivityMaps(Grid grid, CMatrix maps, bool normalized = false);

  /// Single coil with unit sensitivity (C = I).
  static SensitivityMaps unit(Grid grid);
  /// Pixelwise normalization so that C'C = I; pixels with zero total sensitivity stay zero.
  SensitivityMaps normalized() const;

  Grid const &grid() const { return grid_; }
  Index ncoils() const { return maps_.cols(); }
  CMatrix const &maps() const { return maps_; }
  auto coil(Index l) const { return maps_.col(l); }
  bool is_normalized() const { return normalized_; }
  /// sum_l |c_l(j)|^2 per pixel, the diagonal of C'C.
  RVector sum_of_squares() const;

private:
  Grid grid_;
  CMatrix maps_;
  bool normalized_ = false;
};

/// Measured samples: M rows (mask raster order) by L coil columns.
struct KSpaceData
{
  SamplingMask mask;
  CMatrix samples;

  KSpaceData() = default;
  KSpaceData(SamplingMask m, CMatrix s);

  Index ncoils() const { return samples.cols(); }
};

enum class Precision
{
  double_precision,
  single_precision
};

/// Cartesian SENSE forward model A = (I_L kron F) C with per-coil subsampling.
/// Immutable after construction; safe for concurrent use.
class SystemOperator
{
public:
  static constexpr FftNorm fft_norm = FftNorm::unnormalized;

  SystemOperator(SamplingMask mask, SensitivityMaps smaps, Precision precision = Precision::double_precision);

  Grid const &grid() const { return mask_.grid(); }
  SamplingMask const &mask() const { return mask_; }
  SensitivityMaps const &smaps() const { return smaps_; }
  Index ncoils() const { return smaps_.ncoils(); }
  Precision precision() const { return precision_; }

  KSpaceData forward(Image const &x) const;
  Image adjoint(KSpaceData const &y) const;
  /// A'A x evaluated with the mask applied as 0/1 weights in k-space.
  Image gram(Image const &x) const;

  /// Residual norm helper: 0.5 ||Ax - y||^2.
  double data_cost(Image const &x, KSpaceData const &y) const;

  // Per-coil building blocks used by splitting methods.
  CVector coil_kspace(CVector const &coil_image) const;      ///< F u (full grid)
  CVector coil_image_adjoint(CVector const &kspace) const;   ///< F' k (full grid)
  CMatrix zero_filled(KSpaceData const &y) const;            ///< N x L full-grid k-space with zeros off-mask

  Fft2<double> const &fft() const { return *fft_; }

private:
  void check_data(KSpaceData const &y) const;
  void transform(CVector &buffer, bool forward) const;

  SamplingMask mask_;
  SensitivityMaps smaps_;
  Precision precision_;
  std::shared_ptr<Fft2<double>> fft_;
  std::shared_ptr<Fft2<float>> fftf_;
};

/// Optimal coil combination (C'C)^{-1} C' F^{-1} y for fully sampled data.
Image coil_combine(KSpaceData const &y, SensitivityMaps const &smaps);

/// SENSE reconstruction for regular every-nth-row sampling via independent small dense solves.
Image sense_block_solve(KSpaceData const &y, SensitivityMaps const &smaps, int accel);

/// Detects rows kept by a mask that samples exactly every `accel`-th row starting at row 0.
bool is_regular_row_mask(SamplingMask const &mask, int accel);

} // namespace pmri
