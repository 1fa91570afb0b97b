#pragma once

#include "pmri/core/model.hpp"

#include <cstdint>
#include <string>

namespace pmri {

enum class PhantomKind
{
  shepp_logan,
  blocks
};

PhantomKind parse_phantom_kind(std::string const &name);

/// Analytic phantom with magnitudes in [0, 1]; `smooth_phase` multiplies by a slowly varying unit phase.
Image make_phantom(PhantomKind kind, Grid grid, bool smooth_phase = false);

struct MaskSpec
{
  enum class Kind
  {
    full,
    every_nth,
    variable_density_lines,
    poisson_disc
  };

  Kind kind = Kind::full;
  int n = 2;              ///< every_nth spacing
  double fraction = 1.0;  ///< target M / N for the random masks
  uint64_t seed = 0;
  Index center_band = -1; ///< fully sampled center rows (lines) or square side (poisson); -1 picks nx / 8
};

MaskSpec::Kind parse_mask_kind(std::string const &name);

SamplingMask make_mask(MaskSpec const &spec, Grid grid);

/// L smooth Gaussian coil profiles with linear phase, normalized so that C'C = I.
SensitivityMaps synthetic_maps(Grid grid, Index ncoils, uint64_t seed);

/// y = A x + noise, with complex white noise scaled so ||Ax||^2 / (M L sigma^2) matches `snr_db`.
/// Infinite snr_db gives noiseless data.
KSpaceData simulate(SystemOperator const &op, Image const &truth, double snr_db, uint64_t seed);

/// 10 log10(||clean||^2 / ||noisy - clean||^2).
double measured_snr_db(KSpaceData const &clean, KSpaceData const &noisy);

/// ||x - ref|| / ||ref||.
double nrmse(Image const &x, Image const &ref);
double nrmse(CVector const &x, CVector const &ref);

/// Zero-filled adjoint reconstruction A'y / N.
Image zero_filled_image(SystemOperator const &op, KSpaceData const &y);

/// c ||A'y||_inf.
double lambda_heuristic(SystemOperator const &op, KSpaceData const &y, double scale = 0.01);

} // namespace pmri
