#pragma once

#include "pmri/core/types.hpp"

namespace pmri {

/// Periodic patch extraction geometry. Patch p starts at (r*stride, c*stride) and wraps around the grid.
struct PatchConfig
{
  Index height = 1;
  Index width = 1;
  Index stride = 1;

  Index patch_size() const { return height * width; }
  /// Number of patches P on a grid.
  Index count(Grid const &grid) const;
  void validate(Grid const &grid) const;
};

/// Columns are vectorized (row-major) patches: d x P.
CMatrix extract_patches(PatchConfig const &cfg, Image const &x);
/// Adjoint of extract_patches: sum_p P_p' patch_p.
Image aggregate_patches(PatchConfig const &cfg, Grid const &grid, CMatrix const &patches);
/// diag(sum_p P_p' P_p): how many patches cover each pixel.
RVector patch_coverage(PatchConfig const &cfg, Grid const &grid);

} // namespace pmri
