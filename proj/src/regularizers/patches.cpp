#include "pmri/regularizers/patches.hpp"

namespace pmri {

namespace {
Index ceil_div(Index a, Index b) { return (a + b - 1) / b; }
} // namespace

Index PatchConfig::count(Grid const &grid) const { return ceil_div(grid.nx, stride) * ceil_div(grid.ny, stride); }

void PatchConfig::validate(Grid const &grid) const
{
  if (height < 1 || width < 1) { throw ConfigError("patch dimensions must be positive"); }
  if (stride < 1) { throw ConfigError("patch stride must be at least 1"); }
  if (height > grid.nx || width > grid.ny) {
    throw DimensionError("patch " + std::to_string(height) + "x" + std::to_string(width) + " larger than grid " +
                         to_string(grid));
  }
}

CMatrix extract_patches(PatchConfig const &cfg, Image const &x)
{
  Grid const g = x.grid();
  cfg.validate(g);
  Index const cols_per_row = ceil_div(g.ny, cfg.stride);
  CMatrix out(cfg.patch_size(), cfg.count(g));
  for (Index p = 0; p < out.cols(); ++p) {
    Index const i0 = (p / cols_per_row) * cfg.stride;
    Index const j0 = (p % cols_per_row) * cfg.stride;
    for (Index a = 0; a < cfg.height; ++a) {
      Index const i = (i0 + a) % g.nx;
      for (Index b = 0; b < cfg.width; ++b) { out(a * cfg.width + b, p) = x(i, (j0 + b) % g.ny); }
    }
  }
  return out;
}

Image aggregate_patches(PatchConfig const &cfg, Grid const &grid, CMatrix const &patches)
{
  cfg.validate(grid);
  if (patches.rows() != cfg.patch_size() || patches.cols() != cfg.count(grid)) {
    throw DimensionError("patch matrix shape does not match the patch configuration");
  }
  Index const cols_per_row = ceil_div(grid.ny, cfg.stride);
  Image out(grid);
  for (Index p = 0; p < patches.cols(); ++p) {
    Index const i0 = (p / cols_per_row) * cfg.stride;
    Index const j0 = (p % cols_per_row) * cfg.stride;
    for (Index a = 0; a < cfg.height; ++a) {
      Index const i = (i0 + a) % grid.nx;
      for (Index b = 0; b < cfg.width; ++b) { out(i, (j0 + b) % grid.ny) += patches(a * cfg.width + b, p); }
    }
  }
  return out;
}

RVector patch_coverage(PatchConfig const &cfg, Grid const &grid)
{
  CMatrix ones = CMatrix::Ones(cfg.patch_size(), cfg.count(grid));
  return aggregate_patches(cfg, grid, ones).vec().real();
}

} // namespace pmri
