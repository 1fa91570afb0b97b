#pragma once

#include "pmri/core/model.hpp"
#include "pmri/core/random.hpp"
#include "pmri/harness/synthetic.hpp"
#include "pmri/regularizers/patches.hpp"

#include <cmath>

namespace fixture {

using namespace pmri;

inline Image random_image(Grid g, uint64_t seed)
{
  Rng rng(seed);
  return Image(g, rng.complex_normal(g.size()));
}

inline SamplingMask random_mask(Grid g, double p, uint64_t seed)
{
  Rng rng(seed);
  std::vector<uint8_t> keep(size_t(g.size()));
  for (auto &k : keep) { k = rng.uniform() < p ? 1 : 0; }
  keep[0] = 1;
  return SamplingMask(g, keep);
}

/// Random complex maps, not normalized.
inline SensitivityMaps random_maps(Grid g, Index L, uint64_t seed)
{
  Rng rng(seed);
  CMatrix m(g.size(), L);
  for (Index l = 0; l < L; ++l) {
    for (Index p = 0; p < g.size(); ++p) { m(p, l) = Complex{0.5 + rng.uniform(), rng.uniform(-0.5, 0.5)}; }
  }
  return SensitivityMaps(g, m);
}

inline KSpaceData random_kspace(SamplingMask const &mask, Index L, uint64_t seed)
{
  Rng rng(seed);
  CMatrix s(mask.count(), L);
  for (Index l = 0; l < L; ++l) { s.col(l) = rng.complex_normal(mask.count()); }
  return KSpaceData(mask, s);
}

inline double rel(CVector const &a, CVector const &b) { return (a - b).norm() / std::max(b.norm(), 1e-300); }

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

/// Small undersampled single-coil problem with a blocks phantom and noise.
struct SmallProblem
{
  SystemOperator op;
  KSpaceData y;
  Image truth;
};

inline SmallProblem small_problem(Index n, Index coils, double fraction, uint64_t seed, double snr = 30)
{
  Grid const g{n, n};
  MaskSpec ms;
  ms.kind = fraction >= 1 ? MaskSpec::Kind::full : MaskSpec::Kind::variable_density_lines;
  ms.fraction = fraction;
  ms.seed = seed;
  ms.center_band = std::max<Index>(2, n / 8);
  SensitivityMaps const maps = coils == 1 ? SensitivityMaps::unit(g) : synthetic_maps(g, coils, seed + 2);
  SystemOperator op(make_mask(ms, g), maps);
  Image truth = make_phantom(PhantomKind::shepp_logan, g);
  KSpaceData y = simulate(op, truth, snr, seed + 1);
  return {std::move(op), std::move(y), std::move(truth)};
}

/// Random unitary matrix from the QR factorization of a complex Gaussian matrix.
inline CMatrix random_unitary(Index n, uint64_t seed)
{
  Rng rng(seed);
  CMatrix g = rng.complex_normal(n * n).reshaped(n, n);
  Eigen::HouseholderQR<CMatrix> qr(g);
  return qr.householderQ() * CMatrix::Identity(n, n);
}

/// Image whose non-overlapping patches are each a multiple of one column of a known unitary dictionary,
/// measured noiselessly on a full grid with one unit coil.
struct PlantedInstance
{
  SystemOperator op;
  KSpaceData y;
  Image truth;
  PatchConfig cfg;
  CMatrix dictionary;
};

inline PlantedInstance planted_instance(uint64_t seed)
{
  Grid const g{16, 16};
  PatchConfig cfg{4, 4, 4};
  CMatrix const D = random_unitary(16, seed);
  Rng rng(seed + 1);
  Index const P = cfg.count(g);
  CMatrix patches(16, P);
  for (Index p = 0; p < P; ++p) {
    Index const j = Index(rng.below(16));
    Complex const c = std::polar(rng.uniform(0.5, 1.5), rng.uniform(0, 6.283185307179586));
    patches.col(p) = c * D.col(j);
  }
  RVector const cov = patch_coverage(cfg, g);
  Image truth = aggregate_patches(cfg, g, patches);
  truth.vec().array() /= cov.array().cast<Complex>();
  SystemOperator op(SamplingMask::full(g), SensitivityMaps::unit(g));
  KSpaceData y = op.forward(truth);
  return {std::move(op), std::move(y), std::move(truth), cfg, D};
}

} // namespace fixture
