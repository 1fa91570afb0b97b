#include "pmri/core/model.hpp"

#include <cmath>

namespace pmri {

SamplingMask::SamplingMask(Grid grid, std::vector<uint8_t> keep)
  : grid_{grid}
  , keep_{std::move(keep)}
{
  if (grid.nx < 1 || grid.ny < 1) { throw DimensionError("mask grid must be at least 1x1"); }
  if (Index(keep_.size()) != grid.size()) { throw DimensionError("mask length does not match grid " + to_string(grid)); }
  for (Index k = 0; k < grid.size(); ++k) {
    if (keep_[size_t(k)]) {
      keep_[size_t(k)] = 1;
      indices_.push_back(k);
    }
  }
  if (indices_.empty()) { throw ConfigError("sampling mask keeps no k-space locations"); }
}

SamplingMask SamplingMask::full(Grid grid) { return SamplingMask(grid, std::vector<uint8_t>(size_t(grid.size()), 1)); }

RVector SamplingMask::weights() const
{
  RVector w(grid_.size());
  for (Index k = 0; k < grid_.size(); ++k) { w[k] = keep_[size_t(k)] ? 1.0 : 0.0; }
  return w;
}

SensitivityMaps::SensitivityMaps(Grid grid, CMatrix maps, bool normalized)
  : grid_{grid}
  , maps_{std::move(maps)}
  , normalized_{normalized}
{
  if (maps_.rows() != grid.size()) { throw DimensionError("sensitivity map size does not match grid " + to_string(grid)); }
  if (maps_.cols() < 1) { throw DimensionError("at least one coil is required"); }
  if (!maps_.allFinite()) { throw ConfigError("sensitivity maps contain non-finite values"); }
  if (normalized_) {
    RVector const ss = sum_of_squares();
    if (((ss.array() - 1.0).abs() > kNormalizedTolerance).any()) {
      throw ConfigError("sensitivity maps flagged normalized but sum |c_l|^2 deviates from 1");
    }
  }
}

SensitivityMaps SensitivityMaps::unit(Grid grid) { return SensitivityMaps(grid, CMatrix::Ones(grid.size(), 1), true); }

RVector SensitivityMaps::sum_of_squares() const { return maps_.cwiseAbs2().rowwise().sum(); }

SensitivityMaps SensitivityMaps::normalized() const
{
  RVector const ss = sum_of_squares();
  CMatrix out = maps_;
  bool all_nonzero = true;
  for (Index j = 0; j < out.rows(); ++j) {
    if (ss[j] > 0) {
      out.row(j) /= std::sqrt(ss[j]);
    } else {
      all_nonzero = false;
    }
  }
  return SensitivityMaps(grid_, std::move(out), all_nonzero);
}

KSpaceData::KSpaceData(SamplingMask m, CMatrix s)
  : mask{std::move(m)}
  , samples{std::move(s)}
{
  if (samples.rows() != mask.count()) {
    throw DimensionError("k-space sample count " + std::to_string(samples.rows()) + " does not match mask count " +
                         std::to_string(mask.count()));
  }
  if (samples.cols() < 1) { throw DimensionError("k-space data needs at least one coil"); }
}

SystemOperator::SystemOperator(SamplingMask mask, SensitivityMaps smaps, Precision precision)
  : mask_{std::move(mask)}
  , smaps_{std::move(smaps)}
  , precision_{precision}
{
  require_grid(mask_.grid(), smaps_.grid(), "sensitivity maps");
  if (precision_ == Precision::double_precision) {
    fft_ = std::make_shared<Fft2<double>>(mask_.grid());
  } else {
    fft_ = std::make_shared<Fft2<double>>(mask_.grid());
    fftf_ = std::make_shared<Fft2<float>>(mask_.grid());
  }
}

void SystemOperator::transform(CVector &buffer, bool forward) const
{
  if (precision_ == Precision::double_precision) {
    forward ? fft_->forward(buffer.data()) : fft_->backward(buffer.data());
    return;
  }
  Eigen::VectorXcf single = buffer.cast<std::complex<float>>();
  forward ? fftf_->forward(single.data()) : fftf_->backward(single.data());
  buffer = single.cast<Complex>();
}

void SystemOperator::check_data(KSpaceData const &y) const
{
  if (!(y.mask == mask_)) { throw ConfigError("k-space data mask does not match the system operator mask"); }
  if (y.ncoils() != ncoils()) {
    throw ConfigError("k-space data has " + std::to_string(y.ncoils()) + " coils, operator has " +
                      std::to_string(ncoils()));
  }
}

KSpaceData SystemOperator::forward(Image const &x) const
{
  require_grid(grid(), x.grid(), "forward");
  auto const &idx = mask_.indices();
  CMatrix samples(mask_.count(), ncoils());
  CVector buf(grid().size());
  for (Index l = 0; l < ncoils(); ++l) {
    buf = smaps_.coil(l).cwiseProduct(x.vec());
    transform(buf, true);
    for (Index m = 0; m < Index(idx.size()); ++m) { samples(m, l) = buf[idx[size_t(m)]]; }
  }
  return KSpaceData(mask_, std::move(samples));
}

Image SystemOperator::adjoint(KSpaceData const &y) const
{
  check_data(y);
  auto const &idx = mask_.indices();
  Image out(grid());
  CVector buf(grid().size());
  for (Index l = 0; l < ncoils(); ++l) {
    buf.setZero();
    for (Index m = 0; m < Index(idx.size()); ++m) { buf[idx[size_t(m)]] = y.samples(m, l); }
    transform(buf, false);
    out.vec() += smaps_.coil(l).conjugate().cwiseProduct(buf);
  }
  return out;
}

Image SystemOperator::gram(Image const &x) const
{
  require_grid(grid(), x.grid(), "gram");
  RVector const w = mask_.weights();
  Image out(grid());
  CVector buf(grid().size());
  for (Index l = 0; l < ncoils(); ++l) {
    buf = smaps_.coil(l).cwiseProduct(x.vec());
    transform(buf, true);
    buf.array() *= w.array();
    transform(buf, false);
    out.vec() += smaps_.coil(l).conjugate().cwiseProduct(buf);
  }
  return out;
}

double SystemOperator::data_cost(Image const &x, KSpaceData const &y) const
{
  check_data(y);
  return 0.5 * (forward(x).samples - y.samples).squaredNorm();
}

CVector SystemOperator::coil_kspace(CVector const &coil_image) const
{
  if (coil_image.size() != grid().size()) { throw DimensionError("coil image length does not match grid"); }
  CVector buf = coil_image;
  transform(buf, true);
  return buf;
}

CVector SystemOperator::coil_image_adjoint(CVector const &kspace) const
{
  if (kspace.size() != grid().size()) { throw DimensionError("k-space length does not match grid"); }
  CVector buf = kspace;
  transform(buf, false);
  return buf;
}

CMatrix SystemOperator::zero_filled(KSpaceData const &y) const
{
  check_data(y);
  auto const &idx = mask_.indices();
  CMatrix out = CMatrix::Zero(grid().size(), ncoils());
  for (Index l = 0; l < ncoils(); ++l) {
    for (Index m = 0; m < Index(idx.size()); ++m) { out(idx[size_t(m)], l) = y.samples(m, l); }
  }
  return out;
}

Image coil_combine(KSpaceData const &y, SensitivityMaps const &smaps)
{
  Grid const grid = y.mask.grid();
  require_grid(grid, smaps.grid(), "coil_combine");
  if (y.mask.count() != grid.size()) {
    throw UnsupportedError("coil_combine needs fully sampled k-space; use an iterative solver for undersampled data");
  }
  if (y.ncoils() != smaps.ncoils()) { throw ConfigError("coil count mismatch between data and sensitivity maps"); }

  Fft2<double> fft(grid);
  double const n = double(grid.size());
  CVector numer = CVector::Zero(grid.size());
  CVector buf(grid.size());
  for (Index l = 0; l < y.ncoils(); ++l) {
    // Full mask: raster order equals flat order.
    buf = y.samples.col(l);
    fft.backward(buf.data());
    numer += smaps.coil(l).conjugate().cwiseProduct(buf / n);
  }
  RVector const ss = smaps.sum_of_squares();
  Image out(grid);
  for (Index j = 0; j < grid.size(); ++j) { out.vec()[j] = ss[j] > 0 ? numer[j] / ss[j] : Complex{0, 0}; }
  return out;
}

bool is_regular_row_mask(SamplingMask const &mask, int accel)
{
  if (accel < 1) { return false; }
  Grid const g = mask.grid();
  for (Index i = 0; i < g.nx; ++i) {
    bool const want = (i % accel) == 0;
    for (Index j = 0; j < g.ny; ++j) {
      if (mask.sampled(i, j) != want) { return false; }
    }
  }
  return true;
}

Image sense_block_solve(KSpaceData const &y, SensitivityMaps const &smaps, int accel)
{
  Grid const grid = y.mask.grid();
  require_grid(grid, smaps.grid(), "sense_block_solve");
  if (accel < 1 || grid.nx % accel != 0) {
    throw ConfigError("SENSE acceleration must divide the number of rows");
  }
  if (!is_regular_row_mask(y.mask, accel)) {
    throw ConfigError("SENSE block solve needs a mask keeping exactly every " + std::to_string(accel) + "th row");
  }
  if (smaps.ncoils() < accel) { throw ConfigError("SENSE block solve needs at least as many coils as the acceleration"); }

  SystemOperator const op(y.mask, smaps);
  Image const rhs = op.adjoint(y);

  // Every-nth-row sampling folds rows i, i + nx/n, ... together: A'A = (N/n) E'E per fold group.
  Index const n = accel;
  Index const fold = grid.nx / n;
  double const scale = double(grid.size()) / double(n);
  Image out(grid);
  CMatrix E(smaps.ncoils(), n);
  CVector b(n);
  for (Index i0 = 0; i0 < fold; ++i0) {
    for (Index j = 0; j < grid.ny; ++j) {
      for (Index s = 0; s < n; ++s) {
        Index const p = grid.flat(i0 + s * fold, j);
        E.col(s) = smaps.maps().row(p).transpose();
        b[s] = rhs.vec()[p];
      }
      CMatrix G = scale * (E.adjoint() * E);
      Eigen::LDLT<CMatrix> ldlt(G);
      if (ldlt.info() != Eigen::Success || !(ldlt.rcond() > 1e-12)) {
        double const ridge = 1e-8 * G.trace().real() / double(n);
        G.diagonal().array() += std::max(ridge, 1e-300);
        ldlt.compute(G);
      }
      CVector const xg = ldlt.solve(b);
      for (Index s = 0; s < n; ++s) { out.vec()[grid.flat(i0 + s * fold, j)] = xg[s]; }
    }
  }
  return out;
}

} // namespace pmri
