#include "pmri/patch/dictionary.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <numbers>

namespace pmri {

Dictionary::Dictionary(CMatrix atoms, bool unit_norm)
  : atoms_{std::move(atoms)}
  , unit_norm_{unit_norm}
{
  if (atoms_.rows() == 0 || atoms_.cols() == 0) { throw DimensionError("dictionary must be non-empty"); }
  if (unit_norm_) {
    for (Index j = 0; j < atoms_.cols(); ++j) {
      double const n = atoms_.col(j).norm();
      if (!(n > 0)) { throw ConfigError("unit-norm dictionary cannot contain a zero atom"); }
      atoms_.col(j) /= n;
    }
  }
}

namespace {

// n x K overcomplete 1D DCT, non-constant atoms mean-free.
RMatrix overcomplete_dct_1d(Index n, Index K)
{
  RMatrix C(n, K);
  for (Index k = 0; k < K; ++k) {
    for (Index i = 0; i < n; ++i) { C(i, k) = std::cos(double(i) * double(k) * std::numbers::pi / double(K)); }
    if (k > 0) { C.col(k).array() -= C.col(k).mean(); }
    double const nrm = C.col(k).norm();
    if (nrm > 0) { C.col(k) /= nrm; }
  }
  return C;
}

} // namespace

Dictionary Dictionary::overcomplete_dct(Index h, Index w, Index J)
{
  if (h < 1 || w < 1 || J < 1) { throw ConfigError("dictionary shape must be positive"); }
  Index const Kh = std::max<Index>(1, Index(std::ceil(std::sqrt(double(J) * double(h) / double(w)))));
  Index const Kw = std::max<Index>(1, (J + Kh - 1) / Kh);
  RMatrix const Ch = overcomplete_dct_1d(h, Kh);
  RMatrix const Cw = overcomplete_dct_1d(w, Kw);
  CMatrix atoms(h * w, J);
  Index j = 0;
  for (Index a = 0; a < Kh && j < J; ++a) {
    for (Index b = 0; b < Kw && j < J; ++b, ++j) {
      for (Index r = 0; r < h; ++r) {
        for (Index c = 0; c < w; ++c) { atoms(r * w + c, j) = Ch(r, a) * Cw(c, b); }
      }
    }
  }
  // A one-pixel patch dimension makes some mean-free atoms vanish; fall back to unit vectors for those.
  for (Index k = 0; k < J; ++k) {
    if (!(atoms.col(k).norm() > 0)) {
      atoms.col(k).setZero();
      atoms(k % (h * w), k) = 1.0;
    }
  }
  return Dictionary(std::move(atoms), true);
}

void Dictionary::set_atom(Index j, CVector const &atom)
{
  if (atom.size() != dim()) { throw DimensionError("atom length does not match the dictionary"); }
  if (unit_norm_) {
    double const n = atom.norm();
    if (!(n > 0)) { throw ConfigError("unit-norm dictionary cannot contain a zero atom"); }
    atoms_.col(j) = atom / n;
  } else {
    atoms_.col(j) = atom;
  }
}

double Dictionary::unit_norm_error() const
{
  double e = 0;
  for (Index j = 0; j < atoms_.cols(); ++j) { e = std::max(e, std::abs(atoms_.col(j).norm() - 1.0)); }
  return e;
}

TransformModel::TransformModel(CMatrix omega, bool unitary)
  : omega_{std::move(omega)}
  , unitary_{unitary}
{
  if (omega_.rows() == 0 || omega_.rows() != omega_.cols()) { throw DimensionError("transform must be square"); }
  if (unitary_ && unitarity_error() > 1e-8) { throw ConfigError("transform is not unitary"); }
}

CMatrix dct_matrix(Index n)
{
  CMatrix C(n, n);
  for (Index k = 0; k < n; ++k) {
    double const s = std::sqrt((k == 0 ? 1.0 : 2.0) / double(n));
    for (Index i = 0; i < n; ++i) { C(k, i) = s * std::cos(std::numbers::pi * double(k) * (2.0 * double(i) + 1.0) / (2.0 * double(n))); }
  }
  return C;
}

TransformModel TransformModel::dct2(Index h, Index w)
{
  if (h < 1 || w < 1) { throw ConfigError("patch shape must be positive"); }
  CMatrix const Ch = dct_matrix(h);
  CMatrix const Cw = dct_matrix(w);
  CMatrix omega(h * w, h * w);
  for (Index a = 0; a < h; ++a) {
    for (Index b = 0; b < h; ++b) { omega.block(a * w, b * w, w, w) = Ch(a, b) * Cw; }
  }
  return TransformModel(std::move(omega), true);
}

double TransformModel::unitarity_error() const
{
  return (omega_.adjoint() * omega_ - CMatrix::Identity(dim(), dim())).cwiseAbs().maxCoeff();
}

CMatrix procrustes(CMatrix const &X, CMatrix const &Z)
{
  if (X.rows() != Z.rows() || X.cols() != Z.cols()) { throw DimensionError("procrustes inputs must have equal shape"); }
  Eigen::JacobiSVD<CMatrix> svd(X * Z.adjoint(), Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixV() * svd.matrixU().adjoint();
}

CMatrix canonicalize_row_phase(CMatrix omega, double zero_tol)
{
  for (Index r = 0; r < omega.rows(); ++r) {
    for (Index c = 0; c < omega.cols(); ++c) {
      double const m = std::abs(omega(r, c));
      if (m > zero_tol) {
        omega.row(r) *= std::conj(omega(r, c)) / m;
        break;
      }
    }
  }
  return omega;
}

} // namespace pmri
