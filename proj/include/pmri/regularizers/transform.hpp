#pragma once

#include "pmri/core/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace pmri {

/// Sparsifying transform T: image (N) -> coefficients (K).
///
/// finite_diff_2d: periodic first differences along rows then columns, K = 2N.
/// odwt: orthogonal 2D Haar with `levels` dyadic levels, K = N, needs power-of-two grids.
/// identity: K = N.
/// stacked: children applied in order and concatenated.
///
/// An optional per-coefficient weight vector turns every 1-norm on the coefficients into a weighted 1-norm.
class Transform
{
public:
  enum class Kind
  {
    finite_diff_2d,
    odwt,
    identity,
    stacked
  };

  static Transform finite_diff(Grid grid);
  static Transform odwt(Grid grid, int levels);
  static Transform identity(Grid grid);
  static Transform stacked(std::vector<Transform> parts);

  Kind kind() const { return kind_; }
  Grid const &grid() const { return grid_; }
  int levels() const { return levels_; }
  std::vector<Transform> const &parts() const { return parts_; }
  std::string name() const;

  /// Number of coefficients K.
  Index rows() const;
  /// Number of image pixels N.
  Index cols() const { return grid_.size(); }

  CVector apply(Image const &x) const { return apply(x.vec()); }
  CVector apply(CVector const &x) const;
  CVector adjoint(CVector const &coeffs) const;
  Image adjoint_image(CVector const &coeffs) const { return Image(grid_, adjoint(coeffs)); }

  /// Upper bound on ||T||^2 (8 for periodic 2D differences, 1 for Haar and identity).
  double norm_squared_bound() const;
  /// True when T'T = I.
  bool orthogonal() const { return kind_ == Kind::odwt || kind_ == Kind::identity; }
  /// Eigenvalues of the circulant T'T on the 2D DFT grid (flat, row-major).
  RVector gram_spectrum() const;

  Transform with_weights(RVector weights) const;
  /// Per-coefficient weights (all ones unless set).
  RVector weights() const;
  bool weighted() const { return weights_.has_value(); }

  /// sum_k w_k |c_k|
  double l1_norm(CVector const &coeffs) const;

private:
  Transform(Kind kind, Grid grid)
    : kind_{kind}
    , grid_{grid}
  {
  }

  void apply_into(CVector const &x, Eigen::Ref<CVector> out) const;
  void adjoint_accumulate(Eigen::Ref<CVector const> coeffs, CVector &out) const;

  Kind kind_;
  Grid grid_;
  int levels_ = 0;
  std::vector<Transform> parts_;
  std::optional<RVector> weights_;
};

/// Huber-split regularizer min_z 0.5||Tx - z||^2 + alpha ||z||_1, evaluated in closed form.
double huber_split_value(Transform const &T, Image const &x, double alpha);
/// The minimizing z of the split, soft(Tx, alpha).
CVector huber_split_minimizer(Transform const &T, Image const &x, double alpha);

} // namespace pmri
