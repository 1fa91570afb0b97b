#pragma once

#include "pmri/core/types.hpp"

namespace pmri {

/// Synthesis dictionary with atoms as columns (d x J).
class Dictionary
{
public:
  static constexpr double kUnitTolerance = 1e-10;

  Dictionary() = default;
  /// With `unit_norm` set the columns are normalized; zero columns are rejected.
  Dictionary(CMatrix atoms, bool unit_norm = true);

  /// Overcomplete separable DCT for h x w patches with J atoms (J >= h w recommended).
  static Dictionary overcomplete_dct(Index h, Index w, Index J);

  Index dim() const { return atoms_.rows(); }
  Index size() const { return atoms_.cols(); }
  CMatrix const &atoms() const { return atoms_; }
  bool unit_norm() const { return unit_norm_; }

  /// Replaces atom j; the new atom is normalized when the dictionary is unit-norm.
  void set_atom(Index j, CVector const &atom);
  /// Largest column-norm deviation from 1.
  double unit_norm_error() const;

private:
  CMatrix atoms_;
  bool unit_norm_ = true;
};

/// Square sparsifying transform applied to vectorized patches.
class TransformModel
{
public:
  static constexpr double kUnitaryTolerance = 1e-10;

  TransformModel() = default;
  /// `unitary` asks for the constraint to be checked and kept by updates.
  explicit TransformModel(CMatrix omega, bool unitary = true);

  /// Separable orthonormal 2D DCT-II for h x w patches, kron(C_h, C_w) on row-major patches.
  static TransformModel dct2(Index h, Index w);

  Index dim() const { return omega_.rows(); }
  CMatrix const &omega() const { return omega_; }
  bool unitary() const { return unitary_; }
  /// ||Omega' Omega - I||_max
  double unitarity_error() const;

private:
  CMatrix omega_;
  bool unitary_ = true;
};

/// Orthonormal DCT-II matrix of size n (rows are frequencies).
CMatrix dct_matrix(Index n);

/// Unitary Omega minimizing ||Omega X - Z||_F: Omega = V U' from the SVD X Z' = U S V'.
CMatrix procrustes(CMatrix const &X, CMatrix const &Z);

/// Rotates each row by a unit phase so its first nonzero entry is real and nonnegative.
CMatrix canonicalize_row_phase(CMatrix omega, double zero_tol = 1e-12);

} // namespace pmri
