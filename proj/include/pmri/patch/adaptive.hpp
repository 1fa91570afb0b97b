#pragma once

#include "pmri/core/model.hpp"
#include "pmri/patch/sparse_coding.hpp"
#include "pmri/regularizers/patches.hpp"
#include "pmri/solvers/trace.hpp"

namespace pmri {

/// 0.5||Ax - y||^2 + lambda sum_p min_z [0.5||Omega P_p x - z||^2 + alpha||z||_1].
/// The inner minimum is the Huber function of each coefficient, so this needs no codes.
double analysis_patch_objective(SystemOperator const &op, KSpaceData const &y, PatchConfig const &cfg,
                                TransformModel const &omega, double lambda, double alpha, Image const &x);

/// 0.5||Ax - y||^2 + lambda sum_p [0.5||P_p x - D z_p||^2 + alpha||z_p||_1].
double dlmri_objective(SystemOperator const &op, KSpaceData const &y, PatchConfig const &cfg,
                       Dictionary const &D, CMatrix const &z, double lambda, double alpha, Image const &x);

/// Patch denoise x~ = sum_p P_p' Omega' soft(Omega P_p x, alpha).
Image patch_denoise(PatchConfig const &cfg, TransformModel const &omega, double alpha, Image const &x);

/// Alternates the patch denoise with a majorized gradient step
///   x+ = x - (L_A + lambda c)^{-1} (A'(Ax - y) + lambda (c x - x~)),
/// where c is the patch coverage (c = d for stride 1). Monotone in analysis_patch_objective (asserted).
ImageResult analysis_alternate(SystemOperator const &op, KSpaceData const &y, PatchConfig const &cfg,
                               TransformModel const &omega, double lambda, double alpha, Image const &x0,
                               SolverOptions const &opts);

struct TlmriOptions : SolverOptions
{
  int inner_cg = 5;
  /// Off keeps Omega fixed (plain analysis regularization with exact x-steps).
  bool update_transform = true;
};

struct TlmriResult
{
  Image x;
  TransformModel omega;
  SolverTrace trace;
};

/// Block coordinate descent over codes (soft thresholding), a unitary Omega (Procrustes), and x (warm CG).
/// Every block is a descent step, so analysis_patch_objective is asserted nonincreasing.
TlmriResult tlmri(SystemOperator const &op, KSpaceData const &y, PatchConfig const &cfg, TransformModel omega0,
                  double lambda, double alpha, Image const &x0, TlmriOptions const &opts);

struct DlmriOptions : SolverOptions
{
  int inner_cg = 5;
  SynthesisCodingOptions coding;
};

struct DlmriResult
{
  Image x;
  Dictionary dictionary;
  SparseCodes codes;
  SolverTrace trace;
};

/// Block coordinate descent over codes (LASSO), atoms (one at a time), and x (warm CG).
/// Codes start at zero; unused atoms are re-seeded from the worst-represented patch.
DlmriResult dlmri(SystemOperator const &op, KSpaceData const &y, PatchConfig const &cfg, Dictionary D0,
                  double lambda, double alpha, Image const &x0, DlmriOptions const &opts);

/// Sequential single-atom updates d_j = E_j z_j' / ||E_j z_j'|| with E_j the residual without atom j.
/// Returns how many atoms were re-seeded.
int update_dictionary(Dictionary &D, CMatrix const &patches, CMatrix const &z);

} // namespace pmri
