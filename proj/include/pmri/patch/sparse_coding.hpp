#pragma once

#include "pmri/patch/dictionary.hpp"

namespace pmri {

/// Codes for P patches, one column per patch.
struct SparseCodes
{
  CMatrix z;
  Index nonzeros = 0;
  int iterations = 0; ///< inner iterations spent (synthesis only)
  double kkt_residual = 0;

  double density() const { return z.size() ? double(nonzeros) / double(z.size()) : 0.0; }
};

struct SynthesisCodingOptions
{
  int max_iters = 2000;
  /// Stop once every patch's prox fixed-point residual is below this.
  double kkt_tol = 1e-6;
};

/// argmin_z 0.5||p - D z||^2 + alpha ||z||_1 for each patch column, solved jointly by POGM.
/// When `warm` is given it seeds the iteration, and a patch keeps its warm code if that scores better.
SparseCodes sparse_code_synthesis(Dictionary const &D, CMatrix const &patches, double alpha,
                                  SynthesisCodingOptions const &opts = {}, CMatrix const *warm = nullptr);

/// argmin_z 0.5||Omega p - z||^2 + alpha ||z||_1 = soft(Omega p, alpha), per patch.
SparseCodes sparse_code_analysis(TransformModel const &omega, CMatrix const &patches, double alpha);

/// Per-patch LASSO objective 0.5||p - D z||^2 + alpha ||z||_1.
RVector synthesis_patch_objective(Dictionary const &D, CMatrix const &patches, CMatrix const &z, double alpha);

/// max_p ||z_p - soft(z_p - grad_p / L, alpha / L)|| for the synthesis LASSO with step 1/L.
double synthesis_kkt_residual(Dictionary const &D, CMatrix const &patches, CMatrix const &z, double alpha, double L);

Index count_nonzeros(CMatrix const &z);

} // namespace pmri
