#include "pmri/patch/sparse_coding.hpp"

#include "pmri/regularizers/potential.hpp"
#include "pmri/solvers/proximal.hpp"

#include <Eigen/SVD>

namespace pmri {

Index count_nonzeros(CMatrix const &z)
{
  Index n = 0;
  for (Index k = 0; k < z.size(); ++k) { n += z.data()[k] != Complex{0, 0}; }
  return n;
}

RVector synthesis_patch_objective(Dictionary const &D, CMatrix const &patches, CMatrix const &z, double alpha)
{
  CMatrix const r = patches - D.atoms() * z;
  RVector out(patches.cols());
  for (Index p = 0; p < patches.cols(); ++p) {
    out[p] = 0.5 * r.col(p).squaredNorm() + alpha * z.col(p).cwiseAbs().sum();
  }
  return out;
}

namespace {

double dictionary_lipschitz(Dictionary const &D)
{
  Eigen::JacobiSVD<CMatrix> svd(D.atoms());
  double const s = svd.singularValues()[0];
  return s * s;
}

CMatrix coding_step(Dictionary const &D, CMatrix const &patches, CMatrix const &z, double alpha, double L)
{
  CMatrix const grad = D.atoms().adjoint() * (D.atoms() * z - patches);
  CMatrix v = z - grad / L;
  for (Index k = 0; k < v.size(); ++k) { v.data()[k] = soft_threshold(v.data()[k], alpha / L); }
  return v;
}

} // namespace

double synthesis_kkt_residual(Dictionary const &D, CMatrix const &patches, CMatrix const &z, double alpha, double L)
{
  CMatrix const d = z - coding_step(D, patches, z, alpha, L);
  double m = 0;
  for (Index p = 0; p < d.cols(); ++p) { m = std::max(m, d.col(p).norm()); }
  return m;
}

SparseCodes sparse_code_synthesis(Dictionary const &D, CMatrix const &patches, double alpha,
                                  SynthesisCodingOptions const &opts, CMatrix const *warm)
{
  if (!(alpha > 0)) { throw ConfigError("sparse coding needs alpha > 0"); }
  if (patches.rows() != D.dim()) { throw DimensionError("patch length does not match the dictionary"); }
  Index const J = D.size();
  Index const P = patches.cols();
  if (warm && (warm->rows() != J || warm->cols() != P)) { throw DimensionError("warm-start codes have the wrong shape"); }

  double const L = dictionary_lipschitz(D);
  CMatrix const &Dm = D.atoms();
  CompositeProblem problem;
  problem.smooth_value = [&](CVector const &v) {
    Eigen::Map<CMatrix const> z(v.data(), J, P);
    return 0.5 * (Dm * z - patches).squaredNorm();
  };
  problem.smooth_gradient = [&](CVector const &v) {
    Eigen::Map<CMatrix const> z(v.data(), J, P);
    CMatrix g = Dm.adjoint() * (Dm * z - patches);
    return CVector(Eigen::Map<CVector>(g.data(), g.size()));
  };
  problem.nonsmooth_value = [alpha](CVector const &v) { return alpha * v.cwiseAbs().sum(); };
  problem.prox = [alpha](CVector const &v, RVector const &step) { return soft_threshold(v, RVector(alpha * step)); };

  PogmOptions po;
  po.iters = opts.max_iters;
  po.record = false;
  po.restart = RestartRule::gradient;
  po.fixed_point_tol = opts.kkt_tol;
  po.residual_norm = [J, P](CVector const &v) {
    Eigen::Map<CMatrix const> d(v.data(), J, P);
    return d.colwise().norm().maxCoeff();
  };

  CMatrix z0 = warm ? *warm : CMatrix::Zero(J, P);
  int iterations = 0;
  SolverResult res =
    pogm(problem, Eigen::Map<CVector>(z0.data(), z0.size()), L, po, [&](PogmState const &s) { iterations = s.k; });

  SparseCodes out;
  out.z = Eigen::Map<CMatrix>(res.x.data(), J, P);
  out.iterations = iterations;
  if (warm) {
    RVector const fresh = synthesis_patch_objective(D, patches, out.z, alpha);
    RVector const prior = synthesis_patch_objective(D, patches, *warm, alpha);
    for (Index p = 0; p < P; ++p) {
      if (prior[p] < fresh[p]) { out.z.col(p) = warm->col(p); }
    }
  }
  out.nonzeros = count_nonzeros(out.z);
  out.kkt_residual = synthesis_kkt_residual(D, patches, out.z, alpha, L);
  return out;
}

SparseCodes sparse_code_analysis(TransformModel const &omega, CMatrix const &patches, double alpha)
{
  if (!(alpha >= 0)) { throw ConfigError("sparse coding needs alpha >= 0"); }
  if (patches.rows() != omega.dim()) { throw DimensionError("patch length does not match the transform"); }
  SparseCodes out;
  out.z = omega.omega() * patches;
  if (alpha > 0) {
    for (Index k = 0; k < out.z.size(); ++k) { out.z.data()[k] = soft_threshold(out.z.data()[k], alpha); }
  }
  out.nonzeros = count_nonzeros(out.z);
  return out;
}

} // namespace pmri
