#include "pmri/patch/adaptive.hpp"

#include "pmri/regularizers/potential.hpp"
#include "pmri/solvers/linear.hpp"

#include <cmath>

namespace pmri {

namespace {

// min_z 0.5|v - z|^2 + alpha |z|, summed.
double huber_envelope(CMatrix const &v, double alpha)
{
  if (alpha == 0) { return 0.0; }
  double s = 0;
  for (Index k = 0; k < v.size(); ++k) {
    double const r = std::abs(v.data()[k]);
    s += r <= alpha ? 0.5 * r * r : alpha * r - 0.5 * alpha * alpha;
  }
  return s;
}

void check_patch_problem(SystemOperator const &op, KSpaceData const &y, PatchConfig const &cfg, Index dim,
                         double lambda, double alpha, Image const &x0)
{
  if (!(lambda >= 0) || !std::isfinite(lambda)) { throw ConfigError("regularization parameter must be >= 0"); }
  if (!(alpha >= 0) || !std::isfinite(alpha)) { throw ConfigError("sparsity parameter must be >= 0"); }
  cfg.validate(op.grid());
  require_grid(op.grid(), x0.grid(), "patch-adaptive initial image");
  if (cfg.patch_size() != dim) { throw DimensionError("patch size does not match the transform or dictionary"); }
  if (!(y.mask == op.mask()) || y.ncoils() != op.ncoils()) { throw ConfigError("k-space data does not match the operator"); }
}

CVector data_gradient(SystemOperator const &op, KSpaceData const &y, CVector const &x)
{
  KSpaceData r = op.forward(Image(op.grid(), x));
  r.samples -= y.samples;
  return op.adjoint(r).vec();
}

// Solves (A'A + lambda diag(c)) x = A'y + lambda b with `iters` warm-started CG steps.
CVector patch_quadratic_step(SystemOperator const &op, KSpaceData const &y, RVector const &coverage, double lambda,
                             CVector const &b, CVector const &x, int iters)
{
  Grid const grid = op.grid();
  LinearMap const H = [&](CVector const &v) {
    CVector h = op.gram(Image(grid, v)).vec();
    h.array() += lambda * coverage.array() * v.array();
    return h;
  };
  CVector const rhs = op.adjoint(y).vec() + lambda * b;
  return conjugate_gradient(H, rhs, x, iters).x;
}

} // namespace

double analysis_patch_objective(SystemOperator const &op, KSpaceData const &y, PatchConfig const &cfg,
                                TransformModel const &omega, double lambda, double alpha, Image const &x)
{
  double v = op.data_cost(x, y);
  if (lambda > 0) { v += lambda * huber_envelope(omega.omega() * extract_patches(cfg, x), alpha); }
  return v;
}

double dlmri_objective(SystemOperator const &op, KSpaceData const &y, PatchConfig const &cfg,
                       Dictionary const &D, CMatrix const &z, double lambda, double alpha, Image const &x)
{
  double v = op.data_cost(x, y);
  if (lambda > 0) { v += lambda * synthesis_patch_objective(D, extract_patches(cfg, x), z, alpha).sum(); }
  return v;
}

Image patch_denoise(PatchConfig const &cfg, TransformModel const &omega, double alpha, Image const &x)
{
  SparseCodes const codes = sparse_code_analysis(omega, extract_patches(cfg, x), alpha);
  return aggregate_patches(cfg, x.grid(), omega.omega().adjoint() * codes.z);
}

ImageResult analysis_alternate(SystemOperator const &op, KSpaceData const &y, PatchConfig const &cfg,
                               TransformModel const &omega, double lambda, double alpha, Image const &x0,
                               SolverOptions const &opts)
{
  check_patch_problem(op, y, cfg, omega.dim(), lambda, alpha, x0);
  if (!omega.unitary()) { throw ConfigError("analysis_alternate needs a unitary transform"); }
  RVector const coverage = patch_coverage(cfg, op.grid());
  RVector const step_inv = (data_lipschitz(op) + lambda * coverage.array()).matrix();
  if (!(step_inv.array() > 0).all()) { throw ConfigError("analysis_alternate: the majorizer is singular (no data and lambda = 0)"); }

  TraceRecorder rec(opts);
  Image x = x0;
  double prev = analysis_patch_objective(op, y, cfg, omega, lambda, alpha, x);
  rec.record(0, prev, x.vec());
  for (int k = 1; k <= opts.iters; ++k) {
    CVector g = data_gradient(op, y, x.vec());
    if (lambda > 0) {
      Image const xt = patch_denoise(cfg, omega, alpha, x);
      g.array() += lambda * (coverage.array() * x.vec().array() - xt.vec().array());
    }
    x.vec().array() -= g.array() / step_inv.array();
    require_finite(x.vec(), "analysis_alternate", k);
    double const cur = analysis_patch_objective(op, y, cfg, omega, lambda, alpha, x);
    require_nonincreasing(prev, cur, 1e-10, "analysis_alternate", k);
    rec.record(k, cur, x.vec());
    prev = cur;
    if (rec.converged()) {
      rec.stopped_early();
      break;
    }
  }
  return {std::move(x), rec.take()};
}

TlmriResult tlmri(SystemOperator const &op, KSpaceData const &y, PatchConfig const &cfg, TransformModel omega0,
                  double lambda, double alpha, Image const &x0, TlmriOptions const &opts)
{
  check_patch_problem(op, y, cfg, omega0.dim(), lambda, alpha, x0);
  if (!omega0.unitary()) { throw ConfigError("tlmri keeps the transform unitary; the initial transform must be unitary"); }
  if (!(lambda > 0)) { throw ConfigError("tlmri needs lambda > 0"); }
  if (opts.inner_cg < 1) { throw ConfigError("tlmri needs at least one inner CG iteration"); }
  RVector const coverage = patch_coverage(cfg, op.grid());

  TlmriResult out{x0, std::move(omega0), {}};
  TraceRecorder rec(opts);
  double prev = analysis_patch_objective(op, y, cfg, out.omega, lambda, alpha, out.x);
  rec.record(0, prev, out.x.vec());
  for (int k = 1; k <= opts.iters; ++k) {
    CMatrix const X = extract_patches(cfg, out.x);
    CMatrix const Z = sparse_code_analysis(out.omega, X, alpha).z;
    if (opts.update_transform) { out.omega = TransformModel(procrustes(X, Z), true); }
    Image const b = aggregate_patches(cfg, op.grid(), out.omega.omega().adjoint() * Z);
    out.x.vec() = patch_quadratic_step(op, y, coverage, lambda, b.vec(), out.x.vec(), opts.inner_cg);
    require_finite(out.x.vec(), "tlmri", k);
    double const cur = analysis_patch_objective(op, y, cfg, out.omega, lambda, alpha, out.x);
    require_nonincreasing(prev, cur, 1e-10, "tlmri", k);
    rec.record(k, cur, out.x.vec());
    prev = cur;
    if (rec.converged()) {
      rec.stopped_early();
      break;
    }
  }
  out.trace = rec.take();
  return out;
}

int update_dictionary(Dictionary &D, CMatrix const &patches, CMatrix const &z)
{
  if (patches.rows() != D.dim() || z.rows() != D.size() || z.cols() != patches.cols()) {
    throw DimensionError("dictionary update shapes do not match");
  }
  CMatrix R = patches - D.atoms() * z;
  int reseeded = 0;
  for (Index j = 0; j < D.size(); ++j) {
    auto zj = z.row(j);
    double const zn2 = zj.squaredNorm();
    if (zn2 == 0) {
      Index worst = 0;
      double const worst_norm = R.colwise().norm().maxCoeff(&worst);
      if (worst_norm > 0) {
        D.set_atom(j, R.col(worst));
        ++reseeded;
      }
      continue;
    }
    CMatrix const E = R + D.atoms().col(j) * zj;
    CVector v = E * zj.adjoint();
    if (!(v.norm() > 0)) { continue; }
    if (!D.unit_norm()) { v /= zn2; }
    D.set_atom(j, v);
    R = E - D.atoms().col(j) * zj;
  }
  return reseeded;
}

DlmriResult dlmri(SystemOperator const &op, KSpaceData const &y, PatchConfig const &cfg, Dictionary D0,
                  double lambda, double alpha, Image const &x0, DlmriOptions const &opts)
{
  check_patch_problem(op, y, cfg, D0.dim(), lambda, alpha, x0);
  if (!(lambda > 0) || !(alpha > 0)) { throw ConfigError("dlmri needs lambda > 0 and alpha > 0"); }
  if (opts.inner_cg < 1) { throw ConfigError("dlmri needs at least one inner CG iteration"); }
  RVector const coverage = patch_coverage(cfg, op.grid());
  Index const P = cfg.count(op.grid());

  DlmriResult out{x0, std::move(D0), {}, {}};
  out.codes.z = CMatrix::Zero(out.dictionary.size(), P);
  TraceRecorder rec(opts);
  double prev = dlmri_objective(op, y, cfg, out.dictionary, out.codes.z, lambda, alpha, out.x);
  rec.record(0, prev, out.x.vec());
  for (int k = 1; k <= opts.iters; ++k) {
    CMatrix const X = extract_patches(cfg, out.x);
    CMatrix const warm = out.codes.z;
    out.codes = sparse_code_synthesis(out.dictionary, X, alpha, opts.coding, &warm);
    int const reseeded = update_dictionary(out.dictionary, X, out.codes.z);
    if (reseeded > 0) { rec.event("dlmri: re-seeded " + std::to_string(reseeded) + " unused atoms at iteration " + std::to_string(k)); }
    Image const b = aggregate_patches(cfg, op.grid(), out.dictionary.atoms() * out.codes.z);
    out.x.vec() = patch_quadratic_step(op, y, coverage, lambda, b.vec(), out.x.vec(), opts.inner_cg);
    require_finite(out.x.vec(), "dlmri", k);
    double const cur = dlmri_objective(op, y, cfg, out.dictionary, out.codes.z, lambda, alpha, out.x);
    if (cur > prev + 1e-8 * std::abs(prev)) {
      rec.event("dlmri: objective increased at iteration " + std::to_string(k) + " (inexact sparse coding)");
    }
    rec.record(k, cur, out.x.vec());
    prev = cur;
    if (rec.converged()) {
      rec.stopped_early();
      break;
    }
  }
  out.trace = rec.take();
  return out;
}

} // namespace pmri
