#include "pmri/solvers/splitting.hpp"

#include "pmri/regularizers/potential.hpp"

#include <cmath>

namespace pmri {

double analysis_l1_cost(SystemOperator const &op, KSpaceData const &y, Transform const &T, double lambda, Image const &x)
{
  double v = op.data_cost(x, y);
  if (lambda > 0) { v += lambda * T.l1_norm(T.apply(x)); }
  return v;
}

AdmmResult admm_analysis(SystemOperator const &op, KSpaceData const &y, Transform const &T, double lambda,
                         Image const &x0, AdmmOptions const &opts, std::optional<AdmmBasicState> const &init)
{
  if (!(lambda >= 0)) { throw ConfigError("regularization parameter must be >= 0"); }
  if (opts.mu < 0 || !std::isfinite(opts.mu)) { throw ConfigError("ADMM penalty mu must be positive"); }
  if (opts.inner_cg < 1) { throw ConfigError("ADMM needs at least one inner CG iteration"); }
  require_grid(op.grid(), x0.grid(), "admm_analysis");
  require_grid(op.grid(), T.grid(), "admm_analysis transform");

  double const mu = opts.mu > 0 ? opts.mu : (lambda > 0 ? lambda : 1.0);
  Grid const grid = op.grid();
  RVector const thresh = (lambda / mu) * T.weights();
  CVector const Aty = op.adjoint(y).vec();
  LinearMap const H = [&](CVector const &v) { return CVector(op.gram(Image(grid, v)).vec() + mu * T.adjoint(T.apply(v))); };

  AdmmResult out;
  AdmmBasicState &s = out.state;
  s.mu = mu;
  s.x = x0;
  if (init) {
    if (init->z.size() != T.rows() || init->eta.size() != T.rows()) { throw DimensionError("ADMM initial state size mismatch"); }
    s.z = init->z;
    s.eta = init->eta;
  } else {
    s.z = T.apply(x0);
    s.eta = CVector::Zero(T.rows());
  }

  TraceRecorder rec(opts);
  rec.record(0, analysis_l1_cost(op, y, T, lambda, s.x), s.x.vec());
  double checkpoint = -1;
  for (int k = 1; k <= opts.iters; ++k) {
    s.z = soft_threshold(CVector(T.apply(s.x) + s.eta), thresh);
    CVector const rhs = Aty + mu * T.adjoint(CVector(s.z - s.eta));
    s.x.vec() = conjugate_gradient(H, rhs, s.x.vec(), opts.inner_cg).x;
    require_finite(s.x.vec(), "admm_analysis", k);
    CVector const r = T.apply(s.x) - s.z;
    s.eta += r;
    out.constraint_residual.push_back(r.norm());
    rec.record(k, analysis_l1_cost(op, y, T, lambda, s.x), s.x.vec());
    if (k % 100 == 0) {
      if (checkpoint >= 0 && r.norm() > checkpoint && r.norm() > 1e-12) {
        rec.event("admm_analysis: constraint residual grew over the last 100 iterations (iteration " + std::to_string(k) + ")");
      }
      checkpoint = r.norm();
    }
    if (rec.converged()) {
      rec.stopped_early();
      break;
    }
  }
  out.trace = rec.take();
  return out;
}

StructuredPenalties condition_penalties(SystemOperator const &op, Transform const &T, double kappa)
{
  if (!(kappa > 1)) { throw ConfigError("target condition number must exceed 1"); }
  double const n = double(op.grid().size());
  StructuredPenalties mu;
  mu.mu_u = n / (kappa - 1.0);

  RVector const cc = op.smaps().sum_of_squares();
  double const cmax = cc.maxCoeff();
  double const cmin = cc.minCoeff();
  mu.mu_v = std::max(mu.mu_u, mu.mu_u * (cmax - kappa * cmin) / (kappa - 1.0));

  RVector const spec = T.gram_spectrum();
  double const smax = spec.maxCoeff();
  double const smin = spec.minCoeff();
  // (mu_z smax + mu_v) / (mu_z smin + mu_v) <= kappa
  double const denom = smax - kappa * smin;
  mu.mu_z = denom > 0 ? mu.mu_v * (kappa - 1.0) / denom : mu.mu_v;
  return mu;
}

AdmmStructured::AdmmStructured(SystemOperator op, KSpaceData y, Transform T, double lambda, StructuredPenalties mu)
  : op_{std::move(op)}
  , y_{std::move(y)}
  , T_{std::move(T)}
  , lambda_{lambda}
  , mu_{mu}
{
  if (!(lambda_ >= 0)) { throw ConfigError("regularization parameter must be >= 0"); }
  if (!(mu_.mu_u > 0 && mu_.mu_z > 0 && mu_.mu_v > 0)) { throw ConfigError("structured ADMM penalties must be positive"); }
  require_grid(op_.grid(), T_.grid(), "admm_structured transform");
  zero_filled_ = op_.zero_filled(y_);
  mask_w_ = op_.mask().weights();
  tt_spectrum_ = T_.gram_spectrum();
  if (tt_spectrum_.size() != op_.grid().size()) {
    throw UnsupportedError("structured ADMM needs a transform with circulant T'T");
  }
  cc_ = op_.smaps().sum_of_squares();
}

void AdmmStructured::initialize(Image const &x0)
{
  require_grid(op_.grid(), x0.grid(), "admm_structured");
  Index const N = op_.grid().size();
  Index const L = op_.ncoils();
  s_.x = x0;
  s_.u.resize(N, L);
  for (Index l = 0; l < L; ++l) { s_.u.col(l) = op_.smaps().coil(l).cwiseProduct(x0.vec()); }
  s_.v = x0.vec();
  s_.z = T_.apply(x0);
  s_.eta_u = CMatrix::Zero(N, L);
  s_.eta_z = CVector::Zero(T_.rows());
  s_.eta_v = CVector::Zero(N);
}

CVector AdmmStructured::u_target(Index l) const
{
  return op_.smaps().coil(l).cwiseProduct(s_.x.vec()) - s_.eta_u.col(l);
}

void AdmmStructured::update_u()
{
  // (F'S'SF + mu_u I) u_l = F'S'y_l + mu_u w_l, diagonal in k-space with an unnormalized F.
  double const n = double(op_.grid().size());
  for (Index l = 0; l < op_.ncoils(); ++l) {
    CVector khat = op_.coil_kspace(u_target(l));
    khat = (n * zero_filled_.col(l) + mu_.mu_u * khat).array() / (n * mask_w_.array() + mu_.mu_u);
    s_.u.col(l) = op_.coil_image_adjoint(khat) / n;
  }
}

CVector AdmmStructured::v_rhs() const
{
  return mu_.mu_z * T_.adjoint(CVector(s_.z + s_.eta_z)) + mu_.mu_v * (s_.x.vec() - s_.eta_v);
}

void AdmmStructured::update_v()
{
  // (mu_z T'T + mu_v I) v = rhs, diagonal in the DFT basis.
  double const n = double(op_.grid().size());
  CVector vhat = op_.coil_kspace(v_rhs());
  vhat.array() /= (mu_.mu_z * tt_spectrum_.array() + mu_.mu_v);
  s_.v = op_.coil_image_adjoint(vhat) / n;
}

CVector AdmmStructured::x_rhs() const
{
  CVector rhs = mu_.mu_v * (s_.v + s_.eta_v);
  for (Index l = 0; l < op_.ncoils(); ++l) {
    rhs += mu_.mu_u * op_.smaps().coil(l).conjugate().cwiseProduct(CVector(s_.u.col(l) + s_.eta_u.col(l)));
  }
  return rhs;
}

void AdmmStructured::update_x()
{
  // (mu_u C'C + mu_v I) x = rhs, diagonal in the image domain.
  s_.x.vec() = x_rhs().array() / (mu_.mu_u * cc_.array() + mu_.mu_v);
}

void AdmmStructured::update_z()
{
  s_.z = soft_threshold(CVector(T_.apply(s_.v) - s_.eta_z), RVector((lambda_ / mu_.mu_z) * T_.weights()));
}

void AdmmStructured::update_duals()
{
  for (Index l = 0; l < op_.ncoils(); ++l) {
    s_.eta_u.col(l) += s_.u.col(l) - op_.smaps().coil(l).cwiseProduct(s_.x.vec());
  }
  s_.eta_z += s_.z - T_.apply(s_.v);
  s_.eta_v += s_.v - s_.x.vec();
}

void AdmmStructured::step()
{
  update_u();
  update_v();
  update_x();
  update_z();
  update_duals();
}

double AdmmStructured::cost() const { return analysis_l1_cost(op_, y_, T_, lambda_, s_.x); }

double AdmmStructured::u_normal_residual() const
{
  double num = 0;
  double den = 0;
  for (Index l = 0; l < op_.ncoils(); ++l) {
    CVector const ul = s_.u.col(l);
    CVector k = op_.coil_kspace(ul);
    k.array() *= mask_w_.array();
    CVector const lhs = op_.coil_image_adjoint(k) + mu_.mu_u * ul;
    CVector const rhs = op_.coil_image_adjoint(zero_filled_.col(l)) + mu_.mu_u * u_target(l);
    num += (lhs - rhs).squaredNorm();
    den += rhs.squaredNorm();
  }
  return std::sqrt(num / std::max(den, 1e-300));
}

double AdmmStructured::v_normal_residual() const
{
  CVector const lhs = mu_.mu_z * T_.adjoint(T_.apply(s_.v)) + mu_.mu_v * s_.v;
  CVector const rhs = v_rhs();
  return (lhs - rhs).norm() / std::max(rhs.norm(), 1e-300);
}

double AdmmStructured::x_normal_residual() const
{
  CVector const lhs = (mu_.mu_u * cc_.array() + mu_.mu_v) * s_.x.vec().array();
  CVector const rhs = x_rhs();
  return (lhs - rhs).norm() / std::max(rhs.norm(), 1e-300);
}

std::array<double, 3> AdmmStructured::constraint_residuals() const
{
  double ru = 0;
  for (Index l = 0; l < op_.ncoils(); ++l) {
    ru += (s_.u.col(l) - op_.smaps().coil(l).cwiseProduct(s_.x.vec())).squaredNorm();
  }
  return {std::sqrt(ru), (s_.z - T_.apply(s_.v)).norm(), (s_.v - s_.x.vec()).norm()};
}

ImageResult admm_structured(SystemOperator const &op, KSpaceData const &y, Transform const &T, double lambda,
                            StructuredPenalties const &mu, Image const &x0, SolverOptions const &opts)
{
  AdmmStructured solver(op, y, T, lambda, mu);
  solver.initialize(x0);
  TraceRecorder rec(opts);
  rec.record(0, solver.cost(), solver.state().x.vec());
  for (int k = 1; k <= opts.iters; ++k) {
    solver.step();
    require_finite(solver.state().x.vec(), "admm_structured", k);
    rec.record(k, solver.cost(), solver.state().x.vec());
    if (rec.converged()) {
      rec.stopped_early();
      break;
    }
  }
  return {solver.state().x, rec.take()};
}

CVector project_inf_ball(CVector const &z, RVector const &w)
{
  CVector out(z.size());
  for (Index k = 0; k < z.size(); ++k) {
    double const r = std::abs(z[k]);
    if (r <= w[k]) {
      out[k] = z[k];
      continue;
    }
    Complex p = z[k] * (w[k] / r);
    // Rounding can leave |p| a few ulps above w; shrink until the bound holds exactly.
    while (std::abs(p) > w[k]) { p *= 1.0 - 0x1.0p-52; }
    out[k] = p;
  }
  return out;
}

ImageResult primal_dual(SystemOperator const &op, KSpaceData const &y, Transform const &T, double lambda,
                        Image const &x0, PrimalDualOptions const &opts, PrimalDualState *final_state)
{
  if (!(lambda >= 0)) { throw ConfigError("regularization parameter must be >= 0"); }
  require_grid(op.grid(), x0.grid(), "primal_dual");
  require_grid(op.grid(), T.grid(), "primal_dual transform");
  double const LA = data_lipschitz(op);
  double const tnorm2 = T.norm_squared_bound();
  double const tau = opts.tau > 0 ? opts.tau : 0.99 / LA;
  double sigma = opts.sigma;
  if (sigma <= 0) { sigma = lambda > 0 ? LA / (2.0 * lambda * lambda * tnorm2) : 1.0; }
  if (opts.tau < 0 || opts.sigma < 0) { throw ConfigError("primal-dual step sizes must be positive"); }
  double const stability = tau * (0.5 * LA + sigma * lambda * lambda * tnorm2);
  if (stability > 1.0 + 1e-12) {
    throw ConfigError("primal-dual step sizes violate tau (L/2 + sigma lambda^2 ||T||^2) <= 1 (got " +
                      std::to_string(stability) + ")");
  }

  Grid const grid = op.grid();
  RVector const w = T.weights();
  CVector x = x0.vec();
  CVector z = CVector::Zero(T.rows());
  TraceRecorder rec(opts);
  rec.record(0, analysis_l1_cost(op, y, T, lambda, x0), x);
  for (int k = 1; k <= opts.iters; ++k) {
    KSpaceData r = op.forward(Image(grid, x));
    r.samples -= y.samples;
    CVector grad = op.adjoint(r).vec();
    if (lambda > 0) { grad += lambda * T.adjoint(z); }
    CVector x_new = x - tau * grad;
    if (lambda > 0) {
      CVector const xbar = 2.0 * x_new - x;
      z = project_inf_ball(CVector(z + (sigma * lambda) * T.apply(xbar)), w);
    }
    x = std::move(x_new);
    require_finite(x, "primal_dual", k);
    rec.record(k, analysis_l1_cost(op, y, T, lambda, Image(grid, x)), x);
    if (rec.converged()) {
      rec.stopped_early();
      break;
    }
  }
  if (final_state) { *final_state = PrimalDualState{Image(grid, x), z, tau, sigma}; }
  return {Image(grid, std::move(x)), rec.take()};
}

} // namespace pmri
