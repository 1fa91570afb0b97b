#include "pmri/solvers/smooth.hpp"

#include "pmri/solvers/proximal.hpp"

#include <cmath>

namespace pmri {

SmoothCost::SmoothCost(SystemOperator op, KSpaceData y, double lambda, Transform T, Potential psi)
  : op_{std::move(op)}
  , y_{std::move(y)}
  , lambda_{lambda}
  , T_{std::move(T)}
  , psi_{psi}
{
  if (!(lambda_ >= 0) || !std::isfinite(lambda_)) { throw ConfigError("regularization parameter must be >= 0"); }
  if (!psi_.smooth()) { throw UnsupportedError("smooth cost needs a smooth potential; use the proximal solvers for abs"); }
  require_grid(op_.grid(), T_.grid(), "smooth cost transform");
  if (!(y_.mask == op_.mask()) || y_.ncoils() != op_.ncoils()) { throw ConfigError("k-space data does not match the operator"); }
}

double SmoothCost::value(CVector const &x) const
{
  Image const img(grid(), x);
  double v = op_.data_cost(img, y_);
  if (lambda_ > 0) { v += lambda_ * psi_.value(T_.apply(x)); }
  return v;
}

CVector SmoothCost::gradient(CVector const &x) const
{
  Image const img(grid(), x);
  KSpaceData r = op_.forward(img);
  r.samples -= y_.samples;
  CVector g = op_.adjoint(r).vec();
  if (lambda_ > 0) { g += lambda_ * T_.adjoint(psi_.gradient(T_.apply(x))); }
  return g;
}

double SmoothCost::lipschitz() const
{
  return data_lipschitz(op_) + lambda_ * T_.norm_squared_bound() * psi_.max_curvature();
}

CVector SmoothCost::hessian_apply(CVector const &x) const
{
  CVector h = op_.gram(Image(grid(), x)).vec();
  if (lambda_ > 0) { h += lambda_ * T_.adjoint(T_.apply(x)); }
  return h;
}

CVector SmoothCost::data_adjoint() const { return op_.adjoint(y_).vec(); }

CgQuadraticResult cg_quadratic(SmoothCost const &cost, Image const &x0, CgOptions const &opts)
{
  if (cost.potential().kind() != Potential::Kind::quadratic) {
    throw ConfigError("cg_quadratic needs the quadratic potential; use ncg or ogm for edge-preserving costs");
  }
  require_grid(cost.grid(), x0.grid(), "cg_quadratic");
  TraceRecorder rec(opts);
  if (opts.record) { rec.record(0, cost.value(x0.vec()), x0.vec()); }

  LinearMap const H = [&cost](CVector const &v) { return cost.hessian_apply(v); };
  LinearMap precond;
  if (opts.preconditioned) {
    RVector spectrum = gram_circulant_spectrum(cost.op());
    if (cost.lambda() > 0) { spectrum += cost.lambda() * cost.transform().gram_spectrum(); }
    precond = CirculantPreconditioner(cost.grid(), std::move(spectrum)).as_map();
  }
  auto on_iter = [&](int k, CVector const &x) {
    if (opts.record) { rec.record(k, cost.value(x), x); }
  };
  CgResult cg = conjugate_gradient(H, cost.data_adjoint(), x0.vec(), opts.iters, opts.residual_tol, precond, on_iter);
  if (cg.iterations < opts.iters) { rec.stopped_early(); }
  return CgQuadraticResult{Image(cost.grid(), std::move(cg.x)), rec.take(), cg.iterations, cg.relative_residual};
}

ImageResult gradient_descent(SmoothCost const &cost, Image const &x0, double L, SolverOptions const &opts)
{
  if (!(L > 0)) { throw ConfigError("gradient descent needs a positive Lipschitz constant"); }
  require_grid(cost.grid(), x0.grid(), "gradient_descent");
  TraceRecorder rec(opts);
  CVector x = x0.vec();
  double prev = cost.value(x);
  rec.record(0, prev, x);
  for (int k = 1; k <= opts.iters; ++k) {
    x -= cost.gradient(x) / L;
    require_finite(x, "gradient_descent", k);
    double const cur = cost.value(x);
    require_nonincreasing(prev, cur, 1e-12, "gradient_descent", k);
    rec.record(k, cur, x);
    prev = cur;
    if (rec.converged()) {
      rec.stopped_early();
      break;
    }
  }
  return {Image(cost.grid(), std::move(x)), rec.take()};
}

namespace {

// phi(a) = 0.5||r + a Ad||^2 + lambda sum psi(tx + a td) along a search direction.
struct LineFunction
{
  CMatrix const &r;
  CMatrix const &Ad;
  CVector const &tx;
  CVector const &td;
  double lambda;
  Potential const &psi;

  double value(double a) const
  {
    double v = 0.5 * (r + a * Ad).squaredNorm();
    if (lambda > 0) { v += lambda * psi.value(CVector(tx + a * td)); }
    return v;
  }

  double derivative(double a) const
  {
    double d = (Ad.conjugate().cwiseProduct(r + a * Ad)).sum().real();
    if (lambda > 0) {
      double s = 0;
      for (Index k = 0; k < tx.size(); ++k) {
        Complex const z = tx[k] + a * td[k];
        s += (std::conj(td[k]) * psi.gradient(z)).real();
      }
      d += lambda * s;
    }
    return d;
  }

  // Curvature of the Huber-type quadratic majorizer of phi at a.
  double curvature(double a) const
  {
    double c = Ad.squaredNorm();
    if (lambda > 0) {
      double s = 0;
      for (Index k = 0; k < tx.size(); ++k) { s += psi.weight(std::abs(tx[k] + a * td[k])) * std::norm(td[k]); }
      c += lambda * s;
    }
    return c;
  }
};

} // namespace

ImageResult ncg(SmoothCost const &cost, Image const &x0, SolverOptions const &opts)
{
  require_grid(cost.grid(), x0.grid(), "ncg");
  constexpr double armijo_c = 1e-4;
  SystemOperator const &op = cost.op();
  Transform const &T = cost.transform();
  double const lambda = cost.lambda();
  Potential const &psi = cost.potential();
  Grid const grid = cost.grid();

  TraceRecorder rec(opts);
  CVector x = x0.vec();
  CMatrix r = op.forward(x0).samples - cost.data().samples;
  CVector tx = T.apply(x);
  auto grad_at = [&](CMatrix const &res, CVector const &t) {
    CVector g = op.adjoint(KSpaceData(op.mask(), res)).vec();
    if (lambda > 0) { g += lambda * T.adjoint(psi.gradient(t)); }
    return g;
  };
  auto cost_at = [&](CMatrix const &res, CVector const &t) {
    double v = 0.5 * res.squaredNorm();
    if (lambda > 0) { v += lambda * psi.value(t); }
    return v;
  };

  CVector g = grad_at(r, tx);
  CVector d = -g;
  double phi0 = cost_at(r, tx);
  rec.record(0, phi0, x);

  for (int k = 1; k <= opts.iters; ++k) {
    double const gnorm2 = g.squaredNorm();
    if (gnorm2 == 0) {
      rec.event("ncg: zero gradient at iteration " + std::to_string(k - 1));
      rec.stopped_early();
      break;
    }
    if (re_dot(d, g) >= 0) {
      d = -g;
      rec.event("ncg: restart to steepest descent at iteration " + std::to_string(k));
    }

    CMatrix Ad = op.forward(Image(grid, d)).samples;
    CVector td = T.apply(d);
    LineFunction line{r, Ad, tx, td, lambda, psi};
    double const slope = re_dot(g, d);

    // Majorize-minimize steps along d, seeded by the quadratic fit at a = 0.
    double a = 0;
    for (int it = 0; it < 30; ++it) {
      double const curv = line.curvature(a);
      if (!(curv > 0)) { break; }
      double const next = a - line.derivative(a) / curv;
      bool const settled = std::abs(next - a) <= 1e-12 * std::abs(next);
      a = next;
      if (settled) { break; }
    }
    double phi = line.value(a);
    int halvings = 0;
    while (!(phi <= phi0 + armijo_c * a * slope) && halvings < 40) {
      a *= 0.5;
      phi = line.value(a);
      ++halvings;
    }
    if (!(phi <= phi0 + armijo_c * a * slope) || !(a > 0)) {
      // Fall back to a plain gradient step with the Lipschitz step size.
      rec.event("ncg: line search failed at iteration " + std::to_string(k) + ", taking a gradient step");
      d = -g;
      Ad = op.forward(Image(grid, d)).samples;
      td = T.apply(d);
      a = 1.0 / cost.lipschitz();
      LineFunction fallback{r, Ad, tx, td, lambda, psi};
      phi = fallback.value(a);
    }

    x += a * d;
    r += a * Ad;
    tx += a * td;
    require_finite(x, "ncg", k);

    CVector const g_new = grad_at(r, tx);
    double const beta = std::max(0.0, re_dot(g_new, g_new - g) / gnorm2);
    d = -g_new + beta * d;
    g = g_new;
    phi0 = cost_at(r, tx);
    rec.record(k, phi0, x);
    if (rec.converged()) {
      rec.stopped_early();
      break;
    }
  }
  return {Image(grid, std::move(x)), rec.take()};
}

ImageResult ogm(SmoothCost const &cost, Image const &x0, double L, SolverOptions const &opts)
{
  require_grid(cost.grid(), x0.grid(), "ogm");
  CompositeProblem problem;
  problem.smooth_value = [&cost](CVector const &x) { return cost.value(x); };
  problem.smooth_gradient = [&cost](CVector const &x) { return cost.gradient(x); };
  PogmOptions po;
  static_cast<SolverOptions &>(po) = opts;
  SolverResult res = pogm(problem, x0.vec(), L, po);
  return {Image(cost.grid(), std::move(res.x)), std::move(res.trace)};
}

} // namespace pmri
