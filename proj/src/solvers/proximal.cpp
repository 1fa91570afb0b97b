#include "pmri/solvers/proximal.hpp"

#include <cmath>

namespace pmri {

double CompositeProblem::cost(CVector const &x) const
{
  double v = smooth_value(x);
  if (nonsmooth_value) { v += nonsmooth_value(x); }
  return v;
}

CVector CompositeProblem::apply_prox(CVector const &v, RVector const &step) const
{
  return prox ? prox(v, step) : v;
}

CompositeProblem synthesis_l1_problem(SystemOperator const &op, KSpaceData const &y, Transform const &T, double lambda)
{
  if (!(lambda >= 0)) { throw ConfigError("regularization parameter must be >= 0"); }
  require_grid(op.grid(), T.grid(), "synthesis transform");
  Grid const grid = op.grid();
  RVector const w = T.weights();
  CompositeProblem p;
  p.smooth_value = [op, y, T, grid](CVector const &z) { return op.data_cost(Image(grid, T.adjoint(z)), y); };
  p.smooth_gradient = [op, y, T, grid](CVector const &z) {
    KSpaceData r = op.forward(Image(grid, T.adjoint(z)));
    r.samples -= y.samples;
    return T.apply(op.adjoint(r).vec());
  };
  p.nonsmooth_value = [T, lambda](CVector const &z) { return lambda * T.l1_norm(z); };
  p.prox = [w, lambda](CVector const &v, RVector const &step) {
    return soft_threshold(v, RVector(lambda * w.cwiseProduct(step)));
  };
  p.to_image = [T](CVector const &z) { return T.adjoint(z); };
  return p;
}

CompositeProblem image_prox_problem(SystemOperator const &op, KSpaceData const &y, Potential const &psi, double lambda)
{
  if (!(lambda >= 0)) { throw ConfigError("regularization parameter must be >= 0"); }
  psi.prox(Complex{1, 0}, 1.0); // throws for potentials without a closed-form prox
  Grid const grid = op.grid();
  CompositeProblem p;
  p.smooth_value = [op, y, grid](CVector const &x) { return op.data_cost(Image(grid, x), y); };
  p.smooth_gradient = [op, y, grid](CVector const &x) {
    KSpaceData r = op.forward(Image(grid, x));
    r.samples -= y.samples;
    return op.adjoint(r).vec();
  };
  p.nonsmooth_value = [psi, lambda](CVector const &x) { return lambda * psi.value(x); };
  p.prox = [psi, lambda](CVector const &v, RVector const &step) {
    CVector out(v.size());
    for (Index k = 0; k < v.size(); ++k) { out[k] = psi.prox(v[k], lambda * step[k]); }
    return out;
  };
  return p;
}

Majorizer Majorizer::uniform(double L, Index n)
{
  if (!(L > 0)) { throw ConfigError("majorizer needs a positive Lipschitz constant"); }
  Majorizer m;
  m.diag = RVector::Constant(n, L);
  m.scalar = true;
  m.L = L;
  return m;
}

Majorizer select_majorizer(SystemOperator const &op, Transform const &T, SolverTrace *log)
{
  require_grid(op.grid(), T.grid(), "select_majorizer");
  double const n = double(op.grid().size());
  if (op.smaps().is_normalized() && T.orthogonal()) { return Majorizer::uniform(n, T.rows()); }

  Grid const grid = op.grid();
  LinearMap const BtAtAB = [&](CVector const &z) { return T.apply(op.gram(Image(grid, T.adjoint(z))).vec()); };
  PowerIterationResult const pi = power_iteration(BtAtAB, T.rows(), 50, 1e-6);
  if (!pi.converged && log) { log->events.push_back("select_majorizer: power iteration did not converge in 50 iterations"); }
  Majorizer m = Majorizer::uniform(1.01 * pi.value, T.rows());
  m.from_power_iteration = true;
  return m;
}

namespace {

SolverResult proximal_gradient(CompositeProblem const &problem, CVector x, RVector const &dinv,
                               SolverOptions const &opts, char const *name, bool check_monotone)
{
  TraceRecorder rec(opts);
  double prev = problem.cost(x);
  rec.record(0, prev, problem.to_image ? problem.to_image(x) : x);
  for (int k = 1; k <= opts.iters; ++k) {
    CVector const v = x - dinv.cwiseProduct(problem.smooth_gradient(x));
    x = problem.apply_prox(v, dinv);
    require_finite(x, name, k);
    double const cur = problem.cost(x);
    if (check_monotone) { require_nonincreasing(prev, cur, 1e-12, name, k); }
    rec.record(k, cur, problem.to_image ? problem.to_image(x) : x);
    prev = cur;
    if (rec.converged()) {
      rec.stopped_early();
      break;
    }
  }
  return {std::move(x), rec.take()};
}

} // namespace

SolverResult ista(CompositeProblem const &problem, CVector z0, Majorizer const &D, SolverOptions const &opts)
{
  if (D.diag.size() != z0.size()) { throw DimensionError("majorizer size does not match the coefficient vector"); }
  if (!(D.diag.array() > 0).all()) { throw ConfigError("majorizer must be positive definite"); }
  return proximal_gradient(problem, std::move(z0), D.inverse(), opts, "ista", true);
}

SolverResult pgm_general(CompositeProblem const &problem, CVector x0, double L, SolverOptions const &opts)
{
  if (!(L > 0)) { throw ConfigError("pgm needs a positive Lipschitz constant"); }
  RVector const dinv = RVector::Constant(x0.size(), 1.0 / L);
  return proximal_gradient(problem, std::move(x0), dinv, opts, "pgm", true);
}

SolverResult fista(CompositeProblem const &problem, CVector z0, Majorizer const &D, SolverOptions const &opts)
{
  if (D.diag.size() != z0.size()) { throw DimensionError("majorizer size does not match the coefficient vector"); }
  if (!(D.diag.array() > 0).all()) { throw ConfigError("majorizer must be positive definite"); }
  RVector const dinv = D.inverse();
  TraceRecorder rec(opts);
  CVector x = std::move(z0);
  CVector y = x;
  double t = 1.0;
  rec.record(0, problem.cost(x), problem.to_image ? problem.to_image(x) : x);
  for (int k = 1; k <= opts.iters; ++k) {
    CVector const v = y - dinv.cwiseProduct(problem.smooth_gradient(y));
    CVector x_new = problem.apply_prox(v, dinv);
    require_finite(x_new, "fista", k);
    double const t_new = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    y = x_new + ((t - 1.0) / t_new) * (x_new - x);
    x = std::move(x_new);
    t = t_new;
    rec.record(k, problem.cost(x), problem.to_image ? problem.to_image(x) : x);
    if (rec.converged()) {
      rec.stopped_early();
      break;
    }
  }
  return {std::move(x), rec.take()};
}

double pogm_theta(double theta_prev, bool final)
{
  double const c = final ? 8.0 : 4.0;
  return 0.5 * (1.0 + std::sqrt(c * theta_prev * theta_prev + 1.0));
}

SolverResult pogm(CompositeProblem const &problem, CVector x0, double L, PogmOptions const &opts,
                  std::function<void(PogmState const &)> const &observer)
{
  if (!(L > 0)) { throw ConfigError("pogm needs a positive Lipschitz constant"); }
  int const N = opts.iters;
  TraceRecorder rec(opts);
  auto image_of = [&](CVector const &v) { return problem.to_image ? problem.to_image(v) : v; };
  auto residual_norm = [&](CVector const &v) { return opts.residual_norm ? opts.residual_norm(v) : v.norm(); };
  bool const need_cost = opts.record || opts.restart == RestartRule::function_value || opts.rel_tol > 0;

  Index const n = x0.size();
  RVector const unit_step = RVector::Constant(n, 1.0 / L);
  PogmState s;
  s.x = std::move(x0);
  s.w = s.x;
  s.z = s.x; // z_0 = x_0; its coefficient at k = 1 is zero
  s.theta = 1.0;
  s.gamma = 1.0 / L; // gamma_0 is never consumed while theta_0 = 1
  double cost_prev = need_cost ? problem.cost(s.x) : 0.0;
  if (opts.record) { rec.record(0, cost_prev, image_of(s.x)); }

  for (int k = 1; k <= N; ++k) {
    CVector const w = s.x - problem.smooth_gradient(s.x) / L;
    if (opts.fixed_point_tol > 0) {
      CVector step = problem.apply_prox(w, unit_step);
      bool done = residual_norm(CVector(s.x - step)) <= opts.fixed_point_tol;
      if (!done) {
        CVector const next = problem.apply_prox(step - problem.smooth_gradient(step) / L, unit_step);
        if (residual_norm(CVector(step - next)) <= opts.fixed_point_tol) {
          s.x = std::move(step);
          done = true;
        }
      }
      if (done) {
        rec.event("pogm: fixed-point tolerance reached after " + std::to_string(k - 1) +
                  " iterations; final theta refinement skipped");
        rec.stopped_early();
        break;
      }
    }
    double const theta = pogm_theta(s.theta, k == N);
    double const gamma = (2.0 * s.theta + theta - 1.0) / (theta * L);
    CVector z = w + ((s.theta - 1.0) / theta) * (w - s.w) + (s.theta / theta) * (w - s.x);
    if (s.theta != 1.0) { z += ((s.theta - 1.0) / (L * s.gamma * theta)) * (s.z - s.x); }
    CVector x = problem.apply_prox(z, RVector::Constant(n, gamma));
    require_finite(x, "pogm", k);

    double theta_next = theta;
    if (opts.restart == RestartRule::gradient) {
      // Descent direction at the new point: -grad f(x_{k-1}) - (z_k - x_k) / gamma_k.
      CVector const descent = L * (w - s.x) - (z - x) / gamma;
      if (re_dot(descent, x - s.x) < 0) {
        theta_next = 1.0;
        rec.event("pogm: gradient restart at iteration " + std::to_string(k));
      }
    }
    double cost = 0;
    if (need_cost) {
      cost = problem.cost(x);
      if (opts.restart == RestartRule::function_value && cost > cost_prev) {
        theta_next = 1.0;
        rec.event("pogm: function restart at iteration " + std::to_string(k));
      }
    }

    s.k = k;
    s.theta = theta_next;
    s.gamma = gamma;
    s.w = w;
    s.z = std::move(z);
    s.x = std::move(x);
    if (observer) { observer(s); }
    if (opts.record) { rec.record(k, cost, image_of(s.x)); }
    cost_prev = cost;
    if (rec.converged()) {
      rec.event("pogm: relative cost tolerance reached at iteration " + std::to_string(k) +
                (k < N ? "; final theta refinement skipped" : ""));
      rec.stopped_early();
      break;
    }
  }
  return {std::move(s.x), rec.take()};
}

} // namespace pmri
