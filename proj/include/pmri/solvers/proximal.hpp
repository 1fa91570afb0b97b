#pragma once

#include "pmri/core/model.hpp"
#include "pmri/regularizers/potential.hpp"
#include "pmri/regularizers/transform.hpp"
#include "pmri/solvers/linear.hpp"
#include "pmri/solvers/trace.hpp"

#include <functional>

namespace pmri {

/// f(x) + g(x) with f convex and L-smooth, g convex with an exact (separable) proximal map.
struct CompositeProblem
{
  std::function<double(CVector const &)> smooth_value;
  std::function<CVector(CVector const &)> smooth_gradient;
  /// g(x); empty means g = 0
  std::function<double(CVector const &)> nonsmooth_value;
  /// argmin_u 0.5||u - v||^2 + sum_k step_k g_k(u_k); empty means identity
  std::function<CVector(CVector const &v, RVector const &step)> prox;
  /// Maps the optimization variable to an image (synthesis coefficients -> Bz).
  LinearMap to_image;

  double cost(CVector const &x) const;
  CVector apply_prox(CVector const &v, RVector const &step) const;
};

/// ½||A T' z - y||^2 + lambda ||z||_1 (weighted by T's weights), B = T' as the synthesis operator.
CompositeProblem synthesis_l1_problem(SystemOperator const &op, KSpaceData const &y, Transform const &T, double lambda);

/// ½||A x - y||^2 + g(x) with g = lambda sum psi(x_k) for a prox-able potential.
CompositeProblem image_prox_problem(SystemOperator const &op, KSpaceData const &y, Potential const &psi, double lambda);

/// Diagonal majorizer D with D - B'A'AB PSD.
struct Majorizer
{
  RVector diag;
  bool scalar = true;
  double L = 0; ///< the common value when scalar
  bool from_power_iteration = false;

  static Majorizer uniform(double L, Index n);
  RVector inverse() const { return diag.cwiseInverse(); }
};

/// D = N I for normalized maps with an orthogonal coefficient transform; otherwise 1.01 x a power-iteration
/// estimate of ||B'A'AB||.
Majorizer select_majorizer(SystemOperator const &op, Transform const &T, SolverTrace *log = nullptr);

/// Proximal gradient with diagonal majorizer D. Monotone: throws InvariantViolation on cost increase.
SolverResult ista(CompositeProblem const &problem, CVector z0, Majorizer const &D, SolverOptions const &opts);

/// Same update as ista with a scalar step 1/L for arbitrary prox-able g.
SolverResult pgm_general(CompositeProblem const &problem, CVector x0, double L, SolverOptions const &opts);

/// FISTA/FPGM momentum t_{k+1} = (1 + sqrt(1 + 4 t_k^2)) / 2 over the ista step.
SolverResult fista(CompositeProblem const &problem, CVector z0, Majorizer const &D, SolverOptions const &opts);

enum class RestartRule
{
  none,
  function_value, ///< restart when F(x_k) > F(x_{k-1})
  gradient        ///< restart when the composite descent direction opposes the last step
};

struct PogmOptions : SolverOptions
{
  RestartRule restart = RestartRule::none;
  /// Stop once the prox fixed-point residual is below this, either at the current iterate or at its
  /// proximal-gradient step (which is then returned); 0 disables.
  double fixed_point_tol = 0;
  /// Residual norm for fixed_point_tol (Euclidean by default).
  std::function<double(CVector const &)> residual_norm;
};

/// Internal POGM state after iteration k, exposed for inspection.
struct PogmState
{
  int k = 0;
  double theta = 1;
  double gamma = 0;
  CVector w;
  CVector z;
  CVector x;
};

/// Proximal optimized gradient method for N = opts.iters iterations (the last uses the final theta rule).
/// `observer`, when set, sees the state after every iteration.
SolverResult pogm(CompositeProblem const &problem, CVector x0, double L, PogmOptions const &opts,
                  std::function<void(PogmState const &)> const &observer = {});

/// theta_k from theta_{k-1}; `final` selects the k = N rule.
double pogm_theta(double theta_prev, bool final);

} // namespace pmri
