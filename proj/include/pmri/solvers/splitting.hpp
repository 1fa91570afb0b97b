#pragma once

#include "pmri/core/model.hpp"
#include "pmri/regularizers/transform.hpp"
#include "pmri/solvers/linear.hpp"
#include "pmri/solvers/trace.hpp"

#include <array>
#include <optional>

namespace pmri {

/// 0.5 ||Ax - y||^2 + lambda ||Tx||_1 (weighted by T's weights).
double analysis_l1_cost(SystemOperator const &op, KSpaceData const &y, Transform const &T, double lambda, Image const &x);

/// Scaled-form ADMM state for the split z = Tx; eta is the scaled multiplier gamma / mu.
struct AdmmBasicState
{
  Image x;
  CVector z;
  CVector eta;
  double mu = 0;
};

struct AdmmOptions : SolverOptions
{
  /// Penalty; 0 selects mu = lambda (or 1 when lambda = 0).
  double mu = 0;
  /// Warm-started CG iterations for each x-update.
  int inner_cg = 3;
};

struct AdmmResult
{
  AdmmBasicState state;
  SolverTrace trace;
  std::vector<double> constraint_residual; ///< ||Tx_k - z_k|| per iteration
};

/// ADMM for 0.5||Ax - y||^2 + lambda||Tx||_1 with the split z = Tx.
/// z <- soft(Tx + eta, lambda/mu); x <- argmin 0.5||Ax-y||^2 + mu/2 ||Tx - z + eta||^2 (inexact CG); eta += Tx - z.
/// `init`, when given, supplies (z, eta); otherwise z = Tx0 and eta = 0.
AdmmResult admm_analysis(SystemOperator const &op, KSpaceData const &y, Transform const &T, double lambda,
                         Image const &x0, AdmmOptions const &opts, std::optional<AdmmBasicState> const &init = {});

/// Penalties for the split u = Cx, z = Tv, v = x.
struct StructuredPenalties
{
  double mu_u = 1; ///< weight on u = Cx
  double mu_z = 1; ///< weight on z = Tv
  double mu_v = 1; ///< weight on v = x
};

/// Picks penalties so that every quadratic subproblem matrix has condition number <= kappa:
///   u: F'S'SF + mu_u I       (spectrum {0, N} + mu_u)
///   x: mu_u C'C + mu_v I
///   v: mu_z T'T + mu_v I     (spectrum of T'T from its circulant form)
StructuredPenalties condition_penalties(SystemOperator const &op, Transform const &T, double kappa = 20);

struct AdmmStructuredState
{
  Image x;
  CMatrix u; ///< N x L per-coil images
  CVector z; ///< K transform coefficients
  CVector v; ///< N
  CMatrix eta_u;
  CVector eta_z;
  CVector eta_v;
};

/// ADMM on the split u = Cx, z = Tv, v = x. The blocks (u, v) and (x, z) are each separable,
/// and every update is solved exactly with diagonal (image or k-space) inverses.
class AdmmStructured
{
public:
  AdmmStructured(SystemOperator op, KSpaceData y, Transform T, double lambda, StructuredPenalties mu);

  void initialize(Image const &x0);
  void update_u();
  void update_v();
  void update_x();
  void update_z();
  void update_duals();
  void step();

  AdmmStructuredState const &state() const { return s_; }
  double cost() const;
  /// Relative residuals of the quadratic subproblems' normal equations at the current state.
  double u_normal_residual() const;
  double v_normal_residual() const;
  double x_normal_residual() const;
  /// Constraint residual norms ||u - Cx||, ||z - Tv||, ||v - x||.
  std::array<double, 3> constraint_residuals() const;

private:
  CVector v_rhs() const;
  CVector x_rhs() const;
  CVector u_target(Index l) const;

  SystemOperator op_;
  KSpaceData y_;
  Transform T_;
  double lambda_;
  StructuredPenalties mu_;
  CMatrix zero_filled_;
  RVector mask_w_;
  RVector tt_spectrum_;
  RVector cc_;
  AdmmStructuredState s_;
};

ImageResult admm_structured(SystemOperator const &op, KSpaceData const &y, Transform const &T, double lambda,
                            StructuredPenalties const &mu, Image const &x0, SolverOptions const &opts);

struct PrimalDualState
{
  Image x;
  CVector z; ///< dual variable, |z_k| <= w_k
  double tau = 0;
  double sigma = 0;
};

struct PrimalDualOptions : SolverOptions
{
  /// Primal step; 0 selects 0.99 / L_A.
  double tau = 0;
  /// Dual step; 0 selects L_A / (2 lambda^2 ||T||^2).
  double sigma = 0;
};

/// Primal-dual splitting with an explicit data-term gradient, dual variable on the unit inf-ball:
///   x+ = x - tau (A'(Ax - y) + lambda T'z);  z+ = proj(z + sigma lambda T(2x+ - x)).
/// Requires tau (L_A/2 + sigma lambda^2 ||T||^2) <= 1.
ImageResult primal_dual(SystemOperator const &op, KSpaceData const &y, Transform const &T, double lambda,
                        Image const &x0, PrimalDualOptions const &opts, PrimalDualState *final_state = nullptr);

/// Elementwise projection onto {|z_k| <= w_k}.
CVector project_inf_ball(CVector const &z, RVector const &w);

} // namespace pmri
