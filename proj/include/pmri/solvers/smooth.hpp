#pragma once

#include "pmri/core/model.hpp"
#include "pmri/regularizers/potential.hpp"
#include "pmri/regularizers/transform.hpp"
#include "pmri/solvers/linear.hpp"
#include "pmri/solvers/trace.hpp"

#include <optional>

namespace pmri {

/// Psi(x) = 0.5 ||Ax - y||^2 + lambda sum_k psi([Tx]_k) with a smooth potential.
class SmoothCost
{
public:
  SmoothCost(SystemOperator op, KSpaceData y, double lambda, Transform T, Potential psi);

  SystemOperator const &op() const { return op_; }
  KSpaceData const &data() const { return y_; }
  double lambda() const { return lambda_; }
  Transform const &transform() const { return T_; }
  Potential const &potential() const { return psi_; }
  Grid const &grid() const { return op_.grid(); }

  double value(CVector const &x) const;
  CVector gradient(CVector const &x) const;
  /// L_A + lambda ||T||^2 sup psi''
  double lipschitz() const;
  /// Hessian A'A + lambda T'T for the quadratic potential.
  CVector hessian_apply(CVector const &x) const;
  /// A'y
  CVector data_adjoint() const;

private:
  SystemOperator op_;
  KSpaceData y_;
  double lambda_;
  Transform T_;
  Potential psi_;
};

struct CgOptions : SolverOptions
{
  /// Stop when ||A'y - Hx|| / ||A'y|| reaches this value; 0 runs the full budget.
  double residual_tol = 0;
  bool preconditioned = false;
};

struct CgQuadraticResult
{
  Image x;
  SolverTrace trace;
  int iterations = 0;
  double relative_residual = 0;
};

/// Linear CG on (A'A + lambda T'T) x = A'y; optionally with the circulant preconditioner.
CgQuadraticResult cg_quadratic(SmoothCost const &cost, Image const &x0, CgOptions const &opts);

/// Fixed-step gradient descent x <- x - grad / L; throws InvariantViolation if the cost increases.
ImageResult gradient_descent(SmoothCost const &cost, Image const &x0, double L, SolverOptions const &opts);

/// Polak-Ribiere+ nonlinear CG with a majorize-minimize line search safeguarded by Armijo backtracking.
ImageResult ncg(SmoothCost const &cost, Image const &x0, SolverOptions const &opts);

/// Optimized gradient method: POGM with g = 0.
ImageResult ogm(SmoothCost const &cost, Image const &x0, double L, SolverOptions const &opts);

} // namespace pmri
