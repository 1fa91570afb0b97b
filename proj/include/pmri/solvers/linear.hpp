#pragma once

#include "pmri/core/fft.hpp"
#include "pmri/core/model.hpp"
#include "pmri/solvers/trace.hpp"

#include <functional>
#include <memory>

namespace pmri {

using LinearMap = std::function<CVector(CVector const &)>;

struct CgResult
{
  CVector x;
  int iterations = 0;
  double relative_residual = 0; ///< ||b - Hx|| / ||b|| at exit
};

/// (Preconditioned) conjugate gradient for Hermitian positive semidefinite H x = b, warm-started at x0.
/// Stops after `iters` iterations, when the relative residual drops to `rel_tol`, or on an exact zero residual.
/// `on_iter(k, x)` runs after each completed iteration.
CgResult conjugate_gradient(LinearMap const &H, CVector const &b, CVector x0, int iters, double rel_tol = 0,
                            LinearMap const &precond = {}, std::function<void(int, CVector const &)> const &on_iter = {});

/// Circulant approximation of an image-domain operator, built from its response to the centered impulse
/// and inverted in k-space with a relative floor.
class CirculantPreconditioner
{
public:
  static constexpr double kFloor = 1e-8;

  CirculantPreconditioner(Grid grid, LinearMap const &H);
  /// From known circulant eigenvalues on the DFT grid.
  CirculantPreconditioner(Grid grid, RVector spectrum);

  /// Eigenvalues of the circulant approximation (before flooring), flat over the DFT grid.
  RVector const &spectrum() const { return spectrum_; }
  CVector apply(CVector const &r) const;
  LinearMap as_map() const;

private:
  void set_inverse();

  Grid grid_;
  std::shared_ptr<Fft2<double>> fft_;
  RVector spectrum_;
  RVector inverse_;
};

/// Eigenvalues of the Frobenius-optimal circulant approximation of A'A (exact when A'A is circulant):
/// (1/N) sum_l sum_k' mask(k') |F c_l|^2(k' - k).
RVector gram_circulant_spectrum(SystemOperator const &op);

/// Deterministic power iteration estimate of the largest eigenvalue of a Hermitian PSD map.
struct PowerIterationResult
{
  double value = 0;
  int iterations = 0;
  bool converged = false;
};
PowerIterationResult power_iteration(LinearMap const &H, Index n, int iters = 50, double tol = 1e-6,
                                     uint64_t seed = 0x5eed);

/// Lipschitz constant of x -> A'(Ax - y): N for normalized maps, N max_j sum_l |c_l(j)|^2 otherwise.
double data_lipschitz(SystemOperator const &op);

} // namespace pmri
