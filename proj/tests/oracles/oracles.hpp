#pragma once

// Brute-force references that share no code with the library beyond the plain data types.

#include "pmri/core/model.hpp"

#include <functional>
#include <vector>

namespace oracle {

using pmri::CMatrix;
using pmri::Complex;
using pmri::CVector;
using pmri::Grid;
using pmri::Index;

/// Unnormalized 2D DFT as an N x N matrix on row-major flat images.
CMatrix dft_matrix(Grid g);

/// Explicit system matrix, rows ordered coil-major then mask raster order.
CMatrix system_matrix(pmri::SamplingMask const &mask, pmri::SensitivityMaps const &maps);

/// Stacks per-coil sample columns into the same ordering as system_matrix.
CVector stack(CMatrix const &samples);

/// Periodic first differences, vertical block then horizontal block (2N x N).
CMatrix finite_diff_matrix(Grid g);

/// Dense matrix of any linear map on C^n, column by column.
CMatrix to_dense(std::function<CVector(CVector const &)> const &f, Index n);

/// argmin_x 0.5|x - z|^2 + t psi(|x|) over the ray through z, by grid search with two refinement passes.
Complex prox_grid_search(std::function<double(double)> const &psi, Complex z, double t);

/// Coordinate descent for min 0.5||p - D z||^2 + alpha ||z||_1, iterated until the largest update is below tol.
CVector lasso_coordinate_descent(CMatrix const &D, CVector const &p, double alpha, double tol = 1e-13,
                                 int max_sweeps = 200000);

/// Direct solve of (A'A + lambda T'T) x = A'y with dense matrices.
CVector dense_quadratic_solve(CMatrix const &A, CVector const &y, CMatrix const &T, double lambda);

/// Condition number of a Hermitian PD matrix via its eigenvalues.
double condition_number(CMatrix const &H);

/// One-dimensional minimization of a unimodal function on [lo, hi] by dense sampling plus golden section.
double minimize_scalar(std::function<double(double)> const &f, double lo, double hi, int samples = 2001);

/// Iterates x_1..x_N of the POGM pseudo-code with g = 0 on f(x) = 0.5 x'Hx - Re b'x, written out step by step.
std::vector<CVector> pogm_quadratic_iterates(CMatrix const &H, CVector const &b, CVector const &x0, double L, int N);

} // namespace oracle
