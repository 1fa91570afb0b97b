#include "oracles.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

namespace oracle {

CMatrix dft_matrix(Grid g)
{
  Index const N = g.size();
  CMatrix F(N, N);
  for (Index ki = 0; ki < g.nx; ++ki) {
    for (Index kj = 0; kj < g.ny; ++kj) {
      for (Index i = 0; i < g.nx; ++i) {
        for (Index j = 0; j < g.ny; ++j) {
          double const ph = -2.0 * std::numbers::pi *
                            (double(ki * i) / double(g.nx) + double(kj * j) / double(g.ny));
          F(ki * g.ny + kj, i * g.ny + j) = std::polar(1.0, ph);
        }
      }
    }
  }
  return F;
}

CMatrix system_matrix(pmri::SamplingMask const &mask, pmri::SensitivityMaps const &maps)
{
  Grid const g = mask.grid();
  CMatrix const F = dft_matrix(g);
  std::vector<Index> rows;
  for (Index k = 0; k < g.size(); ++k) {
    if (mask.keep()[size_t(k)]) { rows.push_back(k); }
  }
  Index const M = Index(rows.size());
  Index const L = maps.ncoils();
  CMatrix A(M * L, g.size());
  for (Index l = 0; l < L; ++l) {
    for (Index m = 0; m < M; ++m) {
      for (Index p = 0; p < g.size(); ++p) { A(l * M + m, p) = F(rows[size_t(m)], p) * maps.maps()(p, l); }
    }
  }
  return A;
}

CVector stack(CMatrix const &samples)
{
  CVector v(samples.size());
  for (Index l = 0; l < samples.cols(); ++l) { v.segment(l * samples.rows(), samples.rows()) = samples.col(l); }
  return v;
}

CMatrix finite_diff_matrix(Grid g)
{
  Index const N = g.size();
  CMatrix T = CMatrix::Zero(2 * N, N);
  for (Index i = 0; i < g.nx; ++i) {
    for (Index j = 0; j < g.ny; ++j) {
      Index const p = i * g.ny + j;
      T(p, ((i + 1) % g.nx) * g.ny + j) += 1.0;
      T(p, p) -= 1.0;
      T(N + p, i * g.ny + (j + 1) % g.ny) += 1.0;
      T(N + p, p) -= 1.0;
    }
  }
  return T;
}

CMatrix to_dense(std::function<CVector(CVector const &)> const &f, Index n)
{
  CVector e = CVector::Zero(n);
  e[0] = 1.0;
  CVector const first = f(e);
  CMatrix M(first.size(), n);
  M.col(0) = first;
  for (Index k = 1; k < n; ++k) {
    e.setZero();
    e[k] = 1.0;
    M.col(k) = f(e);
  }
  return M;
}

double minimize_scalar(std::function<double(double)> const &f, double lo, double hi, int samples)
{
  double best = lo;
  double fbest = f(lo);
  double const h = (hi - lo) / double(samples - 1);
  for (int s = 1; s < samples; ++s) {
    double const x = lo + h * double(s);
    double const fx = f(x);
    if (fx < fbest) {
      fbest = fx;
      best = x;
    }
  }
  double a = std::max(lo, best - h);
  double b = std::min(hi, best + h);
  double const gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - gr * (b - a);
  double d = a + gr * (b - a);
  for (int it = 0; it < 200 && b - a > 1e-15 * (1.0 + std::abs(a)); ++it) {
    if (f(c) < f(d)) {
      b = d;
    } else {
      a = c;
    }
    c = b - gr * (b - a);
    d = a + gr * (b - a);
  }
  double const mid = 0.5 * (a + b);
  return f(mid) < fbest ? mid : best;
}

Complex prox_grid_search(std::function<double(double)> const &psi, Complex z, double t)
{
  double const r = std::abs(z);
  if (r == 0) { return 0.0; }
  auto cost = [&](double s) { return 0.5 * (s - r) * (s - r) + t * psi(s); };
  double const s = minimize_scalar(cost, 0.0, r);
  return z * (s / r);
}

CVector lasso_coordinate_descent(CMatrix const &D, CVector const &p, double alpha, double tol, int max_sweeps)
{
  Index const J = D.cols();
  CVector z = CVector::Zero(J);
  CVector r = p;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double biggest = 0;
    for (Index j = 0; j < J; ++j) {
      double const nn = D.col(j).squaredNorm();
      if (nn == 0) { continue; }
      Complex const v = z[j] + D.col(j).dot(r) / nn;
      double const m = std::abs(v);
      Complex const znew = m > alpha / nn ? v * ((m - alpha / nn) / m) : Complex{0, 0};
      Complex const delta = znew - z[j];
      if (delta != Complex{0, 0}) {
        r -= D.col(j) * delta;
        z[j] = znew;
        biggest = std::max(biggest, std::abs(delta));
      }
    }
    if (biggest < tol) { break; }
  }
  return z;
}

CVector dense_quadratic_solve(CMatrix const &A, CVector const &y, CMatrix const &T, double lambda)
{
  CMatrix const H = A.adjoint() * A + lambda * T.adjoint() * T;
  return H.fullPivLu().solve(A.adjoint() * y);
}

double condition_number(CMatrix const &H)
{
  Eigen::SelfAdjointEigenSolver<CMatrix> es(H);
  return es.eigenvalues().maxCoeff() / es.eigenvalues().minCoeff();
}

std::vector<CVector> pogm_quadratic_iterates(CMatrix const &H, CVector const &b, CVector const &x0, double L, int N)
{
  std::vector<CVector> out;
  CVector x_prev = x0;
  CVector w_prev = x0;
  CVector z_prev = x0;
  double theta_prev = 1.0;
  double gamma_prev = 0.0;
  for (int k = 1; k <= N; ++k) {
    double const theta = k < N ? 0.5 * (1.0 + std::sqrt(4.0 * theta_prev * theta_prev + 1.0))
                               : 0.5 * (1.0 + std::sqrt(8.0 * theta_prev * theta_prev + 1.0));
    double const gamma = (2.0 * theta_prev + theta - 1.0) / (theta * L);
    CVector const w = x_prev - (H * x_prev - b) / L;
    CVector z = w + ((theta_prev - 1.0) / theta) * (w - w_prev) + (theta_prev / theta) * (w - x_prev);
    if (k > 1) { z += ((theta_prev - 1.0) / (L * gamma_prev * theta)) * (z_prev - x_prev); }
    CVector const x = z;
    out.push_back(x);
    x_prev = x;
    w_prev = w;
    z_prev = z;
    theta_prev = theta;
    gamma_prev = gamma;
  }
  return out;
}

} // namespace oracle
