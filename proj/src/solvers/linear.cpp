#include "pmri/solvers/linear.hpp"

#include "pmri/core/random.hpp"

#include <cmath>

namespace pmri {

CgResult conjugate_gradient(LinearMap const &H, CVector const &b, CVector x0, int iters, double rel_tol,
                            LinearMap const &precond, std::function<void(int, CVector const &)> const &on_iter)
{
  CgResult out;
  out.x = std::move(x0);
  double const bnorm = b.norm();
  CVector r = b - H(out.x);
  double rnorm = r.norm();
  auto relative = [&](double rn) { return bnorm > 0 ? rn / bnorm : rn; };
  out.relative_residual = relative(rnorm);
  if (rnorm == 0 || out.relative_residual <= rel_tol) { return out; }

  CVector s = precond ? precond(r) : r;
  CVector p = s;
  double rs = re_dot(r, s);
  for (int k = 1; k <= iters; ++k) {
    CVector const Hp = H(p);
    double const pHp = re_dot(p, Hp);
    if (!(pHp > 0)) { break; } // p in the null space of H: no further progress possible
    double const alpha = rs / pHp;
    out.x += alpha * p;
    r -= alpha * Hp;
    require_finite(out.x, "cg", k);
    out.iterations = k;
    rnorm = r.norm();
    out.relative_residual = relative(rnorm);
    if (on_iter) { on_iter(k, out.x); }
    if (rnorm == 0 || out.relative_residual <= rel_tol) { break; }
    s = precond ? precond(r) : r;
    double const rs_new = re_dot(r, s);
    p = s + (rs_new / rs) * p;
    rs = rs_new;
  }
  return out;
}

CirculantPreconditioner::CirculantPreconditioner(Grid grid, LinearMap const &H)
  : grid_{grid}
  , fft_{std::make_shared<Fft2<double>>(grid)}
{
  Index const ci = grid.nx / 2;
  Index const cj = grid.ny / 2;
  CVector impulse = CVector::Zero(grid.size());
  impulse[grid.flat(ci, cj)] = 1.0;
  CVector const h = H(impulse);
  // Shift the impulse response so the center lands on the origin; its DFT is the circulant spectrum.
  CVector kernel(grid.size());
  for (Index i = 0; i < grid.nx; ++i) {
    for (Index j = 0; j < grid.ny; ++j) {
      Index const si = (i + grid.nx - ci) % grid.nx;
      Index const sj = (j + grid.ny - cj) % grid.ny;
      kernel[grid.flat(si, sj)] = h[grid.flat(i, j)];
    }
  }
  fft_->forward(kernel.data());
  spectrum_ = kernel.real();
  set_inverse();
}

CirculantPreconditioner::CirculantPreconditioner(Grid grid, RVector spectrum)
  : grid_{grid}
  , fft_{std::make_shared<Fft2<double>>(grid)}
  , spectrum_{std::move(spectrum)}
{
  if (spectrum_.size() != grid.size()) { throw DimensionError("preconditioner spectrum does not match the grid"); }
  set_inverse();
}

void CirculantPreconditioner::set_inverse()
{
  double const floor = kFloor * std::max(spectrum_.maxCoeff(), 0.0);
  inverse_ = spectrum_.unaryExpr([floor](double s) { return 1.0 / std::max(s, std::max(floor, 1e-300)); });
}

RVector gram_circulant_spectrum(SystemOperator const &op)
{
  Grid const grid = op.grid();
  double const n = double(grid.size());
  Fft2<double> const &fft = op.fft();
  // Power spectrum of the coil maps summed over coils.
  CVector power = CVector::Zero(grid.size());
  for (Index l = 0; l < op.ncoils(); ++l) {
    CVector c = op.smaps().coil(l);
    fft.forward(c.data());
    power += c.cwiseAbs2().cast<Complex>();
  }
  // Circular cross-correlation of the mask with the power spectrum, via the DFT.
  CVector m = op.mask().weights().cast<Complex>();
  fft.forward(m.data());
  fft.forward(power.data());
  CVector corr = m.cwiseProduct(power.conjugate());
  fft.backward(corr.data());
  return corr.real() / (n * n);
}

CVector CirculantPreconditioner::apply(CVector const &r) const
{
  CVector buf = r;
  fft_->forward(buf.data());
  buf.array() *= inverse_.array();
  fft_->backward(buf.data());
  return buf / double(grid_.size());
}

LinearMap CirculantPreconditioner::as_map() const
{
  return [self = *this](CVector const &r) { return self.apply(r); };
}

PowerIterationResult power_iteration(LinearMap const &H, Index n, int iters, double tol, uint64_t seed)
{
  Rng rng(seed);
  CVector v = rng.complex_normal(n);
  v.normalize();
  PowerIterationResult res;
  for (int k = 1; k <= iters; ++k) {
    CVector const Hv = H(v);
    double const rayleigh = re_dot(v, Hv);
    double const nrm = Hv.norm();
    res.iterations = k;
    if (nrm == 0) {
      res.value = 0;
      res.converged = true;
      return res;
    }
    bool const done = k > 1 && std::abs(rayleigh - res.value) <= tol * std::abs(rayleigh);
    res.value = rayleigh;
    v = Hv / nrm;
    if (done) {
      res.converged = true;
      return res;
    }
  }
  return res;
}

double data_lipschitz(SystemOperator const &op)
{
  double const n = double(op.grid().size());
  if (op.smaps().is_normalized()) { return n; }
  return n * op.smaps().sum_of_squares().maxCoeff();
}

} // namespace pmri
