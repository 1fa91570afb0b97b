#include "pmri/regularizers/transform.hpp"

#include "pmri/regularizers/potential.hpp"

#include <cmath>
#include <numbers>

namespace pmri {

namespace {

bool power_of_two(Index n) { return n > 0 && (n & (n - 1)) == 0; }

// One Haar analysis step on `len` strided samples.
void haar_forward_1d(Complex *data, Index len, Index stride, std::vector<Complex> &tmp)
{
  double const s = 1.0 / std::numbers::sqrt2;
  Index const half = len / 2;
  tmp.resize(size_t(len));
  for (Index k = 0; k < half; ++k) {
    Complex const a = data[(2 * k) * stride];
    Complex const b = data[(2 * k + 1) * stride];
    tmp[size_t(k)] = s * (a + b);
    tmp[size_t(half + k)] = s * (a - b);
  }
  for (Index k = 0; k < len; ++k) { data[k * stride] = tmp[size_t(k)]; }
}

void haar_inverse_1d(Complex *data, Index len, Index stride, std::vector<Complex> &tmp)
{
  double const s = 1.0 / std::numbers::sqrt2;
  Index const half = len / 2;
  tmp.resize(size_t(len));
  for (Index k = 0; k < half; ++k) {
    Complex const a = data[k * stride];
    Complex const d = data[(half + k) * stride];
    tmp[size_t(2 * k)] = s * (a + d);
    tmp[size_t(2 * k + 1)] = s * (a - d);
  }
  for (Index k = 0; k < len; ++k) { data[k * stride] = tmp[size_t(k)]; }
}

void haar_forward_2d(Complex *data, Grid g, int levels)
{
  std::vector<Complex> tmp;
  for (int lev = 0; lev < levels; ++lev) {
    Index const h = g.nx >> lev;
    Index const w = g.ny >> lev;
    for (Index r = 0; r < h; ++r) { haar_forward_1d(data + r * g.ny, w, 1, tmp); }
    for (Index c = 0; c < w; ++c) { haar_forward_1d(data + c, h, g.ny, tmp); }
  }
}

void haar_inverse_2d(Complex *data, Grid g, int levels)
{
  std::vector<Complex> tmp;
  for (int lev = levels - 1; lev >= 0; --lev) {
    Index const h = g.nx >> lev;
    Index const w = g.ny >> lev;
    for (Index c = 0; c < w; ++c) { haar_inverse_1d(data + c, h, g.ny, tmp); }
    for (Index r = 0; r < h; ++r) { haar_inverse_1d(data + r * g.ny, w, 1, tmp); }
  }
}

} // namespace

Transform Transform::finite_diff(Grid grid)
{
  if (grid.nx < 1 || grid.ny < 1) { throw DimensionError("transform grid must be at least 1x1"); }
  return Transform(Kind::finite_diff_2d, grid);
}

Transform Transform::odwt(Grid grid, int levels)
{
  if (!power_of_two(grid.nx) || !power_of_two(grid.ny)) {
    throw DimensionError("orthogonal Haar transform needs power-of-two grid sizes, got " + to_string(grid));
  }
  if (levels < 1 || (grid.nx >> levels) < 1 || (grid.ny >> levels) < 1) {
    throw ConfigError("Haar levels must satisfy 1 <= levels <= log2(min(nx, ny))");
  }
  Transform t(Kind::odwt, grid);
  t.levels_ = levels;
  return t;
}

Transform Transform::identity(Grid grid)
{
  if (grid.nx < 1 || grid.ny < 1) { throw DimensionError("transform grid must be at least 1x1"); }
  return Transform(Kind::identity, grid);
}

Transform Transform::stacked(std::vector<Transform> parts)
{
  if (parts.empty()) { throw ConfigError("stacked transform needs at least one part"); }
  for (auto const &p : parts) { require_grid(parts.front().grid(), p.grid(), "stacked transform"); }
  Transform t(Kind::stacked, parts.front().grid());
  t.parts_ = std::move(parts);
  return t;
}

std::string Transform::name() const
{
  switch (kind_) {
  case Kind::finite_diff_2d: return "finite_diff";
  case Kind::odwt: return "odwt" + std::to_string(levels_);
  case Kind::identity: return "identity";
  case Kind::stacked: {
    std::string s = "stacked(";
    for (size_t i = 0; i < parts_.size(); ++i) { s += (i ? "," : "") + parts_[i].name(); }
    return s + ")";
  }
  }
  return "?";
}

Index Transform::rows() const
{
  switch (kind_) {
  case Kind::finite_diff_2d: return 2 * grid_.size();
  case Kind::odwt:
  case Kind::identity: return grid_.size();
  case Kind::stacked: {
    Index k = 0;
    for (auto const &p : parts_) { k += p.rows(); }
    return k;
  }
  }
  return 0;
}

CVector Transform::apply(CVector const &x) const
{
  if (x.size() != cols()) { throw DimensionError("transform input length does not match grid " + to_string(grid_)); }
  CVector out(rows());
  apply_into(x, out);
  return out;
}

void Transform::apply_into(CVector const &x, Eigen::Ref<CVector> out) const
{
  Grid const g = grid_;
  switch (kind_) {
  case Kind::finite_diff_2d: {
    Index const n = g.size();
    for (Index i = 0; i < g.nx; ++i) {
      Index const ip = (i + 1) % g.nx;
      for (Index j = 0; j < g.ny; ++j) {
        Index const jp = (j + 1) % g.ny;
        out[g.flat(i, j)] = x[g.flat(ip, j)] - x[g.flat(i, j)];
        out[n + g.flat(i, j)] = x[g.flat(i, jp)] - x[g.flat(i, j)];
      }
    }
    return;
  }
  case Kind::odwt:
    out = x;
    haar_forward_2d(out.data(), g, levels_);
    return;
  case Kind::identity: out = x; return;
  case Kind::stacked: {
    Index off = 0;
    for (auto const &p : parts_) {
      p.apply_into(x, out.segment(off, p.rows()));
      off += p.rows();
    }
    return;
  }
  }
}

CVector Transform::adjoint(CVector const &coeffs) const
{
  if (coeffs.size() != rows()) { throw DimensionError("transform adjoint input length mismatch"); }
  CVector out = CVector::Zero(cols());
  adjoint_accumulate(coeffs, out);
  return out;
}

void Transform::adjoint_accumulate(Eigen::Ref<CVector const> c, CVector &out) const
{
  Grid const g = grid_;
  switch (kind_) {
  case Kind::finite_diff_2d: {
    Index const n = g.size();
    for (Index i = 0; i < g.nx; ++i) {
      Index const im = (i + g.nx - 1) % g.nx;
      for (Index j = 0; j < g.ny; ++j) {
        Index const jm = (j + g.ny - 1) % g.ny;
        out[g.flat(i, j)] += c[g.flat(im, j)] - c[g.flat(i, j)] + c[n + g.flat(i, jm)] - c[n + g.flat(i, j)];
      }
    }
    return;
  }
  case Kind::odwt: {
    CVector tmp = c;
    haar_inverse_2d(tmp.data(), g, levels_);
    out += tmp;
    return;
  }
  case Kind::identity: out += c; return;
  case Kind::stacked: {
    Index off = 0;
    for (auto const &p : parts_) {
      p.adjoint_accumulate(c.segment(off, p.rows()), out);
      off += p.rows();
    }
    return;
  }
  }
}

double Transform::norm_squared_bound() const
{
  switch (kind_) {
  case Kind::finite_diff_2d: return 8.0;
  case Kind::odwt:
  case Kind::identity: return 1.0;
  case Kind::stacked: {
    double s = 0;
    for (auto const &p : parts_) { s += p.norm_squared_bound(); }
    return s;
  }
  }
  return 0;
}

RVector Transform::gram_spectrum() const
{
  Grid const g = grid_;
  switch (kind_) {
  case Kind::finite_diff_2d: {
    RVector s(g.size());
    double const two_pi = 2.0 * std::numbers::pi;
    for (Index i = 0; i < g.nx; ++i) {
      for (Index j = 0; j < g.ny; ++j) {
        s[g.flat(i, j)] = 4.0 - 2.0 * std::cos(two_pi * double(i) / double(g.nx)) -
                          2.0 * std::cos(two_pi * double(j) / double(g.ny));
      }
    }
    return s;
  }
  case Kind::odwt:
  case Kind::identity: return RVector::Ones(g.size());
  case Kind::stacked: {
    RVector s = RVector::Zero(g.size());
    for (auto const &p : parts_) { s += p.gram_spectrum(); }
    return s;
  }
  }
  return {};
}

Transform Transform::with_weights(RVector weights) const
{
  if (weights.size() != rows()) { throw DimensionError("weight vector length must equal the coefficient count"); }
  if ((weights.array() < 0).any() || !weights.allFinite()) { throw ConfigError("1-norm weights must be finite and nonnegative"); }
  Transform t = *this;
  t.weights_ = std::move(weights);
  return t;
}

RVector Transform::weights() const { return weights_ ? *weights_ : RVector::Ones(rows()); }

double Transform::l1_norm(CVector const &coeffs) const
{
  if (coeffs.size() != rows()) { throw DimensionError("coefficient length mismatch"); }
  if (!weights_) { return coeffs.cwiseAbs().sum(); }
  return coeffs.cwiseAbs().cwiseProduct(*weights_).sum();
}

double huber_split_value(Transform const &T, Image const &x, double alpha)
{
  if (!(alpha > 0)) { throw ConfigError("huber split parameter must be positive"); }
  CVector const c = T.apply(x);
  RVector const w = T.weights();
  double sum = 0;
  for (Index k = 0; k < c.size(); ++k) {
    double const a = alpha * w[k];
    double const r = std::abs(c[k]);
    sum += r <= a ? 0.5 * r * r : a * r - 0.5 * a * a;
  }
  return sum;
}

CVector huber_split_minimizer(Transform const &T, Image const &x, double alpha)
{
  if (!(alpha > 0)) { throw ConfigError("huber split parameter must be positive"); }
  return soft_threshold(T.apply(x), RVector(alpha * T.weights()));
}

} // namespace pmri
