#include "pmri/regularizers/potential.hpp"

#include <cmath>

namespace pmri {

Potential::Potential(Kind kind, double param)
  : kind_{kind}
  , param_{param}
{
  if (!(param > 0) || !std::isfinite(param)) { throw ConfigError("potential parameter must be positive and finite"); }
}

std::string Potential::name() const
{
  switch (kind_) {
  case Kind::quadratic: return "quadratic";
  case Kind::fair: return "fair";
  case Kind::hyperbola: return "hyperbola";
  case Kind::huber: return "huber";
  case Kind::abs: return "abs";
  }
  return "?";
}

double Potential::value(Complex z) const
{
  double const r = std::abs(z);
  switch (kind_) {
  case Kind::quadratic: return 0.5 * r * r;
  case Kind::fair: {
    double const t = r / param_;
    return param_ * param_ * (t - std::log1p(t));
  }
  case Kind::hyperbola: return std::sqrt(r * r + param_) - std::sqrt(param_);
  case Kind::huber: return r <= param_ ? 0.5 * r * r : param_ * r - 0.5 * param_ * param_;
  case Kind::abs: return r;
  }
  return 0;
}

double Potential::value(CVector const &z) const
{
  double sum = 0;
  for (Index k = 0; k < z.size(); ++k) { sum += value(z[k]); }
  return sum;
}

double Potential::weight(double r) const
{
  switch (kind_) {
  case Kind::quadratic: return 1.0;
  case Kind::fair: return 1.0 / (1.0 + r / param_);
  case Kind::hyperbola: return 1.0 / std::sqrt(r * r + param_);
  case Kind::huber: return r <= param_ ? 1.0 : param_ / r;
  case Kind::abs: throw UnsupportedError("abs potential is not smooth; use the prox path");
  }
  return 0;
}

Complex Potential::gradient(Complex z) const
{
  if (kind_ == Kind::abs) { throw UnsupportedError("abs potential is not smooth; use the prox path"); }
  return z * weight(std::abs(z));
}

CVector Potential::gradient(CVector const &z) const
{
  CVector g(z.size());
  for (Index k = 0; k < z.size(); ++k) { g[k] = gradient(z[k]); }
  return g;
}

double Potential::max_curvature() const
{
  switch (kind_) {
  case Kind::quadratic:
  case Kind::fair:
  case Kind::huber: return 1.0;
  case Kind::hyperbola: return 1.0 / std::sqrt(param_);
  case Kind::abs: throw UnsupportedError("abs potential has unbounded curvature");
  }
  return 0;
}

Complex Potential::prox(Complex z, double t) const
{
  if (!(t >= 0)) { throw ConfigError("prox step must be nonnegative"); }
  switch (kind_) {
  case Kind::abs: return soft_threshold(z, t);
  case Kind::quadratic: return z / (1.0 + t);
  case Kind::huber: {
    double const r = std::abs(z);
    if (r <= param_ * (1.0 + t)) { return z / (1.0 + t); }
    return z * ((r - t * param_) / r);
  }
  case Kind::fair:
  case Kind::hyperbola: break;
  }
  throw UnsupportedError("no closed-form prox for the " + name() + " potential");
}

CVector Potential::prox(CVector const &z, double t) const
{
  CVector out(z.size());
  for (Index k = 0; k < z.size(); ++k) { out[k] = prox(z[k], t); }
  return out;
}

Complex soft_threshold(Complex z, double c)
{
  double const r = std::abs(z);
  if (r <= c || r == 0) { return {0, 0}; }
  return z * ((r - c) / r);
}

CVector soft_threshold(CVector const &z, double c)
{
  CVector out(z.size());
  for (Index k = 0; k < z.size(); ++k) { out[k] = soft_threshold(z[k], c); }
  return out;
}

CVector soft_threshold(CVector const &z, RVector const &c)
{
  if (c.size() != z.size()) { throw DimensionError("threshold vector length mismatch"); }
  CVector out(z.size());
  for (Index k = 0; k < z.size(); ++k) { out[k] = soft_threshold(z[k], c[k]); }
  return out;
}

} // namespace pmri
