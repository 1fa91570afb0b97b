#pragma once

#include "pmri/core/types.hpp"

#include <string>

namespace pmri {

/// Radial potential psi(|z|) applied elementwise to complex coefficients.
class Potential
{
public:
  enum class Kind
  {
    quadratic, ///< |z|^2 / 2
    fair,      ///< delta^2 (|z/delta| - log(1 + |z/delta|))
    hyperbola, ///< sqrt(|z|^2 + eps) - sqrt(eps)
    huber,     ///< |z|^2/2 for |z| <= alpha, alpha |z| - alpha^2/2 beyond
    abs        ///< |z|
  };

  static Potential quadratic() { return Potential(Kind::quadratic, 1.0); }
  static Potential fair(double delta) { return Potential(Kind::fair, delta); }
  static Potential hyperbola(double eps) { return Potential(Kind::hyperbola, eps); }
  static Potential huber(double alpha) { return Potential(Kind::huber, alpha); }
  static Potential abs() { return Potential(Kind::abs, 1.0); }

  Kind kind() const { return kind_; }
  double parameter() const { return param_; }
  bool smooth() const { return kind_ != Kind::abs; }
  std::string name() const;

  double value(Complex z) const;
  double value(CVector const &z) const;

  /// Gradient of the real-valued psi w.r.t. (Re z, Im z), packed as a complex number: z * psi'(|z|)/|z|.
  Complex gradient(Complex z) const;
  CVector gradient(CVector const &z) const;

  /// Huber curvature psi'(r)/r; a majorizing curvature for every kind here.
  double weight(double r) const;
  /// sup over z of the second derivative, used for Lipschitz bounds.
  double max_curvature() const;

  /// argmin_x 0.5 |x - z|^2 + t psi(x); closed forms for abs, quadratic and huber only.
  Complex prox(Complex z, double t) const;
  CVector prox(CVector const &z, double t) const;

private:
  Potential(Kind kind, double param);
  Kind kind_;
  double param_;
};

/// sign(z) max(|z| - c, 0) with sign(0) = 0.
Complex soft_threshold(Complex z, double c);
CVector soft_threshold(CVector const &z, double c);
/// Per-coordinate thresholds.
CVector soft_threshold(CVector const &z, RVector const &c);

} // namespace pmri
