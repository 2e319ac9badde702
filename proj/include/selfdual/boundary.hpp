#pragma once

#include <Eigen/Dense>
#include <optional>

#include "selfdual/convex.hpp"

namespace selfdual {

/// Temporal boundary Lagrangian ell(a,b) = psi(a) + psi*(-b) on H x H.
/// The derived-field condition -(u(0)+u(T))/2 in d(psi)(u(0)-u(T)) encodes
/// the boundary condition of each kind:
///   InitialValue(x0):   u(0) = x0,        psi(a) = |a|^2/4 - <a,x0>
///   Periodic:           u(0) = u(T),      psi = indicator of 0
///   AntiPeriodic:       u(0) = -u(T),     psi = 0
///   AlphaPeriodic(l):   u(0) = a u(T),    psi(a) = (l/4)|a|^2, a = (l-1)/(l+1)
class BoundaryLagrangian {
 public:
  enum class Kind { InitialValue, Periodic, AntiPeriodic, AlphaPeriodic };

  static BoundaryLagrangian initial_value(VectorXd x0);
  static BoundaryLagrangian periodic(Eigen::Index dim);
  static BoundaryLagrangian anti_periodic();
  static BoundaryLagrangian alpha_periodic_lambda(double lambda);
  static BoundaryLagrangian alpha_periodic_alpha(double alpha);

  Kind boundary_kind() const { return kind_; }
  const VectorXd& x0() const { return x0_; }
  double lambda() const { return lambda_; }
  /// Endpoint ratio u(0) = alpha u(T) realized by the AlphaPeriodic kind.
  double alpha() const { return (lambda_ - 1.0) / (lambda_ + 1.0); }

  /// The potential psi on H (for a given ambient dimension when the kind
  /// itself is dimension-free).
  ConvexPotential psi(Eigen::Index dim) const;

  /// Smooth kinds enter the objective; the others are enforced through the
  /// path parameterization (u(T) aliased to sign * u(0)).
  bool smooth() const {
    return kind_ == Kind::InitialValue || kind_ == Kind::AlphaPeriodic;
  }
  std::optional<double> alias_sign() const {
    if (kind_ == Kind::Periodic) return 1.0;
    if (kind_ == Kind::AntiPeriodic) return -1.0;
    return std::nullopt;
  }

  /// Coercivity in both variables, required by the 3D setting.
  bool coercive_both() const { return smooth(); }

 private:
  BoundaryLagrangian(Kind k, VectorXd x0, double lambda)
      : kind_(k), x0_(std::move(x0)), lambda_(lambda) {}
  Kind kind_;
  VectorXd x0_;
  double lambda_ = 1.0;
};

/// ell(a, b) = psi(a) + psi*(-b).
ExtendedReal boundary_value(const BoundaryLagrangian& ell, const VectorXd& a, const VectorXd& b);

/// ell(a, b) + <a, b>; nonnegative, zero exactly on condition-satisfying
/// endpoint pairs (a = u0 - uT, b = (u0 + uT)/2).
ExtendedReal boundary_gap(const BoundaryLagrangian& ell, const VectorXd& u0, const VectorXd& uT);

/// H-norm residual of the endpoint condition; zero iff the kind's boundary
/// condition holds.
double boundary_residual(const BoundaryLagrangian& ell, const VectorXd& u0, const VectorXd& uT);

/// Gradients of boundary_gap with respect to (u0, uT); smooth kinds only.
std::pair<VectorXd, VectorXd> boundary_gap_gradient(const BoundaryLagrangian& ell,
                                                    const VectorXd& u0, const VectorXd& uT);

}  // namespace selfdual
