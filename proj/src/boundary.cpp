#include "selfdual/boundary.hpp"

#include <cmath>
#include <stdexcept>

namespace selfdual {

BoundaryLagrangian BoundaryLagrangian::initial_value(VectorXd x0) {
  return BoundaryLagrangian(Kind::InitialValue, std::move(x0), 1.0);
}

BoundaryLagrangian BoundaryLagrangian::periodic(Eigen::Index dim) {
  return BoundaryLagrangian(Kind::Periodic, VectorXd::Zero(dim), 1.0);
}

BoundaryLagrangian BoundaryLagrangian::anti_periodic() {
  return BoundaryLagrangian(Kind::AntiPeriodic, VectorXd(), 1.0);
}

BoundaryLagrangian BoundaryLagrangian::alpha_periodic_lambda(double lambda) {
  if (lambda <= 0.0)
    throw std::invalid_argument("alpha_periodic: lambda must be positive");
  return BoundaryLagrangian(Kind::AlphaPeriodic, VectorXd(), lambda);
}

BoundaryLagrangian BoundaryLagrangian::alpha_periodic_alpha(double alpha) {
  if (!(std::abs(alpha) < 1.0))
    throw std::invalid_argument("alpha_periodic: need |alpha| < 1");
  return alpha_periodic_lambda((1.0 + alpha) / (1.0 - alpha));
}

ConvexPotential BoundaryLagrangian::psi(Eigen::Index dim) const {
  switch (kind_) {
    case Kind::InitialValue:
      return ConvexPotential::isotropic_quadratic(x0_.size(), 0.5, -x0_);
    case Kind::Periodic:
      return ConvexPotential::indicator(VectorXd::Zero(dim));
    case Kind::AntiPeriodic:
      return ConvexPotential::scaled_square(0.0);
    case Kind::AlphaPeriodic:
      return ConvexPotential::scaled_square(lambda_);
  }
  throw std::logic_error("unreachable");
}

ExtendedReal boundary_value(const BoundaryLagrangian& ell, const VectorXd& a, const VectorXd& b) {
  const ConvexPotential p = ell.psi(a.size());
  return potential_value(p, a) + conjugate_value(p, -b);
}

ExtendedReal boundary_gap(const BoundaryLagrangian& ell, const VectorXd& u0, const VectorXd& uT) {
  const VectorXd a = u0 - uT;
  const VectorXd b = 0.5 * (u0 + uT);
  const ExtendedReal v = boundary_value(ell, a, b);
  if (!v.is_finite()) return v;
  return ExtendedReal(v.finite() + a.dot(b));
}

double boundary_residual(const BoundaryLagrangian& ell, const VectorXd& u0, const VectorXd& uT) {
  switch (ell.boundary_kind()) {
    case BoundaryLagrangian::Kind::Periodic:
      return (u0 - uT).norm();
    case BoundaryLagrangian::Kind::AntiPeriodic:
      return (u0 + uT).norm();
    default: {
      const ConvexPotential p = ell.psi(u0.size());
      return (0.5 * (u0 + uT) + subgradient(p, u0 - uT)).norm();
    }
  }
}

std::pair<VectorXd, VectorXd> boundary_gap_gradient(const BoundaryLagrangian& ell,
                                                    const VectorXd& u0, const VectorXd& uT) {
  if (!ell.smooth())
    throw unsupported_operation(
        "boundary_gap_gradient: non-smooth boundary kind (use the aliased parameterization)");
  const VectorXd a = u0 - uT;
  const VectorXd b = 0.5 * (u0 + uT);
  const ConvexPotential p = ell.psi(u0.size());
  const VectorXd dpsi = subgradient(p, a);
  const VectorXd dconj = conjugate_subgradient(p, -b);
  // d/du0 [psi(a) + psi*(-b) + <a,b>], and likewise for uT.
  const VectorXd g0 = dpsi - 0.5 * dconj + b + 0.5 * a;
  const VectorXd gT = -dpsi - 0.5 * dconj - b + 0.5 * a;
  return {g0, gT};
}

}  // namespace selfdual
