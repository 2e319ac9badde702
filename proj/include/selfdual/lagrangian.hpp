#pragma once

#include <Eigen/Dense>
#include <memory>
#include <variant>
#include <vector>

#include "selfdual/convex.hpp"

namespace selfdual {

/// Which of the three inf-convolution regularizations to apply.
enum class RegVariant { First, Second, Both };

/// Anti-selfdual Lagrangian L(x,p) on a Euclidean pairing (the duality map
/// is the identity here; weighted spaces live in the spectral modules).
///
/// Catalog:
///   Potential:      L(x,p) = phi(x) + phi*(-p)
///   SkewPotential:  L(x,p) = phi(x) + phi*(-Gamma x - p), Gamma skew-adjoint
///   Oplus:          (L (+) M)(x,p) = inf_r { L(x,r) + M(x,p-r) }
///   Regularized:    the three lambda-regularizations (see regularize())
///
/// Tabulated Lagrangians are potential-form objects over tabulated convex
/// functions; the sample grid is the ground truth, not an approximation.
class AsdLagrangian {
 public:
  struct PotentialKind {
    ConvexPotential phi;
  };
  struct SkewPotentialKind {
    ConvexPotential phi;
    Eigen::MatrixXd gamma;
  };
  struct OplusKind {
    std::shared_ptr<const AsdLagrangian> left;
    std::shared_ptr<const AsdLagrangian> right;
    Eigen::VectorXd r_grid;  // infimum grid when operands are tabulated
  };
  struct RegularizedKind {
    std::shared_ptr<const AsdLagrangian> base;
    double lambda = 1.0;
    RegVariant variant = RegVariant::Second;
    double exponent = 2.0;
  };
  using Kind = std::variant<PotentialKind, SkewPotentialKind, OplusKind, RegularizedKind>;

  static AsdLagrangian potential(ConvexPotential phi);
  static AsdLagrangian skew_potential(ConvexPotential phi, Eigen::MatrixXd gamma);

  const Kind& kind() const { return kind_; }
  Eigen::Index dim() const { return dim_; }

  /// True when evaluation reduces to finite-dimensional quadratic algebra.
  bool quadratic_family() const;
  /// True when evaluation is backed by a 1D tabulated convex potential.
  bool tabulated_1d() const;

 private:
  explicit AsdLagrangian(Kind k);
  friend AsdLagrangian oplus(const AsdLagrangian&, const AsdLagrangian&);
  friend AsdLagrangian regularize(const AsdLagrangian&, double, RegVariant, double);
  Kind kind_;
  Eigen::Index dim_ = -1;
};

/// L(x,p). Infima for composite kinds are grid-bracketed on the tabulated
/// sample grid and refined continuously; quadratic kinds are exact.
ExtendedReal lagrangian_value(const AsdLagrangian& L, const VectorXd& x, const VectorXd& p);

/// Legendre-Fenchel dual in both variables, L*(q,y), computed without
/// assuming anti-selfduality (this is what makes the residual a real test).
ExtendedReal lagrangian_conjugate(const AsdLagrangian& L, const VectorXd& q, const VectorXd& y);

/// H_L(x,y) = sup_p { <y,p> - L(x,p) }. Out-of-domain first argument
/// returns the flagged -infinity state (concave-in-x convention).
ExtendedReal hamiltonian(const AsdLagrangian& L, const VectorXd& x, const VectorXd& y);

/// The unique p with L(x,-p) - <x,p> = 0 at smooth points.
VectorXd derived_field(const AsdLagrangian& L, const VectorXd& x);

/// Infimal convolution in the second slot.
AsdLagrangian oplus(const AsdLagrangian& L, const AsdLagrangian& M);

/// The lambda-regularizations; anti-selfduality is preserved:
///   First:  inf_y { L(y,r) + |x-y|^p/(lambda p) } + lambda^(q-1)|r|^q/q
///   Second: inf_s { L(x,s) + |r-s|^q/(lambda q) } + lambda^(p-1)|x|^p/p
///   Both:   inf_{y,s} { L(y,s) + |x-y|^2/(2 lambda) + |s-r|^2/(2 lambda)
///                       + (lambda/2)|y|^2 } + (lambda/2)|r|^2   (p = 2)
AsdLagrangian regularize(const AsdLagrangian& L, double lambda, RegVariant variant,
                         double exponent = 2.0);

/// max over samples of |L*(p,x) - L(-x,-p)|; certifies anti-selfduality on
/// the sample set when small.
double selfduality_residual(const AsdLagrangian& L,
                            const std::vector<std::pair<VectorXd, VectorXd>>& samples);

}  // namespace selfdual
