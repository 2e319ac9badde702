#pragma once

#include <Eigen/Dense>
#include <memory>
#include <variant>

#include "selfdual/extended_real.hpp"
#include "selfdual/tabulated.hpp"

namespace selfdual {

using Eigen::VectorXd;

/// phi(x) = (scale/2) <diag(weights) x, x> + <linear, x>, weights > 0.
/// The weights play the role of a symmetric positive spectral multiplier.
struct QuadraticFormKind {
  VectorXd weights;
  VectorXd linear;
  double scale = 1.0;
};

/// phi(x) = (coefficient/4) |x|^2. The quarter normalization matches the
/// boundary potentials this kind exists for; coefficient 0 gives phi == 0.
struct ScaledSquareKind {
  double coefficient = 1.0;
};

/// phi(x) = (coefficient/p) |x|^p with p > 1.
struct PowerNormKind {
  double exponent = 2.0;
  double coefficient = 1.0;
};

/// phi(x) = 0 at the point, +infinity elsewhere.
struct IndicatorKind {
  VectorXd point;
};

/// phi(x) = base(x) + (epsilon/4) <diag(weights) x, x>^2.
struct QuarticNormKind {
  double epsilon = 0.0;
  QuadraticFormKind base;
};

struct Tabulated1DKind {
  std::shared_ptr<const Tabulated1D> table;
};

struct Tabulated2DKind {
  std::shared_ptr<const Tabulated2D> table;
};

/// A convex function with exact value, subgradient and Legendre-Fenchel
/// conjugate evaluation. Immutable after construction, safe to share.
class ConvexPotential {
 public:
  using Kind = std::variant<QuadraticFormKind, ScaledSquareKind, PowerNormKind, IndicatorKind,
                            QuarticNormKind, Tabulated1DKind, Tabulated2DKind>;

  static ConvexPotential quadratic_form(VectorXd weights, VectorXd linear, double scale);
  /// Isotropic convenience: (scale/2)|x|^2 + <linear, x>.
  static ConvexPotential isotropic_quadratic(Eigen::Index dim, double scale,
                                             VectorXd linear = VectorXd());
  static ConvexPotential scaled_square(double coefficient);
  static ConvexPotential power_norm(double exponent, double coefficient);
  static ConvexPotential indicator(VectorXd point);
  static ConvexPotential quartic_norm(double epsilon, VectorXd weights, VectorXd linear,
                                      double scale);
  static ConvexPotential tabulated(Tabulated1D table);
  static ConvexPotential tabulated(Tabulated2D table);

  const Kind& kind() const { return kind_; }

  /// Fixed ambient dimension, or -1 when the kind works in any dimension.
  Eigen::Index dim() const { return dim_; }

  /// Warning field: false when tabulated samples fail the convexity check,
  /// in which case conjugates are those of the convex hull.
  bool convex_samples() const { return convex_samples_; }

  bool is_tabulated() const {
    return std::holds_alternative<Tabulated1DKind>(kind_) ||
           std::holds_alternative<Tabulated2DKind>(kind_);
  }

 private:
  explicit ConvexPotential(Kind k);
  Kind kind_;
  Eigen::Index dim_ = -1;
  bool convex_samples_ = true;
};

ExtendedReal potential_value(const ConvexPotential& phi, const VectorXd& x);
ExtendedReal conjugate_value(const ConvexPotential& phi, const VectorXd& p);

/// Gradient of phi at x; throws unsupported_operation for set-valued kinds
/// (indicator away from smoothness).
VectorXd subgradient(const ConvexPotential& phi, const VectorXd& x);

/// Gradient of the conjugate at p (the argmax of <p,x> - phi(x)).
VectorXd conjugate_subgradient(const ConvexPotential& phi, const VectorXd& p);

/// phi(x) + phi*(p) - <x,p>; nonnegative, zero iff p is a subgradient at x.
ExtendedReal fenchel_gap(const ConvexPotential& phi, const VectorXd& x, const VectorXd& p);

struct unsupported_operation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Positive root of eps*s^3 + nu*s = r for r >= 0 (conjugates of the
/// quartic-regularized quadratic reduce to this scalar equation).
double dual_power_root(double nu, double eps, double r);

}  // namespace selfdual
