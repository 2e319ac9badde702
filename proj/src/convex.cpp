#include "selfdual/convex.hpp"

#include <cmath>
#include <stdexcept>

namespace selfdual {

namespace {

constexpr double kIndicatorTol = 1e-12;

void check_dim(const ConvexPotential& phi, const VectorXd& x, const char* where) {
  if (phi.dim() >= 0 && phi.dim() != x.size())
    throw std::invalid_argument(std::string(where) + ": dimension mismatch");
}

double quadratic_value(const QuadraticFormKind& q, const VectorXd& x) {
  return 0.5 * q.scale * x.cwiseProduct(q.weights).dot(x) + q.linear.dot(x);
}

double quadratic_conjugate(const QuadraticFormKind& q, const VectorXd& p) {
  const VectorXd r = p - q.linear;
  return 0.5 / q.scale * r.cwiseQuotient(q.weights).dot(r);
}

double quartic_value(const QuarticNormKind& k, const VectorXd& x) {
  const double xnorm2 = x.cwiseProduct(k.base.weights).dot(x);
  return quadratic_value(k.base, x) + 0.25 * k.epsilon * xnorm2 * xnorm2;
}

}  // namespace

ConvexPotential::ConvexPotential(Kind k) : kind_(std::move(k)) {
  std::visit(
      [this](const auto& kk) {
        using T = std::decay_t<decltype(kk)>;
        if constexpr (std::is_same_v<T, QuadraticFormKind>) {
          dim_ = kk.weights.size();
        } else if constexpr (std::is_same_v<T, IndicatorKind>) {
          dim_ = kk.point.size();
        } else if constexpr (std::is_same_v<T, QuarticNormKind>) {
          dim_ = kk.base.weights.size();
        } else if constexpr (std::is_same_v<T, Tabulated1DKind>) {
          dim_ = 1;
          convex_samples_ = kk.table->convex_on_grid();
        } else if constexpr (std::is_same_v<T, Tabulated2DKind>) {
          dim_ = 2;
          convex_samples_ = kk.table->convex_on_grid();
        }
      },
      kind_);
}

ConvexPotential ConvexPotential::quadratic_form(VectorXd weights, VectorXd linear, double scale) {
  if (scale <= 0.0) throw std::invalid_argument("quadratic_form: scale must be positive");
  if ((weights.array() <= 0.0).any())
    throw std::invalid_argument("quadratic_form: weights must be positive");
  if (linear.size() == 0) linear = VectorXd::Zero(weights.size());
  if (linear.size() != weights.size())
    throw std::invalid_argument("quadratic_form: weights/linear size mismatch");
  return ConvexPotential(QuadraticFormKind{std::move(weights), std::move(linear), scale});
}

ConvexPotential ConvexPotential::isotropic_quadratic(Eigen::Index dim, double scale,
                                                     VectorXd linear) {
  return quadratic_form(VectorXd::Ones(dim), std::move(linear), scale);
}

ConvexPotential ConvexPotential::scaled_square(double coefficient) {
  if (coefficient < 0.0) throw std::invalid_argument("scaled_square: coefficient must be >= 0");
  return ConvexPotential(ScaledSquareKind{coefficient});
}

ConvexPotential ConvexPotential::power_norm(double exponent, double coefficient) {
  if (exponent <= 1.0) throw std::invalid_argument("power_norm: exponent must exceed 1");
  if (coefficient <= 0.0) throw std::invalid_argument("power_norm: coefficient must be positive");
  return ConvexPotential(PowerNormKind{exponent, coefficient});
}

ConvexPotential ConvexPotential::indicator(VectorXd point) {
  return ConvexPotential(IndicatorKind{std::move(point)});
}

ConvexPotential ConvexPotential::quartic_norm(double epsilon, VectorXd weights, VectorXd linear,
                                              double scale) {
  if (epsilon < 0.0) throw std::invalid_argument("quartic_norm: epsilon must be >= 0");
  if (linear.size() == 0) linear = VectorXd::Zero(weights.size());
  return ConvexPotential(
      QuarticNormKind{epsilon, QuadraticFormKind{std::move(weights), std::move(linear), scale}});
}

ConvexPotential ConvexPotential::tabulated(Tabulated1D table) {
  return ConvexPotential(Tabulated1DKind{std::make_shared<const Tabulated1D>(std::move(table))});
}

ConvexPotential ConvexPotential::tabulated(Tabulated2D table) {
  return ConvexPotential(Tabulated2DKind{std::make_shared<const Tabulated2D>(std::move(table))});
}

double dual_power_root(double nu, double eps, double r) {
  if (r < 0.0) throw std::invalid_argument("dual_power_root: r must be >= 0");
  if (eps == 0.0) return r / nu;
  // Newton on the increasing convex map s -> eps*s^3 + nu*s.
  double s = std::min(r / nu, std::cbrt(r / eps));
  for (int it = 0; it < 100; ++it) {
    const double f = eps * s * s * s + nu * s - r;
    const double df = 3.0 * eps * s * s + nu;
    const double step = f / df;
    s -= step;
    if (std::abs(step) <= 1e-16 * (1.0 + std::abs(s))) break;
  }
  return std::max(s, 0.0);
}

ExtendedReal potential_value(const ConvexPotential& phi, const VectorXd& x) {
  check_dim(phi, x, "potential_value");
  return std::visit(
      [&](const auto& k) -> ExtendedReal {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, QuadraticFormKind>) {
          return quadratic_value(k, x);
        } else if constexpr (std::is_same_v<T, ScaledSquareKind>) {
          return 0.25 * k.coefficient * x.squaredNorm();
        } else if constexpr (std::is_same_v<T, PowerNormKind>) {
          return k.coefficient / k.exponent * std::pow(x.norm(), k.exponent);
        } else if constexpr (std::is_same_v<T, IndicatorKind>) {
          if ((x - k.point).norm() <= kIndicatorTol * (1.0 + k.point.norm()))
            return 0.0;
          return ExtendedReal::plus_infinity();
        } else if constexpr (std::is_same_v<T, QuarticNormKind>) {
          return quartic_value(k, x);
        } else if constexpr (std::is_same_v<T, Tabulated1DKind>) {
          if (!k.table->contains(x[0])) return ExtendedReal::plus_infinity();
          return k.table->value(x[0]);
        } else {
          if (!k.table->contains(x[0], x[1])) return ExtendedReal::plus_infinity();
          return k.table->value(x[0], x[1]);
        }
      },
      phi.kind());
}

ExtendedReal conjugate_value(const ConvexPotential& phi, const VectorXd& p) {
  check_dim(phi, p, "conjugate_value");
  return std::visit(
      [&](const auto& k) -> ExtendedReal {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, QuadraticFormKind>) {
          return quadratic_conjugate(k, p);
        } else if constexpr (std::is_same_v<T, ScaledSquareKind>) {
          if (k.coefficient == 0.0) {
            // Conjugate of the zero function: indicator of the origin.
            if (p.norm() <= kIndicatorTol) return 0.0;
            return ExtendedReal::plus_infinity();
          }
          return p.squaredNorm() / k.coefficient;
        } else if constexpr (std::is_same_v<T, PowerNormKind>) {
          const double q = k.exponent / (k.exponent - 1.0);
          return std::pow(k.coefficient, 1.0 - q) / q * std::pow(p.norm(), q);
        } else if constexpr (std::is_same_v<T, IndicatorKind>) {
          return p.dot(k.point);
        } else if constexpr (std::is_same_v<T, QuarticNormKind>) {
          const VectorXd res = p - k.base.linear;
          const double r = std::sqrt(res.cwiseQuotient(k.base.weights).dot(res));
          const double s = dual_power_root(k.base.scale, k.epsilon, r);
          return r * s - 0.5 * k.base.scale * s * s - 0.25 * k.epsilon * s * s * s * s;
        } else if constexpr (std::is_same_v<T, Tabulated1DKind>) {
          return k.table->conjugate(p[0]);
        } else {
          return k.table->conjugate(p[0], p[1]);
        }
      },
      phi.kind());
}

VectorXd subgradient(const ConvexPotential& phi, const VectorXd& x) {
  check_dim(phi, x, "subgradient");
  return std::visit(
      [&](const auto& k) -> VectorXd {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, QuadraticFormKind>) {
          return k.scale * k.weights.cwiseProduct(x) + k.linear;
        } else if constexpr (std::is_same_v<T, ScaledSquareKind>) {
          return 0.5 * k.coefficient * x;
        } else if constexpr (std::is_same_v<T, PowerNormKind>) {
          const double n = x.norm();
          if (n == 0.0) return VectorXd::Zero(x.size());
          return k.coefficient * std::pow(n, k.exponent - 2.0) * x;
        } else if constexpr (std::is_same_v<T, IndicatorKind>) {
          throw unsupported_operation("subgradient: indicator kind is set-valued");
        } else if constexpr (std::is_same_v<T, QuarticNormKind>) {
          const double xnorm2 = x.cwiseProduct(k.base.weights).dot(x);
          return (k.base.scale + k.epsilon * xnorm2) * k.base.weights.cwiseProduct(x) +
                 k.base.linear;
        } else if constexpr (std::is_same_v<T, Tabulated1DKind>) {
          VectorXd g(1);
          g[0] = k.table->slope(x[0]);
          return g;
        } else {
          // Exact bilinear-patch partial slopes via two 1D evaluations.
          const auto& t = *k.table;
          const double h = 1e-6;
          VectorXd g(2);
          g[0] = (t.value(std::min(x[0] + h, t.node_x(t.nx() - 1)), x[1]) -
                  t.value(std::max(x[0] - h, t.node_x(0)), x[1])) /
                 (2.0 * h);
          g[1] = (t.value(x[0], std::min(x[1] + h, t.node_y(t.ny() - 1))) -
                  t.value(x[0], std::max(x[1] - h, t.node_y(0)))) /
                 (2.0 * h);
          return g;
        }
      },
      phi.kind());
}

VectorXd conjugate_subgradient(const ConvexPotential& phi, const VectorXd& p) {
  check_dim(phi, p, "conjugate_subgradient");
  return std::visit(
      [&](const auto& k) -> VectorXd {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, QuadraticFormKind>) {
          return (p - k.linear).cwiseQuotient(k.weights) / k.scale;
        } else if constexpr (std::is_same_v<T, ScaledSquareKind>) {
          if (k.coefficient == 0.0)
            throw unsupported_operation("conjugate_subgradient: zero potential");
          return 2.0 / k.coefficient * p;
        } else if constexpr (std::is_same_v<T, PowerNormKind>) {
          const double q = k.exponent / (k.exponent - 1.0);
          const double n = p.norm();
          if (n == 0.0) return VectorXd::Zero(p.size());
          return std::pow(k.coefficient, 1.0 - q) * std::pow(n, q - 2.0) * p;
        } else if constexpr (std::is_same_v<T, IndicatorKind>) {
          return k.point;
        } else if constexpr (std::is_same_v<T, QuarticNormKind>) {
          const VectorXd res = p - k.base.linear;
          const double r = std::sqrt(res.cwiseQuotient(k.base.weights).dot(res));
          const double s = dual_power_root(k.base.scale, k.epsilon, r);
          const double mult = k.base.scale + k.epsilon * s * s;
          return res.cwiseQuotient(k.base.weights) / mult;
        } else {
          throw unsupported_operation("conjugate_subgradient: tabulated kind");
        }
      },
      phi.kind());
}

ExtendedReal fenchel_gap(const ConvexPotential& phi, const VectorXd& x, const VectorXd& p) {
  const ExtendedReal a = potential_value(phi, x);
  const ExtendedReal b = conjugate_value(phi, p);
  if (a.is_plus_infinity() || b.is_plus_infinity()) return ExtendedReal::plus_infinity();
  return ExtendedReal(a.finite() + b.finite() - x.dot(p));
}

}  // namespace selfdual
