#include "selfdual/lagrangian.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace selfdual {

namespace {

using Eigen::MatrixXd;

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_finite(const VectorXd& v, const char* where) {
  if (!v.allFinite()) throw std::invalid_argument(std::string(where) + ": non-finite input");
}

double as_value(const ExtendedReal& e) {
  if (e.is_plus_infinity()) return kInf;
  if (e.is_minus_infinity()) return -kInf;
  return e.finite();
}

// ---------------------------------------------------------------------------
// Exact quadratic algebra in small dimensions. A function known to be
// quadratic is recovered exactly from unit-offset probes; minimization and
// conjugation are then linear solves. None of this assumes anti-selfduality,
// which is what keeps the residual checks meaningful.
// ---------------------------------------------------------------------------

struct Quad {
  MatrixXd H;
  VectorXd b;
  double c = 0.0;

  double value(const VectorXd& w) const { return 0.5 * w.dot(H * w) + b.dot(w) + c; }
};

Quad reconstruct_quadratic(const std::function<double(const VectorXd&)>& f, Eigen::Index m) {
  Quad q;
  q.H = MatrixXd::Zero(m, m);
  q.b = VectorXd::Zero(m);
  q.c = f(VectorXd::Zero(m));
  std::vector<double> fplus(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) {
    VectorXd e = VectorXd::Zero(m);
    e[i] = 1.0;
    const double fp = f(e), fm = f(-e);
    fplus[static_cast<std::size_t>(i)] = fp;
    q.b[i] = 0.5 * (fp - fm);
    q.H(i, i) = fp + fm - 2.0 * q.c;
  }
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = i + 1; j < m; ++j) {
      VectorXd e = VectorXd::Zero(m);
      e[i] = 1.0;
      e[j] = 1.0;
      const double hij =
          f(e) - fplus[static_cast<std::size_t>(i)] - fplus[static_cast<std::size_t>(j)] + q.c;
      q.H(i, j) = hij;
      q.H(j, i) = hij;
    }
  return q;
}

std::pair<VectorXd, double> quad_min(const Quad& q) {
  Eigen::LDLT<MatrixXd> ldlt(q.H);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
    throw unsupported_operation("quadratic minimization: Hessian not positive definite");
  VectorXd w = ldlt.solve(-q.b);
  return {w, q.value(w)};
}

double quad_conjugate(const Quad& q, const VectorXd& z) {
  Eigen::LDLT<MatrixXd> ldlt(q.H);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
    throw unsupported_operation("quadratic conjugate: Hessian not positive definite");
  VectorXd w = ldlt.solve(z - q.b);
  return z.dot(w) - q.value(w);
}

// ---------------------------------------------------------------------------
// 1D continuous minimization: coarse scan for a bracket, golden refinement.
// Objectives along the searched line are convex (concave ones are negated).
// ---------------------------------------------------------------------------

struct Min1dResult {
  double x = 0.0;
  double value = kInf;
};

Min1dResult min_1d(const std::function<double(double)>& f, double lo, double hi,
                   int scan_points = 33) {
  double best_x = lo, best_v = kInf;
  int best_i = 0;
  const double step = (hi - lo) / (scan_points - 1);
  for (int i = 0; i < scan_points; ++i) {
    const double x = lo + step * i;
    const double v = f(x);
    if (v < best_v) {
      best_v = v;
      best_x = x;
      best_i = i;
    }
  }
  if (!std::isfinite(best_v)) return {best_x, kInf};
  double a = lo + step * std::max(0, best_i - 1);
  double b = lo + step * std::min(scan_points - 1, best_i + 1);
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 64; ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = f(x2);
    }
  }
  const double xm = 0.5 * (a + b);
  const double fm = f(xm);
  if (fm < best_v) return {xm, fm};
  return {best_x, best_v};
}

// ---------------------------------------------------------------------------
// Kind access helpers.
// ---------------------------------------------------------------------------

const ConvexPotential* potential_of(const AsdLagrangian& L) {
  if (const auto* p = std::get_if<AsdLagrangian::PotentialKind>(&L.kind())) return &p->phi;
  if (const auto* s = std::get_if<AsdLagrangian::SkewPotentialKind>(&L.kind())) return &s->phi;
  return nullptr;
}

const Tabulated1D* underlying_table(const AsdLagrangian& L) {
  if (const auto* p = potential_of(L)) {
    if (const auto* t = std::get_if<Tabulated1DKind>(&p->kind())) return t->table.get();
    return nullptr;
  }
  if (const auto* o = std::get_if<AsdLagrangian::OplusKind>(&L.kind()))
    return underlying_table(*o->left);
  const auto& r = std::get<AsdLagrangian::RegularizedKind>(L.kind());
  return underlying_table(*r.base);
}

bool quadratic_potential(const ConvexPotential& phi) {
  if (std::holds_alternative<QuadraticFormKind>(phi.kind())) return true;
  if (const auto* s = std::get_if<ScaledSquareKind>(&phi.kind())) return s->coefficient > 0.0;
  if (const auto* p = std::get_if<PowerNormKind>(&phi.kind())) return p->exponent == 2.0;
  return false;
}

ExtendedReal biconjugate_value(const ConvexPotential& phi, const VectorXd& x) {
  if (const auto* t = std::get_if<Tabulated1DKind>(&phi.kind())) {
    if (!t->table->contains(x[0])) return ExtendedReal::plus_infinity();
    return t->table->hull_value(x[0]);
  }
  return potential_value(phi, x);
}

double finite_or_inf_value(const AsdLagrangian& L, const VectorXd& x, const VectorXd& p) {
  return as_value(lagrangian_value(L, x, p));
}

double scalar1(double v) { return v; }

VectorXd vec1(double v) {
  VectorXd x(1);
  x[0] = v;
  return x;
}

// Scalar value/conjugate of a 1D potential. Used by the sup-exchange
// evaluation of Hamiltonians of regularized tabulated Lagrangians.
double phi_val(const ConvexPotential& phi, double x) {
  return as_value(potential_value(phi, vec1(x)));
}
double phi_conj(const ConvexPotential& phi, double p) {
  return as_value(conjugate_value(phi, vec1(p)));
}

struct TableBounds {
  double lo = 0.0, hi = 0.0;  // x-range
  double smax = 0.0;          // largest |slope|
};

TableBounds bounds_of(const Tabulated1D& t) {
  return {t.lo(), t.hi(), std::max(std::abs(t.min_slope()), std::abs(t.max_slope()))};
}

}  // namespace

AsdLagrangian::AsdLagrangian(Kind k) : kind_(std::move(k)) {
  std::visit(
      [this](const auto& kk) {
        using T = std::decay_t<decltype(kk)>;
        if constexpr (std::is_same_v<T, PotentialKind>) {
          dim_ = kk.phi.dim();
        } else if constexpr (std::is_same_v<T, SkewPotentialKind>) {
          dim_ = kk.gamma.rows();
        } else if constexpr (std::is_same_v<T, OplusKind>) {
          dim_ = kk.left->dim() >= 0 ? kk.left->dim() : kk.right->dim();
        } else {
          dim_ = kk.base->dim();
        }
      },
      kind_);
}

AsdLagrangian AsdLagrangian::potential(ConvexPotential phi) {
  return AsdLagrangian(PotentialKind{std::move(phi)});
}

AsdLagrangian AsdLagrangian::skew_potential(ConvexPotential phi, Eigen::MatrixXd gamma) {
  if (gamma.rows() != gamma.cols())
    throw std::invalid_argument("skew_potential: gamma must be square");
  if (phi.dim() >= 0 && phi.dim() != gamma.rows())
    throw std::invalid_argument("skew_potential: phi/gamma dimension mismatch");
  return AsdLagrangian(SkewPotentialKind{std::move(phi), std::move(gamma)});
}

bool AsdLagrangian::quadratic_family() const {
  return std::visit(
      [](const auto& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, PotentialKind>) {
          return quadratic_potential(k.phi);
        } else if constexpr (std::is_same_v<T, SkewPotentialKind>) {
          return quadratic_potential(k.phi);
        } else if constexpr (std::is_same_v<T, OplusKind>) {
          return k.left->quadratic_family() && k.right->quadratic_family();
        } else {
          return k.base->quadratic_family() && k.exponent == 2.0;
        }
      },
      kind_);
}

bool AsdLagrangian::tabulated_1d() const {
  return std::visit(
      [](const auto& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, PotentialKind>) {
          return std::holds_alternative<Tabulated1DKind>(k.phi.kind());
        } else if constexpr (std::is_same_v<T, SkewPotentialKind>) {
          return false;  // no skew action in one dimension
        } else if constexpr (std::is_same_v<T, OplusKind>) {
          return k.left->tabulated_1d() && k.right->tabulated_1d();
        } else {
          return k.base->tabulated_1d();
        }
      },
      kind_);
}

ExtendedReal lagrangian_value(const AsdLagrangian& L, const VectorXd& x, const VectorXd& p) {
  check_finite(x, "lagrangian_value");
  check_finite(p, "lagrangian_value");
  if (x.size() != p.size()) throw std::invalid_argument("lagrangian_value: dimension mismatch");
  if (L.dim() >= 0 && L.dim() != x.size())
    throw std::invalid_argument("lagrangian_value: dimension mismatch");

  return std::visit(
      [&](const auto& k) -> ExtendedReal {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, AsdLagrangian::PotentialKind>) {
          return potential_value(k.phi, x) + conjugate_value(k.phi, -p);
        } else if constexpr (std::is_same_v<T, AsdLagrangian::SkewPotentialKind>) {
          return potential_value(k.phi, x) + conjugate_value(k.phi, -(k.gamma * x) - p);
        } else if constexpr (std::is_same_v<T, AsdLagrangian::OplusKind>) {
          if (L.quadratic_family()) {
            auto f = [&](const VectorXd& r) {
              return finite_or_inf_value(*k.left, x, r) + finite_or_inf_value(*k.right, x, p - r);
            };
            return ExtendedReal(quad_min(reconstruct_quadratic(f, x.size())).second);
          }
          if (L.tabulated_1d()) {
            // Grid infimum with smallest-index tie break: the documented
            // semantics a brute-force oracle must reproduce exactly.
            double best = kInf;
            for (Eigen::Index i = 0; i < k.r_grid.size(); ++i) {
              const double v = finite_or_inf_value(*k.left, x, vec1(k.r_grid[i])) +
                               finite_or_inf_value(*k.right, x, p - vec1(k.r_grid[i]));
              if (v < best) best = v;
            }
            if (!std::isfinite(best)) return ExtendedReal::plus_infinity();
            return ExtendedReal(best);
          }
          throw unsupported_operation("oplus evaluation: no closed form and no grid");
        } else {
          const auto& reg = k;
          const double lam = reg.lambda, pe = reg.exponent, qe = pe / (pe - 1.0);
          if (L.quadratic_family()) {
            if (reg.variant == RegVariant::First) {
              auto f = [&](const VectorXd& y) {
                return finite_or_inf_value(*reg.base, y, p) + (x - y).squaredNorm() / (2.0 * lam);
              };
              const double v = quad_min(reconstruct_quadratic(f, x.size())).second;
              return ExtendedReal(v + 0.5 * lam * p.squaredNorm());
            }
            if (reg.variant == RegVariant::Second) {
              auto f = [&](const VectorXd& s) {
                return finite_or_inf_value(*reg.base, x, s) + (p - s).squaredNorm() / (2.0 * lam);
              };
              const double v = quad_min(reconstruct_quadratic(f, x.size())).second;
              return ExtendedReal(v + 0.5 * lam * x.squaredNorm());
            }
            auto f = [&](const VectorXd& ys) {
              const VectorXd y = ys.head(x.size());
              const VectorXd s = ys.tail(x.size());
              return finite_or_inf_value(*reg.base, y, s) + (x - y).squaredNorm() / (2.0 * lam) +
                     (s - p).squaredNorm() / (2.0 * lam) + 0.5 * lam * y.squaredNorm();
            };
            const double v = quad_min(reconstruct_quadratic(f, 2 * x.size())).second;
            return ExtendedReal(v + 0.5 * lam * p.squaredNorm());
          }
          if (L.tabulated_1d()) {
            const TableBounds tb = bounds_of(*underlying_table(L));
            const double xs = x[0], ps = p[0];
            if (reg.variant == RegVariant::First) {
              auto f = [&](double y) {
                return finite_or_inf_value(*reg.base, vec1(y), p) +
                       std::pow(std::abs(xs - y), pe) / (lam * pe);
              };
              const auto m = min_1d(f, tb.lo, tb.hi);
              if (!std::isfinite(m.value)) return ExtendedReal::plus_infinity();
              return ExtendedReal(m.value +
                                  std::pow(lam, qe - 1.0) * std::pow(std::abs(ps), qe) / qe);
            }
            if (reg.variant == RegVariant::Second) {
              const double bracket =
                  std::pow(lam * (tb.smax + std::abs(xs) + 1.0), 1.0 / (qe - 1.0)) + 1.0;
              auto f = [&](double s) {
                return finite_or_inf_value(*reg.base, x, vec1(s)) +
                       std::pow(std::abs(ps - s), qe) / (lam * qe);
              };
              const auto m = min_1d(f, ps - bracket, ps + bracket);
              if (!std::isfinite(m.value)) return ExtendedReal::plus_infinity();
              return ExtendedReal(m.value +
                                  std::pow(lam, pe - 1.0) * std::pow(std::abs(xs), pe) / pe);
            }
            const double sb = lam * (std::abs(tb.lo) + std::abs(tb.hi) + 1.0) + 1.0;
            auto f = [&](double y) {
              auto g = [&](double s) {
                return finite_or_inf_value(*reg.base, vec1(y), vec1(s)) +
                       (s - ps) * (s - ps) / (2.0 * lam);
              };
              const auto inner = min_1d(g, ps - sb, ps + sb);
              return inner.value + (xs - y) * (xs - y) / (2.0 * lam) + 0.5 * lam * y * y;
            };
            const auto m = min_1d(f, tb.lo, tb.hi);
            if (!std::isfinite(m.value)) return ExtendedReal::plus_infinity();
            return ExtendedReal(m.value + 0.5 * lam * ps * ps);
          }
          throw unsupported_operation("regularized evaluation: unsupported base kind");
        }
      },
      L.kind());
}

namespace {

// Hamiltonians of the regularized kinds over a potential-form base, via the
// always-valid exchange of iterated suprema. Single-level searches only.
ExtendedReal regularized_hamiltonian_1d(const AsdLagrangian::RegularizedKind& reg,
                                        const VectorXd& x, const VectorXd& y) {
  const ConvexPotential* phi = potential_of(*reg.base);
  if (!phi) throw unsupported_operation("hamiltonian: nested regularized base");
  const TableBounds tb = bounds_of(*underlying_table(*reg.base));
  const double lam = reg.lambda, pe = reg.exponent, qe = pe / (pe - 1.0);
  const double xs = x[0], ys = y[0];
  const double sx = std::max(std::abs(tb.lo), std::abs(tb.hi));

  if (reg.variant == RegVariant::Second) {
    // H(x,y) = H0(x,y) + lambda^(p-1)(|y|^p - |x|^p)/p
    const ExtendedReal at_x = potential_value(*phi, x);
    if (at_x.is_plus_infinity()) return ExtendedReal::minus_infinity();
    const ExtendedReal at_my = biconjugate_value(*phi, -y);
    if (at_my.is_plus_infinity()) return ExtendedReal::plus_infinity();
    const double power = std::pow(lam, pe - 1.0) *
                         (std::pow(std::abs(ys), pe) - std::pow(std::abs(xs), pe)) / pe;
    return ExtendedReal(at_my.finite() - at_x.finite() + power);
  }
  if (reg.variant == RegVariant::First) {
    // H(x,y) = sup_r { y r - lambda^(q-1)|r|^q/q - phi*(-r) }
    //          - inf_w { phi(w) + |x-w|^p/(lambda p) }
    const double rb =
        std::pow((std::abs(ys) + sx + 1.0) / std::pow(lam, qe - 1.0), 1.0 / (qe - 1.0)) + 1.0;
    auto neg_inner = [&](double r) {
      return -(ys * r - std::pow(lam, qe - 1.0) * std::pow(std::abs(r), qe) / qe -
               phi_conj(*phi, -r));
    };
    const double conj_part = -min_1d(neg_inner, -rb, rb).value;
    auto env = [&](double w) {
      return phi_val(*phi, w) + std::pow(std::abs(xs - w), pe) / (lam * pe);
    };
    const double env_part = min_1d(env, tb.lo, tb.hi).value;
    return ExtendedReal(conj_part - env_part);
  }
  // Both: the r-supremum is a scalar quadratic maximization in closed form;
  // the remaining y- and s-searches separate.
  auto inner_r = [&](double v, double s) {
    const double r = (lam * v + s) / (lam * lam + 1.0);
    return v * r - 0.5 * lam * r * r - (r - s) * (r - s) / (2.0 * lam);
  };
  auto env_y = [&](double w) {
    return phi_val(*phi, w) + (xs - w) * (xs - w) / (2.0 * lam) + 0.5 * lam * w * w;
  };
  const double env_part = min_1d(env_y, tb.lo, tb.hi).value;
  const double sb = (lam * lam + 1.0) * (std::abs(ys) + lam * (sx + 1.0)) + 1.0;
  auto neg_s = [&](double s) { return -(inner_r(ys, s) - phi_conj(*phi, -s)); };
  const double s_part = -min_1d(neg_s, -sb, sb).value;
  return ExtendedReal(s_part - env_part);
}

}  // namespace

ExtendedReal hamiltonian(const AsdLagrangian& L, const VectorXd& x, const VectorXd& y) {
  check_finite(x, "hamiltonian");
  check_finite(y, "hamiltonian");

  if (const auto* pk = std::get_if<AsdLagrangian::PotentialKind>(&L.kind())) {
    const ExtendedReal at_x = potential_value(pk->phi, x);
    if (at_x.is_plus_infinity()) return ExtendedReal::minus_infinity();
    const ExtendedReal at_my = biconjugate_value(pk->phi, -y);
    if (at_my.is_plus_infinity()) return ExtendedReal::plus_infinity();
    return ExtendedReal(at_my.finite() - at_x.finite());
  }
  if (const auto* sk = std::get_if<AsdLagrangian::SkewPotentialKind>(&L.kind())) {
    const ExtendedReal at_x = potential_value(sk->phi, x);
    if (at_x.is_plus_infinity()) return ExtendedReal::minus_infinity();
    const ExtendedReal at_my = biconjugate_value(sk->phi, -y);
    if (at_my.is_plus_infinity()) return ExtendedReal::plus_infinity();
    return ExtendedReal(at_my.finite() - at_x.finite() - y.dot(sk->gamma * x));
  }
  if (const auto* ok = std::get_if<AsdLagrangian::OplusKind>(&L.kind())) {
    // H_{L (+) M} = H_L + H_M (iterated suprema exchange).
    const ExtendedReal hl = hamiltonian(*ok->left, x, y);
    const ExtendedReal hr = hamiltonian(*ok->right, x, y);
    if (hl.is_minus_infinity() || hr.is_minus_infinity()) return ExtendedReal::minus_infinity();
    return hl + hr;
  }
  const auto& reg = std::get<AsdLagrangian::RegularizedKind>(L.kind());
  if (L.quadratic_family()) {
    auto g = [&](const VectorXd& p) { return finite_or_inf_value(L, x, p) - y.dot(p); };
    return ExtendedReal(-quad_min(reconstruct_quadratic(g, x.size())).second);
  }
  if (L.tabulated_1d()) return regularized_hamiltonian_1d(reg, x, y);
  throw unsupported_operation("hamiltonian: unsupported kind");
}

VectorXd derived_field(const AsdLagrangian& L, const VectorXd& x) {
  check_finite(x, "derived_field");

  if (const auto* pk = std::get_if<AsdLagrangian::PotentialKind>(&L.kind()))
    return subgradient(pk->phi, x);
  if (const auto* sk = std::get_if<AsdLagrangian::SkewPotentialKind>(&L.kind()))
    return sk->gamma * x + subgradient(sk->phi, x);

  // Composite kinds: minimize the convex gap p -> L(x,-p) - <x,p>, which
  // vanishes exactly on the derived field.
  if (L.quadratic_family()) {
    auto g = [&](const VectorXd& p) { return finite_or_inf_value(L, x, -p) - x.dot(p); };
    return quad_min(reconstruct_quadratic(g, x.size())).first;
  }
  if (L.tabulated_1d()) {
    const auto* reg = std::get_if<AsdLagrangian::RegularizedKind>(&L.kind());
    const TableBounds tb = bounds_of(*underlying_table(L));
    double radius = tb.smax + std::abs(x[0]) + 2.0;
    if (reg) {
      radius += std::abs(x[0]) / reg->lambda +
                std::pow(reg->lambda, reg->exponent - 1.0) *
                    std::pow(std::abs(x[0]) + 1.0, reg->exponent - 1.0);
    }
    auto g = [&](double p) { return finite_or_inf_value(L, x, vec1(-p)) - x[0] * p; };
    const auto m = min_1d(g, -radius, radius, 257);
    return vec1(scalar1(m.x));
  }
  throw unsupported_operation("derived_field: unsupported kind");
}

ExtendedReal lagrangian_conjugate(const AsdLagrangian& L, const VectorXd& q, const VectorXd& y) {
  check_finite(q, "lagrangian_conjugate");
  check_finite(y, "lagrangian_conjugate");

  if (const auto* pk = std::get_if<AsdLagrangian::PotentialKind>(&L.kind()))
    return conjugate_value(pk->phi, q) + biconjugate_value(pk->phi, -y);
  if (const auto* sk = std::get_if<AsdLagrangian::SkewPotentialKind>(&L.kind()))
    return conjugate_value(sk->phi, q - sk->gamma.transpose() * y) +
           biconjugate_value(sk->phi, -y);

  if (L.quadratic_family()) {
    auto f = [&](const VectorXd& xp) {
      return finite_or_inf_value(L, xp.head(q.size()), xp.tail(q.size()));
    };
    Quad joint = reconstruct_quadratic(f, 2 * q.size());
    VectorXd z(2 * q.size());
    z.head(q.size()) = q;
    z.tail(q.size()) = y;
    return ExtendedReal(quad_conjugate(joint, z));
  }
  if (L.tabulated_1d()) {
    // L*(q,y) = sup_x { <q,x> + H_L(x,y) }, concave in x. The first
    // regularization smooths in x, so the maximizer may leave the table
    // range; expand the bracket until it is interior.
    const TableBounds tb = bounds_of(*underlying_table(L));
    bool hit_plus_inf = false;
    auto g = [&](double xs) {
      const ExtendedReal h = hamiltonian(L, vec1(xs), y);
      if (h.is_plus_infinity()) {
        hit_plus_inf = true;
        return -kInf;
      }
      if (h.is_minus_infinity()) return kInf;
      return -(q[0] * xs + h.finite());
    };
    double lo = tb.lo - 1.0, hi = tb.hi + 1.0;
    for (int attempt = 0; attempt < 4; ++attempt) {
      const auto m = min_1d(g, lo, hi);
      if (hit_plus_inf) return ExtendedReal::plus_infinity();
      if (!std::isfinite(m.value)) return ExtendedReal::minus_infinity();
      if (m.x > lo + 0.02 * (hi - lo) && m.x < hi - 0.02 * (hi - lo))
        return ExtendedReal(-m.value);
      const double mid = 0.5 * (lo + hi), half = 2.0 * (hi - lo);
      lo = mid - half;
      hi = mid + half;
    }
    return ExtendedReal::plus_infinity();
  }
  throw unsupported_operation("lagrangian_conjugate: unsupported kind");
}

AsdLagrangian oplus(const AsdLagrangian& L, const AsdLagrangian& M) {
  if (L.dim() >= 0 && M.dim() >= 0 && L.dim() != M.dim())
    throw std::invalid_argument("oplus: operand dimension mismatch");
  AsdLagrangian::OplusKind k;
  k.left = std::make_shared<AsdLagrangian>(L);
  k.right = std::make_shared<AsdLagrangian>(M);
  if (L.tabulated_1d() && M.tabulated_1d()) {
    const TableBounds bl = bounds_of(*underlying_table(L));
    const TableBounds bm = bounds_of(*underlying_table(M));
    const double radius = 2.0 * (bl.smax + bm.smax + 1.0);
    const Eigen::Index count =
        4 * std::max(underlying_table(L)->size(), underlying_table(M)->size()) + 1;
    k.r_grid = Eigen::VectorXd::LinSpaced(count, -radius, radius);
  }
  return AsdLagrangian(AsdLagrangian::Kind(std::move(k)));
}

AsdLagrangian regularize(const AsdLagrangian& L, double lambda, RegVariant variant,
                         double exponent) {
  if (lambda <= 0.0) throw std::invalid_argument("regularize: lambda must be positive");
  if (exponent <= 1.0) throw std::invalid_argument("regularize: exponent must exceed 1");
  if (variant == RegVariant::Both && exponent != 2.0)
    throw std::invalid_argument("regularize: the two-sided variant is quadratic (exponent 2)");
  AsdLagrangian::RegularizedKind k;
  k.base = std::make_shared<AsdLagrangian>(L);
  k.lambda = lambda;
  k.variant = variant;
  k.exponent = exponent;
  return AsdLagrangian(AsdLagrangian::Kind(std::move(k)));
}

double selfduality_residual(const AsdLagrangian& L,
                            const std::vector<std::pair<VectorXd, VectorXd>>& samples) {
  double worst = 0.0;
  for (const auto& [x, p] : samples) {
    const ExtendedReal dual = lagrangian_conjugate(L, p, x);
    const ExtendedReal flipped = lagrangian_value(L, -x, -p);
    if (dual.is_plus_infinity() && flipped.is_plus_infinity()) continue;
    if (!dual.is_finite() || !flipped.is_finite()) return kInf;
    worst = std::max(worst, std::abs(dual.finite() - flipped.finite()));
  }
  return worst;
}

}  // namespace selfdual
