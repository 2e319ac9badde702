#pragma once

#include <optional>
#include <vector>

#include "selfdual/boundary.hpp"
#include "selfdual/torus.hpp"

namespace selfdual {

/// Time-sampled trajectory u_0..u_N of spectral fields on one grid,
/// uniform step dt = T/N.
struct Path {
  GridPtr grid;
  double T = 1.0;
  std::vector<SpectralField> nodes;

  Path() = default;
  Path(GridPtr g, double horizon, int N)
      : grid(std::move(g)), T(horizon), nodes(static_cast<std::size_t>(N) + 1,
                                              SpectralField(grid)) {
    if (N < 2) throw std::invalid_argument("Path: need N >= 2");
  }

  int intervals() const { return static_cast<int>(nodes.size()) - 1; }
  double dt() const { return T / intervals(); }
};

/// View of a field's coefficients as a flat real vector; Euclidean dots of
/// these views equal H-inner products, so the boundary catalog and the
/// optimizer work directly on them.
VectorXd flatten(const SpectralField& u);
SpectralField unflatten(const GridPtr& grid, const Eigen::Ref<const VectorXd>& v);

/// The discrete selfdual path functional
///   total = sum_i dt [ Phi(t_i, ubar_i) + Phi*(t_i, -Du_i - Lambda ubar_i) ]
///           + ell(u_0 - u_N, (u_0 + u_N)/2)
/// with midpoint states ubar_i = (u_i + u_{i+1})/2, differences
/// Du_i = (u_{i+1} - u_i)/dt, and
///   Phi(t, u) = (nu/2)|u|_X^2 + <f(t), u> + (eps/4)|u|_X^4.
/// Phi* is closed-form through the Stokes inverse; the quartic term adds a
/// scalar cubic root per node.
struct DiscreteFunctional {
  GridPtr grid;
  double T = 1.0;
  int N = 2;
  double eps = 0.0;
  bool use_advection = true;
  std::vector<SpectralField> forcing;  // size 1 (steady) or N (per midpoint)
  BoundaryLagrangian boundary = BoundaryLagrangian::anti_periodic();
  std::optional<SpectralField> x0_field;  // InitialValue datum

  static DiscreteFunctional make(GridPtr grid, double T, int N, BoundaryLagrangian boundary,
                                 std::vector<SpectralField> forcing, double eps = 0.0,
                                 bool use_advection = true,
                                 std::optional<SpectralField> x0 = std::nullopt);

  DiscreteFunctional with_eps(double e) const {
    DiscreteFunctional c = *this;
    c.eps = e;
    return c;
  }

  double dt() const { return T / N; }
  const SpectralField& forcing_at(int i) const {
    return forcing.size() == 1 ? forcing[0] : forcing[static_cast<std::size_t>(i)];
  }
};

/// Functional value with its certificate decomposition. The reported total
/// is the sum of nonnegative terms (per-node Fenchel gaps and the boundary
/// gap), which is what makes values near zero trustworthy; total_direct is
/// the literal quadrature and agrees to rounding.
struct FunctionalReport {
  ExtendedReal total;
  ExtendedReal total_direct;
  VectorXd node_gap;             // unweighted per-node gaps (size N)
  double boundary_term = 0.0;    // boundary gap ell + <a,b>
  double pde_residual = 0.0;     // max_i |Du + Lambda ubar + dPhi(ubar)|_X*
  double advection_pairing_max = 0.0;
  double energy_residual = 0.0;  // filled by energy_identity_residual
};

FunctionalReport functional_value(const DiscreteFunctional& F, const Path& path);

/// Analytic gradient with respect to every node; requires a smooth boundary
/// kind (periodic/anti-periodic use the aliased parameterization instead).
std::vector<SpectralField> functional_gradient(const DiscreteFunctional& F, const Path& path);

/// Gradient of the quadrature part only (no boundary term); this is the
/// whole gradient along the aliased constraint manifold.
std::vector<SpectralField> functional_gradient_interior(const DiscreteFunctional& F,
                                                        const Path& path);

/// Value and interior gradient in one pass (shared per-node transforms).
FunctionalReport functional_value_and_gradient(const DiscreteFunctional& F, const Path& path,
                                               std::vector<SpectralField>& grad_interior);

/// max over nodes t of | |u_t|_H^2 + 2 sum_{i<t} dt [Phi + Phi*]_i - |u_0|_H^2 |.
double energy_identity_residual(const DiscreteFunctional& F, const Path& path);

/// |u_N|^2/2 + sum dt [Phi + Phi*] - |u_0|^2/2 evaluated with the
/// unregularized potential (eps = 0); nonpositive up to solver tolerance
/// fulfils the 3D energy inequality.
double energy_inequality_check(const DiscreteFunctional& F, const Path& path);

/// Steady-state functional Phi(u) + Phi*(-Lambda u) + <Lambda u, u> for a
/// time-independent forcing.
FunctionalReport stationary_functional(const GridPtr& grid, const SpectralField& f,
                                       const SpectralField& u);

SpectralField stationary_gradient(const GridPtr& grid, const SpectralField& f,
                                  const SpectralField& u);

}  // namespace selfdual
