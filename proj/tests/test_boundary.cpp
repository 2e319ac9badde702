#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "selfdual/boundary.hpp"
#include "selfdual/lagrangian.hpp"
#include "selfdual/rng.hpp"

using namespace selfdual;

namespace {

VectorXd vec(std::initializer_list<double> v) {
  VectorXd x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double e : v) x[i++] = e;
  return x;
}

}  // namespace

TEST_CASE("constructors realize the documented potentials") {
  Rng rng(2);
  const VectorXd x0 = rng.gaussian_vector(4);

  // InitialValue: psi(x) = |x|^2/4 - <x,x0>.
  const auto iv = BoundaryLagrangian::initial_value(x0);
  const ConvexPotential psi_iv = iv.psi(4);
  for (int s = 0; s < 20; ++s) {
    const VectorXd x = rng.gaussian_vector(4);
    CHECK(potential_value(psi_iv, x).finite() ==
          doctest::Approx(0.25 * x.squaredNorm() - x.dot(x0)).epsilon(1e-13));
  }

  // AntiPeriodic: psi == 0; Periodic: indicator of the origin.
  const auto anti = BoundaryLagrangian::anti_periodic();
  CHECK(potential_value(anti.psi(3), vec({1.0, -2.0, 0.5})).finite() == 0.0);
  const auto per = BoundaryLagrangian::periodic(3);
  CHECK(potential_value(per.psi(3), vec({0.0, 0.0, 0.0})).finite() == 0.0);
  CHECK(potential_value(per.psi(3), vec({0.1, 0.0, 0.0})).is_plus_infinity());

  // AlphaPeriodic: psi_l(a) = (l/4)|a|^2, alpha = (l-1)/(l+1).
  const auto ap = BoundaryLagrangian::alpha_periodic_lambda(3.0);
  CHECK(ap.alpha() == doctest::Approx(0.5));
  CHECK(potential_value(ap.psi(2), vec({2.0, 0.0})).finite() == doctest::Approx(3.0));

  CHECK_THROWS_AS(BoundaryLagrangian::alpha_periodic_lambda(0.0), std::invalid_argument);
  CHECK_THROWS_AS(BoundaryLagrangian::alpha_periodic_lambda(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(BoundaryLagrangian::alpha_periodic_alpha(1.0), std::invalid_argument);
}

TEST_CASE("alpha map at the reference lambdas") {
  CHECK(std::abs(BoundaryLagrangian::alpha_periodic_lambda(1.0 / 3.0).alpha() + 0.5) <= 1e-15);
  CHECK(BoundaryLagrangian::alpha_periodic_lambda(1.0).alpha() == 0.0);
  CHECK(BoundaryLagrangian::alpha_periodic_lambda(3.0).alpha() == 0.5);
  // Round trip through the alpha input.
  for (const double a : {-0.9, -0.5, 0.0, 0.3, 0.99})
    CHECK(BoundaryLagrangian::alpha_periodic_alpha(a).alpha() ==
          doctest::Approx(a).epsilon(1e-14));
}

TEST_CASE("boundary values") {
  Rng rng(3);
  const auto per = BoundaryLagrangian::periodic(3);
  CHECK(boundary_value(per, vec({0.0, 0.0, 0.0}), rng.gaussian_vector(3)).finite() == 0.0);
  CHECK(boundary_value(per, vec({0.2, 0.0, 0.0}), rng.gaussian_vector(3)).is_plus_infinity());

  const auto anti = BoundaryLagrangian::anti_periodic();
  CHECK(boundary_value(anti, rng.gaussian_vector(3), vec({0.0, 0.0, 0.0})).finite() == 0.0);
  CHECK(boundary_value(anti, rng.gaussian_vector(3), vec({0.1, 0.0, 0.0})).is_plus_infinity());

  // AlphaPeriodic: (l/4)|a|^2 + (1/l)|b|^2, conjugate checked by a grid sup.
  const double lam = 1.7;
  const auto ap = BoundaryLagrangian::alpha_periodic_lambda(lam);
  for (int s = 0; s < 20; ++s) {
    const VectorXd a = rng.gaussian_vector(1), b = rng.gaussian_vector(1);
    const double expected = 0.25 * lam * a.squaredNorm() + b.squaredNorm() / lam;
    CHECK(boundary_value(ap, a, b).finite() == doctest::Approx(expected).epsilon(1e-12));
    double grid_sup = -1e300;
    for (double x = -40.0; x <= 40.0; x += 1e-3)
      grid_sup = std::max(grid_sup, -b[0] * x - 0.25 * lam * x * x);
    CHECK(boundary_value(ap, a, b).finite() ==
          doctest::Approx(0.25 * lam * a.squaredNorm() + grid_sup).epsilon(1e-6));
  }
}

TEST_CASE("residuals vanish exactly on condition-satisfying endpoints") {
  Rng rng(5);
  const Eigen::Index dim = 5;
  const VectorXd x0 = rng.gaussian_vector(dim);

  for (int s = 0; s < 100; ++s) {
    const VectorXd uT = rng.gaussian_vector(dim);
    // InitialValue: u(0) = x0 for any u(T).
    CHECK(boundary_residual(BoundaryLagrangian::initial_value(x0), x0, uT) <= 1e-10);
    // Periodic / AntiPeriodic.
    CHECK(boundary_residual(BoundaryLagrangian::periodic(dim), uT, uT) <= 1e-10);
    CHECK(boundary_residual(BoundaryLagrangian::anti_periodic(), -uT, uT) <= 1e-10);
    // AlphaPeriodic(3): u(0) = u(T)/2.
    CHECK(boundary_residual(BoundaryLagrangian::alpha_periodic_lambda(3.0), 0.5 * uT, uT) <=
          1e-10);
  }

  // The documented instance: lambda = 3, uT = 2 e1, u0 = e1.
  CHECK(boundary_residual(BoundaryLagrangian::alpha_periodic_lambda(3.0), vec({1.0, 0.0}),
                          vec({2.0, 0.0})) <= 1e-14);

  // Violations scale at least with half their magnitude.
  for (int s = 0; s < 100; ++s) {
    const VectorXd uT = rng.gaussian_vector(dim);
    const VectorXd dir = rng.gaussian_vector(dim).normalized();
    const double delta = rng.uniform(0.05, 2.0);
    CHECK(boundary_residual(BoundaryLagrangian::initial_value(x0), x0 + delta * dir, uT) >=
          0.5 * delta);
    CHECK(boundary_residual(BoundaryLagrangian::periodic(dim), uT + delta * dir, uT) >=
          0.5 * delta);
    CHECK(boundary_residual(BoundaryLagrangian::anti_periodic(), -uT + delta * dir, uT) >=
          0.5 * delta);
    CHECK(boundary_residual(BoundaryLagrangian::alpha_periodic_lambda(3.0),
                            0.5 * uT + delta * dir, uT) >= 0.5 * delta);
  }
}

TEST_CASE("boundary gap is the residual certificate") {
  Rng rng(7);
  const Eigen::Index dim = 4;
  const VectorXd x0 = rng.gaussian_vector(dim);
  const auto iv = BoundaryLagrangian::initial_value(x0);
  const auto ap = BoundaryLagrangian::alpha_periodic_lambda(2.0);

  for (int s = 0; s < 100; ++s) {
    const VectorXd u0 = rng.gaussian_vector(dim), uT = rng.gaussian_vector(dim);
    // InitialValue gap is exactly |u0 - x0|^2.
    CHECK(boundary_gap(iv, u0, uT).finite() ==
          doctest::Approx((u0 - x0).squaredNorm()).epsilon(1e-11));
    CHECK(boundary_gap(ap, u0, uT).as_double() >= -1e-12);
  }
  // Gap vanishes exactly on the satisfied condition.
  const VectorXd uT = rng.gaussian_vector(dim);
  CHECK(boundary_gap(ap, (ap.alpha()) * uT, uT).finite() <= 1e-12);
}

TEST_CASE("gap gradients match finite differences (smooth kinds)") {
  Rng rng(11);
  const Eigen::Index dim = 3;
  const VectorXd x0 = rng.gaussian_vector(dim);
  for (const auto& ell : {BoundaryLagrangian::initial_value(x0),
                          BoundaryLagrangian::alpha_periodic_lambda(1.8)}) {
    for (int s = 0; s < 20; ++s) {
      const VectorXd u0 = rng.gaussian_vector(dim), uT = rng.gaussian_vector(dim);
      const auto [g0, gT] = boundary_gap_gradient(ell, u0, uT);
      const double h = 1e-6;
      for (Eigen::Index i = 0; i < dim; ++i) {
        VectorXd e = VectorXd::Zero(dim);
        e[i] = h;
        const double fd0 =
            (boundary_gap(ell, u0 + e, uT).finite() - boundary_gap(ell, u0 - e, uT).finite()) /
            (2.0 * h);
        const double fdT =
            (boundary_gap(ell, u0, uT + e).finite() - boundary_gap(ell, u0, uT - e).finite()) /
            (2.0 * h);
        CHECK(std::abs(fd0 - g0[i]) < 1e-6 * (1.0 + std::abs(g0[i])));
        CHECK(std::abs(fdT - gT[i]) < 1e-6 * (1.0 + std::abs(gT[i])));
      }
    }
  }
  CHECK_THROWS_AS(
      boundary_gap_gradient(BoundaryLagrangian::periodic(3), vec({1.0, 0.0, 0.0}),
                            vec({1.0, 0.0, 0.0})),
      unsupported_operation);
}

TEST_CASE("each kind's ell is anti-selfdual on H x H and bounded below") {
  Rng rng(13);
  const Eigen::Index dim = 3;
  std::vector<std::pair<VectorXd, VectorXd>> samples;
  for (int s = 0; s < 150; ++s)
    samples.emplace_back(rng.gaussian_vector(dim), rng.gaussian_vector(dim));

  const VectorXd x0 = rng.gaussian_vector(dim);
  for (const auto& ell :
       {BoundaryLagrangian::initial_value(x0), BoundaryLagrangian::periodic(dim),
        BoundaryLagrangian::anti_periodic(), BoundaryLagrangian::alpha_periodic_lambda(0.6)}) {
    CHECK(selfduality_residual(AsdLagrangian::potential(ell.psi(dim)), samples) <= 1e-8);
    double lowest = 1e300;
    for (int s = 0; s < 200; ++s) {
      const ExtendedReal v =
          boundary_value(ell, rng.gaussian_vector(dim), rng.gaussian_vector(dim));
      if (v.is_finite()) lowest = std::min(lowest, v.finite());
    }
    CHECK(lowest >= -x0.squaredNorm() - 1e-9);  // InitialValue's analytic floor is the worst
  }
}

TEST_CASE("coercivity flags for the 3D setting") {
  CHECK(BoundaryLagrangian::alpha_periodic_lambda(2.0).coercive_both());
  CHECK(BoundaryLagrangian::initial_value(vec({1.0})).coercive_both());
  CHECK(!BoundaryLagrangian::anti_periodic().coercive_both());
  CHECK(BoundaryLagrangian::anti_periodic().alias_sign() == -1.0);
  CHECK(BoundaryLagrangian::periodic(2).alias_sign() == 1.0);
  CHECK(!BoundaryLagrangian::initial_value(vec({1.0})).alias_sign().has_value());
}
