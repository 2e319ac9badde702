#include "selfdual/verify.hpp"

#include <cmath>
#include <map>
#include <sstream>

#include "selfdual/boundary.hpp"
#include "selfdual/field_io.hpp"
#include "selfdual/lagrangian.hpp"
#include "selfdual/optimizer.hpp"
#include "selfdual/stepper.hpp"

namespace selfdual {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

CheckResult bound_check(const std::string& name, double value, double bound) {
  return {name, std::isfinite(value) && value <= bound,
          "value " + fmt(value) + " vs bound " + fmt(bound)};
}

// --------------------------------------------------------------------------
// Catalog used by the duality battery.
// --------------------------------------------------------------------------

Eigen::MatrixXd rotation90() {
  Eigen::MatrixXd g(2, 2);
  g << 0, -1, 1, 0;
  return g;
}

Eigen::MatrixXd skew3() {
  Eigen::MatrixXd g(3, 3);
  g << 0, 0.7, -0.3, -0.7, 0, 1.1, 0.3, -1.1, 0;
  return g;
}

ConvexPotential smooth_table(double a = 0.5, double b = 0.25, Eigen::Index count = 1201) {
  Eigen::VectorXd v(count);
  for (Eigen::Index i = 0; i < count; ++i) {
    const double x = -3.0 + 6.0 * static_cast<double>(i) / static_cast<double>(count - 1);
    v[i] = a * x * x + b * x * x * x * x;
  }
  return ConvexPotential::tabulated(Tabulated1D(-3.0, 3.0, v));
}

struct CatalogEntry {
  std::string name;
  AsdLagrangian L;
  Eigen::Index dim;
  double sample_radius;
  bool closed_form;  // residual bound 1e-8 vs tabulated grid tolerance
};

std::vector<CatalogEntry> battery_catalog() {
  std::vector<CatalogEntry> cat;
  Eigen::VectorXd w3(3);
  w3 << 1.0, 2.5, 0.6;
  Eigen::VectorXd lin3(3);
  lin3 << 0.3, -0.2, 0.1;

  cat.push_back({"potential_iso2", AsdLagrangian::potential(
                     ConvexPotential::isotropic_quadratic(2, 1.0)), 2, 2.0, true});
  cat.push_back({"potential_weighted3",
                 AsdLagrangian::potential(ConvexPotential::quadratic_form(w3, lin3, 0.7)), 3,
                 2.0, true});
  cat.push_back({"potential_power15",
                 AsdLagrangian::potential(ConvexPotential::power_norm(1.5, 0.8)), 2, 2.0, true});
  cat.push_back({"skew_rot2",
                 AsdLagrangian::skew_potential(
                     ConvexPotential::isotropic_quadratic(2, 0.8), rotation90()),
                 2, 2.0, true});
  cat.push_back({"skew_weighted3",
                 AsdLagrangian::skew_potential(ConvexPotential::quadratic_form(w3, lin3, 1.2),
                                               skew3()),
                 3, 2.0, true});

  const AsdLagrangian base2 =
      AsdLagrangian::potential(ConvexPotential::isotropic_quadratic(2, 1.0));
  const AsdLagrangian skew2 = AsdLagrangian::skew_potential(
      ConvexPotential::isotropic_quadratic(2, 0.8), rotation90());
  cat.push_back({"reg_first_quad", regularize(base2, 0.5, RegVariant::First), 2, 2.0, true});
  cat.push_back({"reg_second_quad", regularize(base2, 0.7, RegVariant::Second), 2, 2.0, true});
  cat.push_back({"reg_second_skew", regularize(skew2, 1.3, RegVariant::Second), 2, 2.0, true});
  cat.push_back({"reg_both_quad", regularize(base2, 0.9, RegVariant::Both), 2, 2.0, true});

  const AsdLagrangian tab = AsdLagrangian::potential(smooth_table());
  cat.push_back({"tabulated", tab, 1, 1.2, false});
  cat.push_back({"reg_first_tab", regularize(tab, 0.8, RegVariant::First), 1, 1.0, false});
  cat.push_back({"reg_second_tab", regularize(tab, 0.5, RegVariant::Second), 1, 1.0, false});
  cat.push_back({"reg_both_tab", regularize(tab, 0.6, RegVariant::Both), 1, 1.0, false});
  cat.push_back({"reg_second_tab_p3",
                 regularize(tab, 0.7, RegVariant::Second, 3.0), 1, 1.0, false});
  return cat;
}

}  // namespace

// --------------------------------------------------------------------------
// Criterion-style batteries (also exposed through run_suite).
// --------------------------------------------------------------------------

SuiteResult asd_battery_checks() {
  SuiteResult res;
  res.suite = "duality/battery";
  Rng rng(101);
  const int samples = 1000;

  for (const auto& entry : battery_catalog()) {
    double worst_nonneg = 0.0;   // most negative L + <x,p>
    double worst_diag = -1e300;  // largest H(x,-x)
    double worst_odd = -1e300;   // largest H(-y,-x) + H(x,y)
    std::vector<std::pair<VectorXd, VectorXd>> pairs;
    pairs.reserve(samples);
    for (int s = 0; s < samples; ++s) {
      const VectorXd x = entry.sample_radius * rng.gaussian_vector(entry.dim) / 2.0;
      const VectorXd p = entry.sample_radius * rng.gaussian_vector(entry.dim) / 2.0;
      const VectorXd y = entry.sample_radius * rng.gaussian_vector(entry.dim) / 2.0;
      pairs.emplace_back(x, p);

      const ExtendedReal L = lagrangian_value(entry.L, x, p);
      if (L.is_finite()) worst_nonneg = std::min(worst_nonneg, L.finite() + x.dot(p));

      const ExtendedReal hd = hamiltonian(entry.L, x, -x);
      if (hd.is_finite()) worst_diag = std::max(worst_diag, hd.finite());
      if (hd.is_plus_infinity()) worst_diag = 1e300;

      const ExtendedReal h1 = hamiltonian(entry.L, x, y);
      const ExtendedReal h2 = hamiltonian(entry.L, -y, -x);
      if (h1.is_finite() && h2.is_finite())
        worst_odd = std::max(worst_odd, h1.finite() + h2.finite());
      else if (h1.is_plus_infinity() && h2.is_plus_infinity())
        worst_odd = 1e300;
    }
    res.checks.push_back(bound_check(entry.name + "/nonneg", -worst_nonneg, 1e-10));
    res.checks.push_back(bound_check(entry.name + "/H_diag", worst_diag, 1e-10));
    res.checks.push_back(bound_check(entry.name + "/H_almost_odd", worst_odd, 1e-10));
    const double resid = selfduality_residual(entry.L, pairs);
    res.checks.push_back(
        bound_check(entry.name + "/selfduality", resid, entry.closed_form ? 1e-8 : 1e-6));
  }
  return res;
}

SuiteResult lemma_regularization_checks() {
  SuiteResult res;
  res.suite = "duality/lemma";
  Rng rng(202);

  const AsdLagrangian base2 =
      AsdLagrangian::potential(ConvexPotential::isotropic_quadratic(2, 1.0));
  const AsdLagrangian skew2 = AsdLagrangian::skew_potential(
      ConvexPotential::isotropic_quadratic(2, 0.8), rotation90());
  const AsdLagrangian tab = AsdLagrangian::potential(smooth_table());

  // Derived field of the second regularization: dL2(x) = dL(x) + l^{p-1}|x|^{p-2} x.
  {
    double worst = 0.0;
    for (const auto& [L, lam] :
         std::vector<std::pair<AsdLagrangian, double>>{{base2, 0.7}, {skew2, 1.3}}) {
      const AsdLagrangian reg = regularize(L, lam, RegVariant::Second);
      for (int s = 0; s < 100; ++s) {
        const VectorXd x = rng.gaussian_vector(2);
        const VectorXd expected = derived_field(L, x) + lam * x;
        worst = std::max(worst, (derived_field(reg, x) - expected).norm());
      }
    }
    res.checks.push_back(bound_check("second_variant_field_quadratic", worst, 1e-6));
  }
  {
    double worst = 0.0;
    for (const double pe : {2.0, 3.0}) {
      const AsdLagrangian reg = regularize(tab, 0.6, RegVariant::Second, pe);
      for (int s = 0; s < 50; ++s) {
        VectorXd x(1);
        x[0] = rng.uniform(-1.0, 1.0);
        if (std::abs(x[0]) < 0.05) continue;
        const double lamterm =
            std::pow(0.6, pe - 1.0) * std::pow(std::abs(x[0]), pe - 2.0) * x[0];
        const VectorXd expected = derived_field(tab, x) + lamterm * VectorXd::Ones(1);
        worst = std::max(worst, (derived_field(reg, x) - expected).norm());
      }
    }
    res.checks.push_back(bound_check("second_variant_field_tabulated", worst, 1e-6));
  }

  // First regularization: |dL1(x)| <= |x| / lambda.
  {
    double worst = 0.0;
    for (const double lam : {0.5, 1.0, 2.0}) {
      const AsdLagrangian reg = regularize(base2, lam, RegVariant::First);
      for (int s = 0; s < 100; ++s) {
        const VectorXd x = 2.0 * rng.gaussian_vector(2);
        worst = std::max(worst, derived_field(reg, x).norm() - x.norm() / lam);
      }
      const AsdLagrangian regt = regularize(tab, lam, RegVariant::First);
      for (int s = 0; s < 50; ++s) {
        VectorXd x(1);
        x[0] = rng.uniform(-1.0, 1.0);
        worst = std::max(worst, derived_field(regt, x).norm() - x.norm() / lam);
      }
    }
    res.checks.push_back(bound_check("first_variant_bound", worst, 1e-8));
  }

  // Oplus on grids: implementation must equal the brute-force grid infimum
  // exactly, and match the Hamiltonian sup-form within grid tolerance.
  {
    const AsdLagrangian tabB = AsdLagrangian::potential(smooth_table(0.8, 0.05));
    const AsdLagrangian comp = oplus(tab, tabB);
    const auto& ok = std::get<AsdLagrangian::OplusKind>(comp.kind());
    double worst_exact = 0.0, worst_supform = 0.0;
    for (int s = 0; s < 40; ++s) {
      VectorXd x(1), p(1);
      x[0] = rng.uniform(-1.0, 1.0);
      p[0] = rng.uniform(-1.5, 1.5);
      const double impl = lagrangian_value(comp, x, p).finite();
      double brute = HUGE_VAL;
      for (Eigen::Index i = 0; i < ok.r_grid.size(); ++i) {
        VectorXd r(1);
        r[0] = ok.r_grid[i];
        const double v =
            lagrangian_value(tab, x, r).finite() + lagrangian_value(tabB, x, p - r).finite();
        if (v < brute) brute = v;
      }
      worst_exact = std::max(worst_exact, std::abs(impl - brute));

      // sup over the table nodes of <y,-p> + H_L(y,-x) + H_M(y,-x)
      const Tabulated1D* t = std::get_if<Tabulated1DKind>(
                                 &std::get<AsdLagrangian::PotentialKind>(tab.kind()).phi.kind())
                                 ->table.get();
      double sup = -HUGE_VAL;
      for (Eigen::Index i = 0; i < t->size(); ++i) {
        VectorXd y(1);
        y[0] = t->node(i);
        const ExtendedReal hl = hamiltonian(tab, y, -x);
        const ExtendedReal hr = hamiltonian(tabB, y, -x);
        if (!hl.is_finite() || !hr.is_finite()) continue;
        sup = std::max(sup, -y[0] * p[0] + hl.finite() + hr.finite());
      }
      worst_supform = std::max(worst_supform, std::abs(impl - sup));
    }
    res.checks.push_back(bound_check("oplus_grid_exact", worst_exact, 0.0));
    res.checks.push_back(bound_check("oplus_supform", worst_supform, 1e-3));
  }

  // lambda -> 0 convergence of the two-sided regularization.
  {
    double prev = HUGE_VAL;
    bool monotone = true;
    double last = HUGE_VAL;
    VectorXd x(1), p(1);
    x[0] = 0.4;
    p[0] = -0.3;
    const double exact = lagrangian_value(tab, x, p).finite();
    for (const double lam : {1e-1, 1e-2, 1e-3}) {
      const AsdLagrangian reg = regularize(tab, lam, RegVariant::Both);
      last = std::abs(lagrangian_value(reg, x, p).finite() - exact);
      if (last > prev + 1e-12) monotone = false;
      prev = last;
    }
    res.checks.push_back({"both_variant_lambda_limit", monotone && last <= 5e-3,
                          "final gap " + fmt(last) + (monotone ? ", monotone" : ", NOT monotone")});
  }

  // Regularizations preserve anti-selfduality (sampled residuals).
  {
    Rng rng2(303);
    double worst_closed = 0.0, worst_tab = 0.0;
    std::vector<std::pair<VectorXd, VectorXd>> pq, pt;
    for (int s = 0; s < 100; ++s) {
      pq.emplace_back(rng2.gaussian_vector(2), rng2.gaussian_vector(2));
      VectorXd x(1), p(1);
      x[0] = rng2.uniform(-1.0, 1.0);
      p[0] = rng2.uniform(-1.0, 1.0);
      pt.emplace_back(x, p);
    }
    for (const auto variant : {RegVariant::First, RegVariant::Second, RegVariant::Both}) {
      worst_closed =
          std::max(worst_closed, selfduality_residual(regularize(skew2, 0.8, variant), pq));
      worst_tab = std::max(worst_tab, selfduality_residual(regularize(tab, 0.8, variant), pt));
    }
    res.checks.push_back(bound_check("regularized_selfduality_closed", worst_closed, 1e-8));
    res.checks.push_back(bound_check("regularized_selfduality_tabulated", worst_tab, 1e-6));
  }
  return res;
}

namespace {

SuiteResult boundary_checks() {
  SuiteResult res;
  res.suite = "boundary";
  Rng rng(404);
  const Eigen::Index dim = 6;

  struct KindCase {
    std::string name;
    BoundaryLagrangian ell;
    std::function<VectorXd(const VectorXd&)> satisfy;  // u0 from uT
  };
  const VectorXd x0 = rng.gaussian_vector(dim);
  std::vector<KindCase> kinds;
  kinds.push_back({"initial_value", BoundaryLagrangian::initial_value(x0),
                   [&](const VectorXd&) { return x0; }});
  kinds.push_back({"periodic", BoundaryLagrangian::periodic(dim),
                   [](const VectorXd& uT) { return uT; }});
  kinds.push_back({"anti_periodic", BoundaryLagrangian::anti_periodic(),
                   [](const VectorXd& uT) { return VectorXd(-uT); }});
  kinds.push_back({"alpha_periodic", BoundaryLagrangian::alpha_periodic_lambda(3.0),
                   [](const VectorXd& uT) { return VectorXd(0.5 * uT); }});

  for (const auto& kc : kinds) {
    double worst_sat = 0.0;
    double worst_violation_ratio = HUGE_VAL;
    for (int s = 0; s < 100; ++s) {
      const VectorXd uT = rng.gaussian_vector(dim);
      const VectorXd u0 = kc.satisfy(uT);
      worst_sat = std::max(worst_sat, boundary_residual(kc.ell, u0, uT));

      const VectorXd dir = rng.gaussian_vector(dim).normalized();
      const double delta = rng.uniform(0.1, 1.0);
      const double r = boundary_residual(kc.ell, u0 + delta * dir, uT);
      worst_violation_ratio = std::min(worst_violation_ratio, r / delta);
    }
    res.checks.push_back(bound_check(kc.name + "/satisfied_residual", worst_sat, 1e-10));
    res.checks.push_back({kc.name + "/violation_detected", worst_violation_ratio >= 0.5,
                          "min residual/violation " + fmt(worst_violation_ratio)});
  }

  // alpha map: lambda in {1/3, 1, 3} -> alpha in {-1/2, 0, 1/2}.
  {
    double worst = 0.0;
    const double lams[3] = {1.0 / 3.0, 1.0, 3.0};
    const double alphas[3] = {-0.5, 0.0, 0.5};
    for (int i = 0; i < 3; ++i)
      worst = std::max(worst, std::abs(BoundaryLagrangian::alpha_periodic_lambda(lams[i]).alpha() -
                                       alphas[i]));
    res.checks.push_back(bound_check("alpha_map", worst, 1e-15));
  }

  // ell is an anti-selfdual Lagrangian on H x H and bounded below.
  {
    double worst_resid = 0.0, lowest = HUGE_VAL;
    for (const auto& kc : kinds) {
      std::vector<std::pair<VectorXd, VectorXd>> pairs;
      for (int s = 0; s < 100; ++s) {
        pairs.emplace_back(rng.gaussian_vector(dim), rng.gaussian_vector(dim));
        const ExtendedReal v =
            boundary_value(kc.ell, rng.gaussian_vector(dim), rng.gaussian_vector(dim));
        if (v.is_finite()) lowest = std::min(lowest, v.finite());
      }
      const AsdLagrangian asd = AsdLagrangian::potential(kc.ell.psi(dim));
      worst_resid = std::max(worst_resid, selfduality_residual(asd, pairs));
    }
    res.checks.push_back(bound_check("ell_selfduality", worst_resid, 1e-8));
    res.checks.push_back({"ell_bounded_below", lowest > -1e3,
                          "sampled minimum " + fmt(lowest)});
  }
  return res;
}

SuiteResult fields_checks() {
  SuiteResult res;
  res.suite = "fields";
  Rng rng(505);

  for (const int d : {2, 3}) {
    const int n = 8;
    auto grid = TorusGrid::make(d, n, 0.1);
    const std::string tag = "d" + std::to_string(d);

    // Projection properties.
    double idem = 0.0, grad_kill = 0.0, ortho = 0.0;
    for (int s = 0; s < 20; ++s) {
      SpectralField raw(grid);
      for (Eigen::Index i = 0; i < raw.coeff.size(); ++i)
        raw.coeff[i] = {rng.gaussian(), rng.gaussian()};
      raw = dealias(symmetrize(raw));
      const SpectralField p1 = leray_project(raw);
      const SpectralField p2 = leray_project(p1);
      idem = std::max(idem, norm_h(p2 - p1) / std::max(1e-12, norm_h(p1)));

      // Gradient field: u^_j(k) = k_j s(k).
      SpectralField gradf(grid);
      for (Eigen::Index f = 0; f < grid->modes(); ++f) {
        const std::complex<double> s(rng.gaussian(), rng.gaussian());
        for (int j = 0; j < d; ++j)
          gradf.coeff[j * grid->modes() + f] = grid->kfreq[j][f] * s;
      }
      gradf = dealias(symmetrize(gradf));
      grad_kill = std::max(grad_kill,
                           norm_h(leray_project(gradf)) / std::max(1e-12, norm_h(gradf)));
      ortho = std::max(ortho, std::abs(inner_h(p1, gradf)) /
                                  std::max(1e-12, norm_h(p1) * norm_h(gradf)));
    }
    res.checks.push_back(bound_check(tag + "/leray_idempotent", idem, 1e-14));
    res.checks.push_back(bound_check(tag + "/leray_kills_gradients", grad_kill, 1e-12));
    res.checks.push_back(bound_check(tag + "/projection_orthogonality", ortho, 1e-12));

    // Advection: skewness, invariants, convolution oracle.
    double skew = 0.0, invariants = 0.0, conv = 0.0, parseval = 0.0;
    for (int s = 0; s < 12; ++s) {
      const SpectralField u = random_divfree(grid, rng, grid->kmax, 1.0 + rng.uniform());
      const SpectralField a = advection(u);
      const double scale = norm_h(u) * norm_x(u) * norm_x(u);
      skew = std::max(skew, std::abs(inner_h(a, u)) / std::max(1e-12, scale));
      invariants = std::max(invariants, field_invariant_violation(a));
      conv = std::max(conv, norm_h(a - advection_by_convolution(u)) /
                                std::max(1e-12, norm_h(a)));

      // Parseval: physical quadrature of <u,v>_H vs the spectral sum.
      const SpectralField v = random_divfree(grid, rng, grid->kmax, 1.0);
      double phys = 0.0;
      for (int j = 0; j < d; ++j)
        phys += (to_physical_component(u, j).real() * to_physical_component(v, j).real())
                    .mean();
      parseval = std::max(parseval, std::abs(phys - inner_h(u, v)) /
                                        std::max(1e-12, norm_h(u) * norm_h(v)));
    }
    res.checks.push_back(bound_check(tag + "/advection_skew", skew, 1e-10));
    res.checks.push_back(bound_check(tag + "/advection_invariants", invariants, 1e-12));
    res.checks.push_back(bound_check(tag + "/advection_convolution_oracle", conv, 1e-12));
    res.checks.push_back(bound_check(tag + "/parseval", parseval, 1e-12));
  }

  // Duality map and Stokes inverse identities.
  {
    auto grid = TorusGrid::make(2, 32, 0.1);
    double jid1 = 0.0, jid2 = 0.0, inv = 0.0, normid = 0.0;
    for (int s = 0; s < 100; ++s) {
      const SpectralField u = random_divfree(grid, rng, grid->kmax, 1.0);
      const SpectralField ju = duality_map(u);
      const double nx = norm_x(u);
      jid1 = std::max(jid1, std::abs(inner_h(ju, u) - nx * nx) / (nx * nx));
      jid2 = std::max(jid2, std::abs(norm_xstar(ju) - nx) / nx);
      inv = std::max(inv, norm_h(stokes_inverse(ju) - u) / norm_h(u));
      const double xs = norm_xstar(ju);
      normid = std::max(normid,
                        std::abs(inner_h(stokes_inverse(ju), ju) - xs * xs) / (xs * xs));
    }
    res.checks.push_back(bound_check("duality_pairing", jid1, 1e-12));
    res.checks.push_back(bound_check("duality_norm", jid2, 1e-12));
    res.checks.push_back(bound_check("stokes_inverse_pair", inv, 1e-14));
    res.checks.push_back(bound_check("xstar_norm_identity", normid, 1e-12));
  }

  // Named fields: shear and Taylor-Green self-advection.
  {
    auto grid = TorusGrid::make(2, 32, 0.1);
    const SpectralField sh = shear_mode(grid, 1.3);
    const SpectralField tg = taylor_green(grid, 1.0);
    res.checks.push_back(bound_check("shear_advection_zero", norm_h(advection(sh)), 1e-12));
    res.checks.push_back(bound_check("taylor_green_projects_zero", norm_h(advection(tg)), 1e-12));

    // The unprojected Taylor-Green nonlinear term is the gradient field
    // (sin 2x, sin 2y)/2; check the pseudo-spectral product against the
    // analytic coefficients sampled by direct quadrature.
    double worst_tg = 0.0;
    {
      const Eigen::Index m = grid->modes();
      std::vector<Eigen::ArrayXcd> nl(2, Eigen::ArrayXcd::Zero(m));
      const double h = 2.0 * M_PI / grid->n;
      for (Eigen::Index f = 0; f < m; ++f) {
        const int i1 = static_cast<int>(f) / grid->n;
        const int i2 = static_cast<int>(f) % grid->n;
        nl[0][f] = 0.5 * std::sin(2.0 * h * i1);
        nl[1][f] = 0.5 * std::sin(2.0 * h * i2);
      }
      const SpectralField analytic = dealias(from_physical(grid, nl));

      std::vector<Eigen::ArrayXcd> acc2(2, Eigen::ArrayXcd::Zero(m));
      for (int j = 0; j < 2; ++j)
        for (int l = 0; l < 2; ++l) {
          SpectralField der(grid);
          der.coeff.segment(j * m, m) =
              tg.coeff.segment(j * m, m) *
              (std::complex<double>(0, 1) * grid->kfreq[l].cast<std::complex<double>>());
          const Eigen::ArrayXcd derphys = to_physical_component(der, j);
          acc2[j] += (to_physical_component(tg, l).real() * derphys.real())
                         .cast<std::complex<double>>();
        }
      const SpectralField nlterm = dealias(from_physical(grid, acc2));
      worst_tg = norm_h(nlterm - analytic) / std::max(1e-12, norm_h(analytic));
    }
    res.checks.push_back(bound_check("taylor_green_nonlinear_term", worst_tg, 1e-12));

    // Regularity ratio: finite on random fields, resolution independent.
    auto grid64 = TorusGrid::make(2, 64, 0.1);
    double rmax = 0.0, res_dep = 0.0;
    for (int s = 0; s < 100; ++s) {
      const SpectralField u = random_divfree(grid, rng, 5, 1.0);
      rmax = std::max(rmax, regularity_ratio(u));
    }
    for (int s = 0; s < 5; ++s) {
      Rng r2(900 + s);
      Rng r3(900 + s);
      const SpectralField u32 = random_divfree(grid, r2, 5, 1.0);
      const SpectralField u64 = random_divfree(grid64, r3, 5, 1.0);
      res_dep = std::max(res_dep, std::abs(regularity_ratio(u32) - regularity_ratio(u64)) /
                                      regularity_ratio(u32));
    }
    res.checks.push_back({"regularity_ratio_finite", std::isfinite(rmax) && rmax > 0.0,
                          "empirical constant c ~ " + fmt(rmax)});
    res.checks.push_back(bound_check("regularity_resolution_independent", res_dep, 0.05));
  }
  return res;
}

SuiteResult gradients_checks() {
  SuiteResult res;
  res.suite = "gradients";
  Rng rng(606);
  auto grid2 = TorusGrid::make(2, 8, 0.15);
  auto grid3 = TorusGrid::make(3, 8, 0.2);

  auto random_path = [&](const GridPtr& g, int N) {
    Path p(g, 1.0, N);
    for (auto& node : p.nodes) node = random_divfree(g, rng, g->kmax, 0.7);
    return p;
  };

  {
    const SpectralField x0 = random_divfree(grid2, rng, 2, 1.0);
    DiscreteFunctional F = DiscreteFunctional::make(
        grid2, 1.0, 4, BoundaryLagrangian::initial_value(flatten(x0)),
        {random_divfree(grid2, rng, 2, 0.3)}, 0.0, /*use_advection=*/false);
    res.checks.push_back(
        bound_check("quadratic_only_audit", fd_gradient_audit(F, random_path(grid2, 4), 8), 1e-8));
  }
  {
    const SpectralField x0 = random_divfree(grid2, rng, 2, 1.0);
    DiscreteFunctional F = DiscreteFunctional::make(
        grid2, 1.0, 4, BoundaryLagrangian::initial_value(flatten(x0)),
        {random_divfree(grid2, rng, 2, 0.3)});
    res.checks.push_back(
        bound_check("full_2d_audit", fd_gradient_audit(F, random_path(grid2, 4), 8), 1e-5));
  }
  {
    DiscreteFunctional F = DiscreteFunctional::make(
        grid2, 1.0, 4, BoundaryLagrangian::alpha_periodic_alpha(0.5),
        {random_divfree(grid2, rng, 2, 0.3)});
    res.checks.push_back(bound_check("alpha_periodic_audit",
                                     fd_gradient_audit(F, random_path(grid2, 4), 8), 1e-5));
  }
  {
    DiscreteFunctional F = DiscreteFunctional::make(
        grid2, 1.0, 4, BoundaryLagrangian::anti_periodic(),
        {random_divfree(grid2, rng, 2, 0.3)});
    Path p = random_path(grid2, 4);
    p.nodes.back() = p.nodes.front();
    p.nodes.back() *= -1.0;
    res.checks.push_back(
        bound_check("anti_periodic_aliased_audit", fd_gradient_audit(F, p, 8), 1e-5));
  }
  {
    const SpectralField x0 = random_divfree(grid3, rng, 2, 1.0);
    DiscreteFunctional F = DiscreteFunctional::make(
        grid3, 1.0, 4, BoundaryLagrangian::initial_value(flatten(x0)),
        {random_divfree(grid3, rng, 2, 0.3)}, /*eps=*/1e-2);
    res.checks.push_back(
        bound_check("regularized_3d_audit", fd_gradient_audit(F, random_path(grid3, 4), 8), 1e-5));
  }
  {
    // Stationary gradient by the same central-difference audit.
    const SpectralField ustar = random_divfree(grid2, rng, 2, 0.8);
    SpectralField f = duality_map(ustar);
    f *= grid2->nu;
    f.coeff += advection(ustar).coeff;
    f *= -1.0;
    const SpectralField u = random_divfree(grid2, rng, 2, 0.6);
    const SpectralField g = stationary_gradient(grid2, f, u);
    double worst = 0.0;
    for (int s = 0; s < 8; ++s) {
      SpectralField dir = random_divfree(grid2, rng, grid2->kmax, 1.0);
      const double h = 1e-5;
      SpectralField up = u, um = u;
      up.coeff += h * dir.coeff;
      um.coeff -= h * dir.coeff;
      const double fd = (stationary_functional(grid2, f, up).total.finite() -
                         stationary_functional(grid2, f, um).total.finite()) /
                        (2.0 * h);
      const double an = inner_h(g, dir);
      worst = std::max(worst, std::abs(fd - an) / std::max({std::abs(an), std::abs(fd), 1e-10}));
    }
    res.checks.push_back(bound_check("stationary_audit", worst, 1e-5));
  }
  return res;
}

SuiteResult refinement_checks() {
  SuiteResult res;
  res.suite = "refinement";
  auto grid = TorusGrid::make(2, 16, 0.1);
  const SpectralField u0 = shear_mode(grid, 1.0);

  // total(N) on the analytic decay path.
  {
    std::vector<double> totals;
    for (const int N : {8, 16, 32, 64}) {
      DiscreteFunctional F = DiscreteFunctional::make(
          grid, 1.0, N, BoundaryLagrangian::initial_value(flatten(u0)), {});
      totals.push_back(functional_value(F, heat_decay_path(grid, u0, 1.0, N)).total.finite());
    }
    double min_order = HUGE_VAL;
    for (std::size_t i = 0; i + 1 < totals.size(); ++i)
      min_order = std::min(min_order, std::log2(totals[i] / totals[i + 1]));
    res.checks.push_back({"functional_refinement_order", min_order >= 1.9,
                          "observed order " + fmt(min_order)});
  }

  // Energy-identity residual on the analytic path.
  {
    std::vector<double> resids;
    for (const int N : {8, 16, 32, 64}) {
      DiscreteFunctional F = DiscreteFunctional::make(
          grid, 1.0, N, BoundaryLagrangian::initial_value(flatten(u0)), {});
      resids.push_back(energy_identity_residual(F, heat_decay_path(grid, u0, 1.0, N)));
    }
    double min_ratio = HUGE_VAL;
    for (std::size_t i = 0; i + 1 < resids.size(); ++i)
      min_ratio = std::min(min_ratio, resids[i] / resids[i + 1]);
    res.checks.push_back({"energy_residual_refinement", min_ratio >= 3.5,
                          "min halving ratio " + fmt(min_ratio)});
  }

  // Crank-Nicolson stepper order on the decaying Taylor-Green solution.
  {
    auto g32 = TorusGrid::make(2, 16, 0.25);
    const SpectralField tg = taylor_green(g32, 1.0);
    std::vector<double> errs;
    for (const int N : {16, 32, 64}) {
      StepperConfig sc;
      sc.dt = 1.0 / N;
      sc.steps = N;
      const Path got = solve_ivp(sc, tg, 1.0);
      const Path exact = heat_decay_path(g32, tg, 1.0, N);
      errs.push_back(compare_paths(got, exact));
    }
    double min_order = HUGE_VAL;
    for (std::size_t i = 0; i + 1 < errs.size(); ++i)
      min_order = std::min(min_order, std::log2(errs[i] / errs[i + 1]));
    res.checks.push_back({"stepper_order", min_order >= 1.9,
                          "observed order " + fmt(min_order)});
  }
  return res;
}

}  // namespace

SpectralField advection_by_convolution(const SpectralField& u) {
  const auto& g = *u.grid;
  const Eigen::Index m = g.modes();

  // Band mode list and a lookup from wrapped index vectors to flat indices.
  std::vector<Eigen::Index> band;
  for (Eigen::Index f = 0; f < m; ++f)
    if (g.keep[f] == 1.0) band.push_back(f);

  auto flat_of = [&](const std::array<int, 3>& k) -> Eigen::Index {
    Eigen::Index flat = 0;
    for (int a = 0; a < g.d; ++a) {
      int idx = k[a] >= 0 ? k[a] : k[a] + g.n;
      flat = flat * g.n + idx;
    }
    return flat;
  };

  SpectralField out(u.grid);
  for (const Eigen::Index fk : band) {
    std::array<int, 3> kk{0, 0, 0};
    for (int a = 0; a < g.d; ++a) kk[a] = static_cast<int>(g.kfreq[a][fk]);
    for (const Eigen::Index fp : band) {
      std::array<int, 3> kq{0, 0, 0};
      bool inband = true;
      for (int a = 0; a < g.d; ++a) {
        kq[a] = kk[a] - static_cast<int>(g.kfreq[a][fp]);
        if (std::abs(kq[a]) > g.kmax) inband = false;
      }
      if (!inband) continue;
      const Eigen::Index fq = flat_of(kq);
      for (int j = 0; j < g.d; ++j) {
        std::complex<double> sum(0.0, 0.0);
        for (int l = 0; l < g.d; ++l)
          sum += u.coeff[l * m + fp] * std::complex<double>(0.0, kq[l]) * u.coeff[j * m + fq];
        out.coeff[j * m + fk] += sum;
      }
    }
  }
  return leray_project(dealias(out));
}

std::vector<std::string> suite_names() {
  return {"duality", "boundary", "fields", "gradients", "refinement"};
}

SuiteResult run_suite(const std::string& name) {
  if (name == "duality") {
    SuiteResult a = asd_battery_checks();
    const SuiteResult b = lemma_regularization_checks();
    a.suite = "duality";
    a.checks.insert(a.checks.end(), b.checks.begin(), b.checks.end());
    return a;
  }
  if (name == "boundary") return boundary_checks();
  if (name == "fields") return fields_checks();
  if (name == "gradients") return gradients_checks();
  if (name == "refinement") return refinement_checks();
  throw std::invalid_argument("unknown verification suite: " + name);
}

}  // namespace selfdual
