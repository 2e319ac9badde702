// Acceptance suite: one pass/fail line per criterion, with the stated
// tolerances pinned in code. Exit status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "selfdual/lagrangian.hpp"
#include "selfdual/optimizer.hpp"
#include "selfdual/stepper.hpp"
#include "selfdual/verify.hpp"

using namespace selfdual;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void report(int criterion, const std::string& what, bool pass, const std::string& detail,
            double elapsed, double budget) {
  const bool in_budget = budget <= 0.0 || elapsed <= budget;
  if (!pass || !in_budget) ++failures;
  std::printf("[%s] criterion %2d: %s (%s; %.1fs", (pass && in_budget) ? "PASS" : "FAIL",
              criterion, what.c_str(), detail.c_str(), elapsed);
  if (budget > 0.0) std::printf(" of %.0fs budget", budget);
  std::printf(")\n");
  std::fflush(stdout);
}

std::string suite_summary(const SuiteResult& r) {
  int failed = 0;
  std::string first;
  for (const auto& c : r.checks)
    if (!c.pass) {
      ++failed;
      if (first.empty()) first = c.name;
    }
  if (failed == 0) return std::to_string(r.checks.size()) + " checks passed";
  return std::to_string(failed) + " of " + std::to_string(r.checks.size()) +
         " checks failed, first: " + first;
}

SpectralField small_forcing(const GridPtr& grid, std::uint64_t seed, double amplitude) {
  Rng rng(seed);
  return random_divfree(grid, rng, 3, amplitude);
}

}  // namespace

int main() {
  // 1. Selfduality and Fenchel battery.
  {
    const auto t0 = Clock::now();
    const SuiteResult r = asd_battery_checks();
    report(1, "selfduality & Fenchel battery", r.all_pass(), suite_summary(r),
           seconds_since(t0), 10.0);
  }

  // 2. Regularization identities and the oplus grid checks.
  {
    const auto t0 = Clock::now();
    const SuiteResult r = lemma_regularization_checks();
    report(2, "regularization identities", r.all_pass(), suite_summary(r), seconds_since(t0),
           30.0);
  }

  // 3. Boundary catalog.
  {
    const auto t0 = Clock::now();
    const SuiteResult r = run_suite("boundary");
    report(3, "boundary catalog", r.all_pass(), suite_summary(r), seconds_since(t0), 0.0);
  }

  // 4. Gradient audit.
  {
    const auto t0 = Clock::now();
    const SuiteResult r = run_suite("gradients");
    report(4, "analytic vs finite-difference gradients", r.all_pass(), suite_summary(r),
           seconds_since(t0), 60.0);
  }

  // 5. Stokes-exact convergence at n = 32.
  {
    const auto t0 = Clock::now();
    auto grid = TorusGrid::make(2, 32, 0.1);
    const SpectralField u0 = taylor_green(grid, 1.0);

    double min_order = 1e300;
    {
      double prev = -1.0;
      for (const int N : {8, 16, 32, 64}) {
        DiscreteFunctional F = DiscreteFunctional::make(
            grid, 1.0, N, BoundaryLagrangian::initial_value(flatten(u0)), {});
        const double total =
            functional_value(F, heat_decay_path(grid, u0, 1.0, N)).total.finite();
        if (prev > 0.0) min_order = std::min(min_order, std::log2(prev / total));
        prev = total;
      }
    }

    DiscreteFunctional F = DiscreteFunctional::make(
        grid, 1.0, 64, BoundaryLagrangian::initial_value(flatten(u0)), {});
    SolveOptions opts;
    opts.value_tol = 1e-12;
    opts.max_iters = 3000;
    const auto [path, trace] = minimize(F, default_initial_path(F), opts);
    const double total = trace.final_total;
    const double agree = compare_paths(path, heat_decay_path(grid, u0, 1.0, 64));

    const bool pass = total <= 1e-6 && min_order >= 1.9 && agree <= 1e-5;
    char buf[160];
    std::snprintf(buf, sizeof buf, "total %.2e, refinement order %.2f, analytic match %.2e",
                  total, min_order, agree);
    report(5, "Stokes-exact convergence", pass, buf, seconds_since(t0), 120.0);
  }

  // 6. 2D Navier-Stokes with certified vanishing infimum.
  {
    const auto t0 = Clock::now();
    auto grid = TorusGrid::make(2, 32, 0.1);
    const SpectralField u0 = taylor_green(grid, 1.0);
    const SpectralField f = small_forcing(grid, 7, 0.1);
    DiscreteFunctional F = DiscreteFunctional::make(
        grid, 1.0, 64, BoundaryLagrangian::initial_value(flatten(u0)), {f});
    SolveOptions opts;
    opts.value_tol = 1e-8;
    opts.max_iters = 4000;
    const auto [path, trace] = minimize(F, default_initial_path(F), opts);

    const double scale = trace.scale;
    const double total = trace.final_total;
    const double h0 = norm_h(path.nodes.front());
    const double energy = energy_identity_residual(F, path);

    StepperConfig sc;
    sc.dt = 1.0 / 64;
    sc.steps = 64;
    sc.forcing = f;
    const double agree = compare_paths(path, solve_ivp(sc, u0, 1.0));

    const bool pass = trace.termination == Termination::ValueCertified &&
                      total <= 1e-6 * scale && energy <= 1e-4 * h0 * h0 && agree <= 5e-3;
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "total %.2e (scale %.2f), energy residual %.2e, oracle match %.2e, %zu iters",
                  total, scale, energy, agree, trace.iterations.size());
    report(6, "2D Navier-Stokes certified solve", pass, buf, seconds_since(t0), 600.0);
  }

  // 7. Orbit conditions: u(0) = 0.5 u(T) and u(0) = -u(T).
  {
    const auto t0 = Clock::now();
    auto grid = TorusGrid::make(2, 32, 0.1);
    const SpectralField f = small_forcing(grid, 7, 0.1);

    DiscreteFunctional Fa = DiscreteFunctional::make(
        grid, 1.0, 64, BoundaryLagrangian::alpha_periodic_alpha(0.5), {f});
    SolveOptions opts;
    opts.value_tol = 2e-13;
    opts.max_iters = 8000;
    const auto [pa, ta] = minimize(Fa, Path(grid, 1.0, 64), opts);
    const double uT = norm_h(pa.nodes.back());
    const double ares = norm_h(pa.nodes.front() - 0.5 * pa.nodes.back());

    DiscreteFunctional Fb = DiscreteFunctional::make(
        grid, 1.0, 64, BoundaryLagrangian::anti_periodic(), {f});
    const auto [pb, tb] = minimize(Fb, Path(grid, 1.0, 64), opts);
    const double bres = norm_h(pb.nodes.front() + pb.nodes.back());

    const bool pass = ta.termination == Termination::ValueCertified && ares <= 1e-5 * uT &&
                      tb.termination == Termination::ValueCertified &&
                      bres <= 1e-5 * std::max(1.0, norm_h(pb.nodes.front()));
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "|u0 - u_T/2| %.2e vs 1e-5*|u_T| %.2e; anti residual %.2e; %zu + %zu iters",
                  ares, 1e-5 * uT, bres, ta.iterations.size(), tb.iterations.size());
    report(7, "alpha-periodic and anti-periodic orbits", pass, buf, seconds_since(t0), 600.0);
  }

  // 8. Stationary 2D Navier-Stokes with manufactured forcing.
  {
    const auto t0 = Clock::now();
    auto grid = TorusGrid::make(2, 32, 0.1);
    Rng rng(7);
    const SpectralField ustar = random_divfree(grid, rng, 2, 0.4);
    SpectralField f = duality_map(ustar);
    f *= grid->nu;
    f.coeff += advection(ustar).coeff;
    f *= -1.0;
    SolveOptions opts;
    opts.value_tol = 3e-14;
    opts.max_iters = 3000;
    const auto [u, trace] = minimize_stationary(grid, f, SpectralField(grid), opts);
    const double total = trace.final_total;
    const double rel = norm_h(u - ustar) / norm_h(ustar);
    const bool pass = total <= 1e-6 && rel <= 1e-5;
    char buf[160];
    std::snprintf(buf, sizeof buf, "total %.2e, recovery %.2e, %zu iters", total, rel,
                  trace.iterations.size());
    report(8, "stationary manufactured solution", pass, buf, seconds_since(t0), 120.0);
  }

  // 9. 3D with the quartic continuation: honest report plus energy inequality.
  {
    const auto t0 = Clock::now();
    auto grid = TorusGrid::make(3, 8, 0.1);
    const SpectralField u0 = taylor_green(grid, 1.0);
    const SpectralField f = small_forcing(grid, 7, 0.05);
    DiscreteFunctional F = DiscreteFunctional::make(
        grid, 1.0, 16, BoundaryLagrangian::initial_value(flatten(u0)), {f}, 1e-3);
    SolveOptions opts;
    opts.value_tol = 1e-10;
    opts.max_iters = 4000;
    opts.continuation = {1e-1, 1e-2, 1e-3};
    const auto [path, trace] = minimize(F, default_initial_path(F), opts);

    const double scale = trace.scale;
    const double reported = functional_value(F.with_eps(0.0), path).total.finite();
    const double ineq = energy_inequality_check(F, path);
    const double h0 = norm_h(path.nodes.front());
    const bool pass = reported <= 1e-3 * scale && ineq <= 1e-3 * h0 * h0;
    char buf[160];
    std::snprintf(buf, sizeof buf, "reported I %.2e (scale %.2f), energy inequality %.2e",
                  reported, scale, ineq);
    report(9, "3D quartic continuation", pass, buf, seconds_since(t0), 600.0);
  }

  // 10. Negative control: a non-skew operator must be detected.
  {
    const auto t0 = Clock::now();
    Rng rng(77);
    Eigen::MatrixXd sym(2, 2);
    sym << 0.0, 1.0, 1.0, 0.0;
    const AsdLagrangian fake = AsdLagrangian::skew_potential(
        ConvexPotential::isotropic_quadratic(2, 1.0), sym);
    std::vector<std::pair<VectorXd, VectorXd>> samples;
    for (int s = 0; s < 100; ++s)
      samples.emplace_back(rng.gaussian_vector(2), rng.gaussian_vector(2));
    const double resid = selfduality_residual(fake, samples);
    char buf[80];
    std::snprintf(buf, sizeof buf, "residual %.3f", resid);
    report(10, "non-skew negative control", resid > 0.1, buf, seconds_since(t0), 0.0);
  }

  std::printf("%s (%d failed)\n", failures == 0 ? "ACCEPTANCE PASSED" : "ACCEPTANCE FAILED",
              failures);
  return failures;
}
