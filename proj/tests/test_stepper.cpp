#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "selfdual/stepper.hpp"

using namespace selfdual;

TEST_CASE("single CN step reproduces the decay factor to third order") {
  auto grid = TorusGrid::make(2, 16, 0.25);
  const SpectralField tg = taylor_green(grid, 1.0);  // |k|^2 = 2 modes
  const double a = 2.0 * grid->nu;
  for (const double dt : {0.05, 0.025, 0.0125}) {
    StepperConfig cfg;
    cfg.dt = dt;
    cfg.steps = 1;
    const SpectralField next = step(cfg, tg, 0.0);
    SpectralField exact = tg;
    exact *= std::exp(-a * dt);
    // Midpoint amplification error is (a dt)^3/12 per step.
    CHECK(norm_h(next - exact) <= 0.2 * std::pow(a * dt, 3) * norm_h(tg));
    CHECK(field_invariant_violation(next) <= 1e-12);
  }

  // Zero state with zero forcing stays zero.
  StepperConfig cfg;
  cfg.dt = 0.1;
  CHECK(norm_h(step(cfg, SpectralField(grid), 0.0)) == 0.0);
}

TEST_CASE("global second order on the decaying vortex") {
  auto grid = TorusGrid::make(2, 16, 0.25);
  const SpectralField tg = taylor_green(grid, 1.0);
  std::vector<double> errs;
  for (const int N : {16, 32, 64}) {
    StepperConfig cfg;
    cfg.dt = 1.0 / N;
    cfg.steps = N;
    errs.push_back(compare_paths(solve_ivp(cfg, tg, 1.0), heat_decay_path(grid, tg, 1.0, N)));
  }
  CHECK(errs[0] / errs[1] >= 3.5);
  CHECK(errs[1] / errs[2] >= 3.5);

  // Fine-step solve lands within 1e-6 of the analytic endpoint.
  StepperConfig cfg;
  cfg.dt = 1.0 / 256;
  cfg.steps = 256;
  const Path p = solve_ivp(cfg, tg, 1.0);
  SpectralField exact = tg;
  exact *= std::exp(-2.0 * grid->nu);
  CHECK(norm_h(p.nodes.back() - exact) <= 1e-6);
}

TEST_CASE("imex scheme is stable and first-order consistent") {
  auto grid = TorusGrid::make(2, 16, 0.3);
  const SpectralField tg = taylor_green(grid, 1.0);
  std::vector<double> errs;
  for (const int N : {32, 64}) {
    StepperConfig cfg;
    cfg.scheme = StepperConfig::Scheme::ImexEuler;
    cfg.dt = 1.0 / N;
    cfg.steps = N;
    errs.push_back(compare_paths(solve_ivp(cfg, tg, 1.0), heat_decay_path(grid, tg, 1.0, N)));
  }
  CHECK(errs[0] / errs[1] >= 1.7);  // order ~1
}

TEST_CASE("forced stepping preserves the field invariants") {
  auto grid = TorusGrid::make(2, 16, 0.1);
  Rng rng(5);
  StepperConfig cfg;
  cfg.dt = 1.0 / 32;
  cfg.steps = 32;
  cfg.forcing = random_divfree(grid, rng, 3, 0.2);
  const Path p = solve_ivp(cfg, taylor_green(grid, 1.0), 1.0);
  for (const auto& node : p.nodes) CHECK(field_invariant_violation(node) <= 1e-11);
}

TEST_CASE("path comparison semantics") {
  auto grid = TorusGrid::make(2, 8, 0.1);
  Rng rng(7);
  Path a(grid, 1.0, 4), b(grid, 1.0, 4);
  for (int i = 0; i <= 4; ++i) {
    a.nodes[i] = random_divfree(grid, rng, 2, 1.0);
    b.nodes[i] = a.nodes[i];
  }
  CHECK(compare_paths(a, b) == 0.0);

  // Perturb one node by a known amount.
  const SpectralField delta = random_divfree(grid, rng, 2, 0.25);
  a.nodes[2].coeff += delta.coeff;
  const double expected = norm_h(delta) / std::max(1.0, norm_h(b.nodes[2]));
  CHECK(compare_paths(a, b) == doctest::Approx(expected).epsilon(1e-12));

  Path c(grid, 1.0, 3);
  CHECK_THROWS_AS(compare_paths(a, c), std::invalid_argument);
}

TEST_CASE("ivp guards and Picard failure") {
  auto grid = TorusGrid::make(2, 16, 0.05);
  const SpectralField tg = taylor_green(grid, 1.0);
  StepperConfig cfg;
  cfg.dt = 0.1;
  cfg.steps = 5;
  CHECK_THROWS_AS(solve_ivp(cfg, tg, 1.0), std::invalid_argument);

  // A huge step with a strong field defeats the Picard contraction.
  StepperConfig wild;
  wild.dt = 50.0;
  wild.picard_max = 8;
  const SpectralField big = taylor_green(grid, 40.0);
  SpectralField spun = big;
  {
    Rng rng(9);
    spun.coeff += random_divfree(grid, rng, 3, 25.0).coeff;
  }
  CHECK_THROWS_AS(step(wild, spun, 0.0), picard_divergence);
}
