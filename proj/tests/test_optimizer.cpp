#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "selfdual/optimizer.hpp"
#include "selfdual/stepper.hpp"

using namespace selfdual;

TEST_CASE("already-optimal input terminates in zero iterations") {
  auto grid = TorusGrid::make(2, 8, 0.1);
  DiscreteFunctional F =
      DiscreteFunctional::make(grid, 1.0, 4, BoundaryLagrangian::anti_periodic(), {});
  SolveOptions opts;
  opts.value_tol = 1e-12;
  const auto [path, trace] = minimize(F, Path(grid, 1.0, 4), opts);
  CHECK(trace.termination == Termination::ValueCertified);
  CHECK(trace.iterations.size() == 1);  // the certificate held at entry
  CHECK(trace.final_total == 0.0);
  for (const auto& node : path.nodes) CHECK(norm_h(node) == 0.0);
}

TEST_CASE("Stokes decay: certified minimum matching the analytic trajectory") {
  auto grid = TorusGrid::make(2, 16, 0.1);
  const SpectralField u0 = taylor_green(grid, 1.0);
  DiscreteFunctional F = DiscreteFunctional::make(
      grid, 1.0, 32, BoundaryLagrangian::initial_value(flatten(u0)), {});
  SolveOptions opts;
  opts.value_tol = 1e-10;
  opts.max_iters = 500;
  const auto [path, trace] = minimize(F, default_initial_path(F), opts);
  CHECK(trace.termination == Termination::ValueCertified);
  CHECK(trace.final_total <= 1e-10);
  CHECK(static_cast<int>(trace.iterations.size()) < 300);
  const Path analytic = heat_decay_path(grid, u0, 1.0, 32);
  CHECK(compare_paths(path, analytic) <= 1e-4);

  // Monotone decrease along accepted iterates.
  for (std::size_t i = 1; i < trace.iterations.size(); ++i)
    CHECK(trace.iterations[i].total <= trace.iterations[i - 1].total + 1e-15);

  // Certified value bounds every weighted node gap.
  const FunctionalReport rep = functional_value(F, path);
  for (int i = 0; i < F.N; ++i)
    CHECK(F.dt() * rep.node_gap[i] <= opts.value_tol * trace.scale + 1e-15);
}

TEST_CASE("periodic orbit via the aliased parameterization") {
  auto grid = TorusGrid::make(2, 8, 0.25);
  Rng rng(3);
  DiscreteFunctional F = DiscreteFunctional::make(
      grid, 1.0, 8, BoundaryLagrangian::periodic(2 * grid->d * grid->modes()),
      {random_divfree(grid, rng, 2, 0.2)});
  SolveOptions opts;
  opts.value_tol = 1e-10;
  opts.max_iters = 2000;
  const auto [path, trace] = minimize(F, Path(grid, 1.0, 8), opts);
  CHECK(trace.termination == Termination::ValueCertified);
  CHECK(norm_h(path.nodes.front() - path.nodes.back()) == 0.0);  // structural
  CHECK(norm_h(path.nodes.front()) > 1e-4);  // forced orbit is nontrivial
}

TEST_CASE("certificate scale follows the data") {
  auto grid = TorusGrid::make(2, 8, 0.2);
  const SpectralField u0 = taylor_green(grid, 3.0);  // |u0|_H^2 = 4.5
  DiscreteFunctional F = DiscreteFunctional::make(
      grid, 0.5, 4, BoundaryLagrangian::initial_value(flatten(u0)), {});
  SolveOptions opts;
  opts.value_tol = 1e-9;
  opts.max_iters = 400;
  const auto [path, trace] = minimize(F, default_initial_path(F), opts);
  const double h = norm_h(u0);
  CHECK(trace.scale == doctest::Approx(h * h).epsilon(1e-12));
  CHECK(trace.termination == Termination::ValueCertified);
  CHECK(trace.final_total <= opts.value_tol * trace.scale);
}

TEST_CASE("finite-difference audits across configurations") {
  Rng rng(5);
  auto grid2 = TorusGrid::make(2, 8, 0.15);
  const SpectralField x0 = random_divfree(grid2, rng, 2, 1.0);
  DiscreteFunctional F2 = DiscreteFunctional::make(
      grid2, 1.0, 4, BoundaryLagrangian::initial_value(flatten(x0)),
      {random_divfree(grid2, rng, 2, 0.3)});
  Path p2(grid2, 1.0, 4);
  for (auto& nd : p2.nodes) nd = random_divfree(grid2, rng, grid2->kmax, 0.7);
  CHECK(fd_gradient_audit(F2, p2, 8) < 1e-5);

  // Quadratic-only configuration is exact to FD noise.
  DiscreteFunctional Fq = DiscreteFunctional::make(
      grid2, 1.0, 4, BoundaryLagrangian::initial_value(flatten(x0)), {}, 0.0, false);
  CHECK(fd_gradient_audit(Fq, p2, 8) < 1e-8);

  auto grid3 = TorusGrid::make(3, 8, 0.2);
  DiscreteFunctional F3 = DiscreteFunctional::make(
      grid3, 1.0, 4,
      BoundaryLagrangian::initial_value(flatten(random_divfree(grid3, rng, 2, 1.0))),
      {random_divfree(grid3, rng, 2, 0.3)}, /*eps=*/1e-2);
  Path p3(grid3, 1.0, 4);
  for (auto& nd : p3.nodes) nd = random_divfree(grid3, rng, grid3->kmax, 0.6);
  CHECK(fd_gradient_audit(F3, p3, 8) < 1e-5);
}

TEST_CASE("continuation schedule drives the quartic term down with warm starts") {
  auto grid = TorusGrid::make(3, 8, 0.2);
  Rng rng(7);
  const SpectralField u0 = taylor_green(grid, 1.0);
  DiscreteFunctional F = DiscreteFunctional::make(
      grid, 0.5, 4, BoundaryLagrangian::initial_value(flatten(u0)),
      {random_divfree(grid, rng, 2, 0.1)}, 1e-3);
  SolveOptions opts;
  opts.value_tol = 1e-10;
  opts.max_iters = 1500;
  opts.continuation = {1e-1, 1e-2, 1e-3};
  const auto [path, trace] = minimize(F, default_initial_path(F), opts);
  CHECK(trace.termination == Termination::ValueCertified);
  // Unregularized value stays within the quartic perturbation scale.
  const double total0 = functional_value(F.with_eps(0.0), path).total.finite();
  CHECK(total0 >= -1e-12);
  CHECK(total0 <= 1e-4);
}

TEST_CASE("max_iters termination keeps the best iterate and flags the trace") {
  auto grid = TorusGrid::make(2, 8, 0.1);
  const SpectralField u0 = taylor_green(grid, 1.0);
  DiscreteFunctional F = DiscreteFunctional::make(
      grid, 1.0, 4, BoundaryLagrangian::initial_value(flatten(u0)), {});
  SolveOptions opts;
  opts.value_tol = 1e-30;  // unattainable: rounding floor sits far above this
  opts.max_iters = 15;
  const auto [path, trace] = minimize(F, default_initial_path(F), opts);
  CHECK(trace.termination == Termination::MaxIters);
  CHECK(trace.final_total <= trace.iterations.front().total);
}

TEST_CASE("stationary solve recovers a manufactured steady state") {
  auto grid = TorusGrid::make(2, 16, 0.1);
  Rng rng(11);
  // Amplitude chosen inside the small-data uniqueness regime, where descent
  // from rest lands on the manufactured branch.
  const SpectralField ustar = random_divfree(grid, rng, 2, 0.4);
  SpectralField f = duality_map(ustar);
  f *= grid->nu;
  f.coeff += advection(ustar).coeff;
  f *= -1.0;
  SolveOptions opts;
  opts.value_tol = 1e-13;
  opts.max_iters = 2000;
  const auto [u, trace] = minimize_stationary(grid, f, SpectralField(grid), opts);
  CHECK(trace.termination == Termination::ValueCertified);
  CHECK(norm_h(u - ustar) <= 1e-5 * norm_h(ustar));
}

TEST_CASE("trace CSV export") {
  namespace fs = std::filesystem;
  SolveTrace t;
  t.iterations = {{1.0, 0.5, 0.0}, {0.25, 0.1, 1.0}};
  const std::string file =
      (fs::temp_directory_path() / "selfdual_trace_test.csv").string();
  write_trace_csv(file, t);
  std::ifstream in(file);
  std::string header;
  std::getline(in, header);
  CHECK(header == "iter,total,grad_norm,step");
  int rows = 0;
  for (std::string line; std::getline(in, line);)
    if (!line.empty()) ++rows;
  CHECK(rows == 2);
}

TEST_CASE("option validation") {
  SolveOptions opts;
  opts.value_tol = 0.0;
  CHECK_THROWS_AS(opts.validate(), std::invalid_argument);
  opts = SolveOptions{};
  opts.max_iters = 0;
  CHECK_THROWS_AS(opts.validate(), std::invalid_argument);
  opts = SolveOptions{};
  opts.ls_shrink = 1.0;
  CHECK_THROWS_AS(opts.validate(), std::invalid_argument);
}
