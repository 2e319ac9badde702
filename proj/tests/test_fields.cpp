#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "selfdual/field_io.hpp"
#include "selfdual/functional.hpp"
#include "selfdual/verify.hpp"

using namespace selfdual;

TEST_CASE("grid construction guards") {
  CHECK_THROWS_AS(TorusGrid::make(4, 16, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(TorusGrid::make(2, 12, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(TorusGrid::make(2, 4, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(TorusGrid::make(2, 16, 0.0), std::invalid_argument);
  auto g = TorusGrid::make(2, 32, 0.1);
  CHECK(g->kmax == 10);
  CHECK(g->modes() == 1024);
}

TEST_CASE("leray projector: gradients die, div-free fields are fixed points") {
  auto grid = TorusGrid::make(2, 16, 0.1);
  Rng rng(1);

  // Pure gradient field: u^(k) = k s(k).
  SpectralField gradf(grid);
  for (Eigen::Index f = 0; f < grid->modes(); ++f) {
    const std::complex<double> s(rng.gaussian(), rng.gaussian());
    for (int j = 0; j < 2; ++j) gradf.coeff[j * grid->modes() + f] = grid->kfreq[j][f] * s;
  }
  gradf = dealias(symmetrize(gradf));
  CHECK(norm_h(leray_project(gradf)) <= 1e-12 * norm_h(gradf));

  const SpectralField u = random_divfree(grid, rng, grid->kmax, 1.0);
  CHECK(norm_h(leray_project(u) - u) <= 1e-14 * norm_h(u));
  CHECK(field_invariant_violation(u) <= 1e-12);

  // Random raw input: projection orthogonal to every gradient field.
  SpectralField raw(grid);
  for (Eigen::Index i = 0; i < raw.coeff.size(); ++i)
    raw.coeff[i] = {rng.gaussian(), rng.gaussian()};
  raw = dealias(symmetrize(raw));
  const SpectralField pr = leray_project(raw);
  CHECK(std::abs(inner_h(pr, gradf)) <= 1e-12 * norm_h(pr) * norm_h(gradf));
}

TEST_CASE("advection: analytic cases and the convolution oracle") {
  auto grid = TorusGrid::make(2, 32, 0.1);

  // Unidirectional shear: (u.grad)u = 0 identically.
  CHECK(norm_h(advection(shear_mode(grid, 1.5))) <= 1e-12);

  // Taylor-Green: the nonlinear term is a pure gradient, so it projects away.
  const SpectralField tg = taylor_green(grid, 1.0);
  CHECK(norm_h(advection(tg)) <= 1e-12);

  // Oracle: direct spectral convolution without FFT, at n = 8, both dims.
  for (const int d : {2, 3}) {
    auto g8 = TorusGrid::make(d, 8, 0.1);
    Rng rng(40 + d);
    for (int s = 0; s < 10; ++s) {
      const SpectralField u = random_divfree(g8, rng, g8->kmax, 1.0 + rng.uniform());
      const SpectralField fast = advection(u);
      const SpectralField slow = advection_by_convolution(u);
      CHECK(norm_h(fast - slow) <= 1e-12 * std::max(1.0, norm_h(fast)));
      // Skew pairing bound from the dealiased product.
      CHECK(std::abs(inner_h(fast, u)) <=
            1e-10 * std::max(1e-12, norm_h(u) * norm_x(u) * norm_x(u)));
      CHECK(field_invariant_violation(fast) <= 1e-12);
    }
  }
}

TEST_CASE("advection adjoint is the exact discrete adjoint") {
  for (const int d : {2, 3}) {
    auto grid = TorusGrid::make(d, 8, 0.1);
    Rng rng(50 + d);
    for (int s = 0; s < 10; ++s) {
      const SpectralField u = random_divfree(grid, rng, grid->kmax, 1.0);
      const SpectralField delta = random_divfree(grid, rng, grid->kmax, 1.0);
      const SpectralField w = random_divfree(grid, rng, grid->kmax, 1.0);
      // <w, dLambda(u)[delta]> by finite differences of the forward map.
      const double h = 1e-6;
      SpectralField up = u, um = u;
      up.coeff += h * delta.coeff;
      um.coeff -= h * delta.coeff;
      const double lhs = inner_h(w, (1.0 / (2.0 * h)) * (advection(up) - advection(um)));
      const double rhs = inner_h(advection_adjoint(u, w), delta);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-6));
    }
  }
}

TEST_CASE("duality map and Stokes inverse identities") {
  auto grid = TorusGrid::make(2, 32, 0.1);
  Rng rng(7);

  // Single mode |k| = 1: J u = u.
  const SpectralField sh = shear_mode(grid, 2.0);
  CHECK(norm_h(duality_map(sh) - sh) <= 1e-14);
  CHECK(inner_h(duality_map(sh), sh) == doctest::Approx(norm_h(sh) * norm_h(sh)));

  for (int s = 0; s < 100; ++s) {
    const SpectralField u = random_divfree(grid, rng, grid->kmax, 1.0 + rng.uniform());
    const SpectralField ju = duality_map(u);
    const double nx = norm_x(u);
    CHECK(std::abs(inner_h(ju, u) / (nx * nx) - 1.0) <= 1e-12);
    CHECK(std::abs(norm_xstar(ju) / nx - 1.0) <= 1e-12);
    CHECK(norm_h(stokes_inverse(ju) - u) <= 1e-14 * norm_h(u));
    const double xs = norm_xstar(ju);
    CHECK(std::abs(inner_h(stokes_inverse(ju), ju) - xs * xs) <= 1e-12 * xs * xs);
  }

  // Single mode |k| = 2 with amplitude 4 maps to amplitude 1.
  SpectralField mode(grid);
  for (Eigen::Index f = 0; f < grid->modes(); ++f)
    if (grid->kfreq[0][f] == 0.0 && std::abs(grid->kfreq[1][f]) == 2.0)
      mode.coeff[f] = {4.0, 0.0};
  CHECK(std::abs(stokes_inverse(mode).coeff.abs().maxCoeff() - 1.0) <= 1e-14);

  // Nonzero mean input is rejected.
  SpectralField bad(grid);
  bad.coeff[0] = {1.0, 0.0};
  CHECK_THROWS_AS(stokes_inverse(bad), std::invalid_argument);
}

TEST_CASE("Parseval ties the physical grid to the spectral sums") {
  for (const int d : {2, 3}) {
    auto grid = TorusGrid::make(d, 8, 0.1);
    Rng rng(60 + d);
    for (int s = 0; s < 10; ++s) {
      const SpectralField u = random_divfree(grid, rng, grid->kmax, 1.0);
      const SpectralField v = random_divfree(grid, rng, grid->kmax, 1.0);
      double phys = 0.0;
      for (int j = 0; j < d; ++j)
        phys += (to_physical_component(u, j).real() * to_physical_component(v, j).real()).mean();
      CHECK(std::abs(phys - inner_h(u, v)) <= 1e-12 * norm_h(u) * norm_h(v));
    }
  }
}

TEST_CASE("regularity ratio diagnostics") {
  auto grid = TorusGrid::make(2, 32, 0.1);
  // Taylor-Green: advection projects to zero, so the ratio vanishes.
  CHECK(regularity_ratio(taylor_green(grid, 1.0)) <= 1e-12);
  CHECK_THROWS_AS(regularity_ratio(SpectralField(grid)), std::invalid_argument);

  // Resolution independence for fields resolved on both grids.
  auto grid64 = TorusGrid::make(2, 64, 0.1);
  for (int s = 0; s < 5; ++s) {
    Rng ra(700 + s), rb(700 + s);
    const double r32 = regularity_ratio(random_divfree(grid, ra, 5, 1.0));
    const double r64 = regularity_ratio(random_divfree(grid64, rb, 5, 1.0));
    CHECK(std::abs(r32 - r64) <= 0.05 * r32);
  }

  // 3D exponent differs: check the formula against norms directly.
  auto g3 = TorusGrid::make(3, 8, 0.1);
  Rng rng(71);
  const SpectralField u = random_divfree(g3, rng, 2, 1.3);
  const double expect = norm_xstar(advection(u)) /
                        (std::sqrt(norm_h(u)) * std::pow(norm_x(u), 1.5));
  CHECK(regularity_ratio(u) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("field invariant violations are detected") {
  auto grid = TorusGrid::make(2, 16, 0.1);
  Rng rng(81);
  SpectralField u = random_divfree(grid, rng, grid->kmax, 1.0);
  CHECK(field_invariant_violation(u) <= 1e-12);

  SpectralField broken = u;
  // Violate incompressibility on one retained mode.
  for (Eigen::Index f = 0; f < grid->modes(); ++f)
    if (grid->kfreq[0][f] == 1.0 && grid->kfreq[1][f] == 0.0) broken.coeff[f] += 0.5;
  CHECK(field_invariant_violation(broken) > 1e-3);
}

TEST_CASE("serialization round trips") {
  namespace fs = std::filesystem;
  const std::string dir = (fs::temp_directory_path() / "selfdual_io_test").string();
  fs::create_directories(dir);

  for (const int d : {2, 3}) {
    auto grid = TorusGrid::make(d, 8, 0.2);
    Rng rng(90 + d);
    const SpectralField u = random_divfree(grid, rng, grid->kmax, 1.37);

    write_field_csv(dir + "/f.csv", u);
    const SpectralField back_csv = read_field_csv(dir + "/f.csv");
    CHECK(back_csv.grid->d == d);
    CHECK(norm_h(back_csv - u) <= 1e-12 * norm_h(u));

    write_field_binary(dir + "/f.bin", u);
    const SpectralField back_bin = read_field_binary(dir + "/f.bin");
    CHECK(norm_h(back_bin - u) == 0.0);  // binary is bit-exact

    Path p(grid, 0.7, 3);
    for (auto& node : p.nodes) node = random_divfree(grid, rng, grid->kmax, 1.0);
    write_path_binary(dir + "/p.bin", p);
    const Path pb = read_path_binary(dir + "/p.bin");
    CHECK(pb.T == p.T);
    CHECK(pb.intervals() == p.intervals());
    for (std::size_t i = 0; i < p.nodes.size(); ++i)
      CHECK(norm_h(pb.nodes[i] - p.nodes[i]) == 0.0);
  }
  CHECK_THROWS(read_field_binary(dir + "/does_not_exist.bin"));
}
