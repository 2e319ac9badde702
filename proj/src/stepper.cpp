#include "selfdual/stepper.hpp"

#include <cmath>

namespace selfdual {

namespace {

SpectralField apply_mode_factor(const SpectralField& u,
                                const std::function<double(double)>& factor_of_k2) {
  const auto& g = *u.grid;
  SpectralField out = u;
  for (Eigen::Index f = 0; f < g.modes(); ++f) {
    const double c = factor_of_k2(g.k2[f]);
    for (int j = 0; j < g.d; ++j) out.coeff[j * g.modes() + f] *= c;
  }
  return out;
}

}  // namespace

SpectralField step(const StepperConfig& cfg, const SpectralField& u, double t) {
  (void)t;  // steady forcing; the hook stays for time-dependent presets
  const auto& g = *u.grid;
  const double nu = g.nu, dt = cfg.dt;

  const bool has_forcing = cfg.forcing.grid != nullptr;
  auto explicit_part = [&](const SpectralField& state) {
    SpectralField rhs = advection(state);
    if (has_forcing) rhs.coeff += cfg.forcing.coeff;
    return rhs;
  };

  if (cfg.scheme == StepperConfig::Scheme::ImexEuler) {
    SpectralField rhs = explicit_part(u);
    SpectralField out = u;
    out.coeff -= dt * rhs.coeff;
    return make_valid(apply_mode_factor(out, [&](double k2) { return 1.0 / (1.0 + dt * nu * k2); }));
  }

  // Crank-Nicolson with Picard on the midpoint state.
  SpectralField ubar = u;
  SpectralField unew = u;
  double change = HUGE_VAL;
  const double ref = std::max(1.0, norm_h(u));
  for (int it = 0; it < cfg.picard_max; ++it) {
    SpectralField rhs = explicit_part(ubar);
    SpectralField base = apply_mode_factor(u, [&](double k2) { return 1.0 - 0.5 * dt * nu * k2; });
    base.coeff -= dt * rhs.coeff;
    unew = apply_mode_factor(base, [&](double k2) { return 1.0 / (1.0 + 0.5 * dt * nu * k2); });
    SpectralField next_bar = u;
    next_bar.coeff = 0.5 * (u.coeff + unew.coeff);
    change = norm_h(next_bar - ubar) / ref;
    ubar = next_bar;
    if (change <= cfg.picard_tol) return make_valid(unew);
  }
  throw picard_divergence(change);
}

Path solve_ivp(const StepperConfig& cfg, const SpectralField& u0, double T) {
  const double total = cfg.dt * cfg.steps;
  if (std::abs(total - T) > 1e-9 * std::max(1.0, T))
    throw std::invalid_argument("solve_ivp: steps * dt must equal T");
  Path p(u0.grid, T, cfg.steps);
  p.nodes[0] = u0;
  for (int i = 0; i < cfg.steps; ++i)
    p.nodes[static_cast<std::size_t>(i) + 1] =
        step(cfg, p.nodes[static_cast<std::size_t>(i)], cfg.dt * i);
  return p;
}

double compare_paths(const Path& a, const Path& b) {
  if (a.grid.get() != b.grid.get() || a.intervals() != b.intervals())
    throw std::invalid_argument("compare_paths: mismatched paths");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.nodes.size(); ++i) {
    const double diff = norm_h(a.nodes[i] - b.nodes[i]);
    worst = std::max(worst, diff / std::max(1.0, norm_h(b.nodes[i])));
  }
  return worst;
}

Path heat_decay_path(const GridPtr& grid, const SpectralField& u0, double T, int N) {
  Path p(grid, T, N);
  const double nu = grid->nu;
  for (int i = 0; i <= N; ++i) {
    const double t = T * i / N;
    p.nodes[static_cast<std::size_t>(i)] =
        apply_mode_factor(u0, [&](double k2) { return std::exp(-nu * k2 * t); });
  }
  return p;
}

}  // namespace selfdual
