#pragma once

#include "selfdual/functional.hpp"

namespace selfdual {

/// Independent classical time stepping used to cross-check minimizers.
/// Deliberately shares the field primitives but none of the functional
/// assembly. Convention: du/dt = -nu A u - (u.grad)u - f.
struct StepperConfig {
  enum class Scheme { ImexEuler, CrankNicolsonPicard };
  Scheme scheme = Scheme::CrankNicolsonPicard;
  double dt = 1e-2;
  int steps = 100;
  int picard_max = 50;
  double picard_tol = 1e-12;
  SpectralField forcing;  // steady forcing in X*
};

struct picard_divergence : std::runtime_error {
  double residual;
  explicit picard_divergence(double r)
      : std::runtime_error("Picard iteration did not converge"), residual(r) {}
};

/// Advances one step from u at time t (diffusion implicit per mode,
/// advection at the midpoint state); output is divergence-free.
SpectralField step(const StepperConfig& cfg, const SpectralField& u, double t);

/// Integrates steps * dt = T from u0; returns the N+1 node path.
Path solve_ivp(const StepperConfig& cfg, const SpectralField& u0, double T);

/// max over nodes of |a_i - b_i|_H / max(1, |b_i|_H).
double compare_paths(const Path& a, const Path& b);

/// Exact spectral heat decay u^(k,t) = exp(-nu |k|^2 t) u0^(k); the Stokes
/// oracle (an exact NS solution whenever the advection of u0's shape
/// projects to zero, e.g. Taylor-Green or a unidirectional shear).
Path heat_decay_path(const GridPtr& grid, const SpectralField& u0, double T, int N);

}  // namespace selfdual
