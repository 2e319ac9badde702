#pragma once

#include <functional>
#include <string>
#include <vector>

#include "selfdual/functional.hpp"

namespace selfdual {

struct SolveOptions {
  double value_tol = 1e-8;   // certify when total <= value_tol * scale
  double grad_tol = 0.0;     // optional gradient stop (disabled when 0)
  int max_iters = 1000;
  int memory = 10;           // quasi-Newton history length
  double ls_c1 = 1e-4;       // Armijo sufficient-decrease constant
  double ls_shrink = 0.5;
  int ls_max_backtracks = 60;
  std::vector<double> continuation;  // eps schedule for the 3D functional
  double scale_override = 0.0;       // 0: scale = max(1, |u0|_H^2)
  bool precondition = true;          // spectral Stokes diagonal as initial metric

  void validate() const;
};

enum class Termination { ValueCertified, GradientSmall, MaxIters };

struct SolveTrace {
  struct Iteration {
    double total = 0.0;
    double grad_norm = 0.0;
    double step = 0.0;
  };
  std::vector<Iteration> iterations;
  Termination termination = Termination::MaxIters;
  bool line_search_failed = false;
  double scale = 1.0;
  double final_total = 0.0;
  double final_grad_norm = 0.0;
};

const char* termination_name(Termination t);

/// Limited-memory quasi-Newton descent on a generic objective
/// (value + gradient callback); stops when the value certificate holds.
SolveTrace lbfgs_minimize(
    const std::function<double(const VectorXd&, VectorXd&)>& value_and_gradient, VectorXd& z,
    const SolveOptions& opts, double scale);

/// Minimizes the discrete path functional over path space. The known
/// optimal value (0 in 2D, <= 0 in 3D) makes value certification a genuine
/// stopping criterion. Periodic and anti-periodic boundaries are enforced
/// structurally (u_N aliased to +-u_0); when opts.continuation is nonempty
/// the functional's eps follows the schedule with warm starts.
std::pair<Path, SolveTrace> minimize(const DiscreteFunctional& F, const Path& initial,
                                     const SolveOptions& opts);

/// Default initial guess: constant-in-time x0 path for InitialValue,
/// otherwise the zero path (respecting the alias constraint).
Path default_initial_path(const DiscreteFunctional& F);

/// Max relative disagreement between analytic and central finite-difference
/// directional derivatives over seeded random directions.
double fd_gradient_audit(const DiscreteFunctional& F, const Path& path, int samples,
                         std::uint64_t seed = 20240801);

/// Steady-state solve for the stationary functional.
std::pair<SpectralField, SolveTrace> minimize_stationary(const GridPtr& grid,
                                                         const SpectralField& f,
                                                         const SpectralField& initial,
                                                         const SolveOptions& opts);

void write_trace_csv(const std::string& filename, const SolveTrace& trace);

}  // namespace selfdual
