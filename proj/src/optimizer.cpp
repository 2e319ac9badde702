#include "selfdual/optimizer.hpp"

#include <cmath>
#include <deque>
#include <fstream>
#include <stdexcept>

namespace selfdual {

namespace {

/// Packs the free nodes of a path into one flat vector. The flat Euclidean
/// geometry coincides with the H-geometry of the fields, so quasi-Newton
/// dot products are the physically meaningful ones.
struct PathDofMap {
  GridPtr grid;
  double T = 1.0;
  int N = 2;
  double alias_sign = 0.0;  // 0: all N+1 nodes free; +-1: u_N = sign * u_0
  Eigen::Index per_node = 0;

  explicit PathDofMap(const DiscreteFunctional& F)
      : grid(F.grid), T(F.T), N(F.N) {
    const auto s = F.boundary.alias_sign();
    alias_sign = s ? *s : 0.0;
    per_node = 2 * grid->d * grid->modes();
  }

  int free_nodes() const { return alias_sign == 0.0 ? N + 1 : N; }
  Eigen::Index dof() const { return per_node * free_nodes(); }

  VectorXd pack(const Path& p) const {
    VectorXd z(dof());
    for (int i = 0; i < free_nodes(); ++i)
      z.segment(per_node * i, per_node) = flatten(p.nodes[static_cast<std::size_t>(i)]);
    return z;
  }

  Path unpack(const VectorXd& z) const {
    Path p(grid, T, N);
    for (int i = 0; i < free_nodes(); ++i)
      p.nodes[static_cast<std::size_t>(i)] =
          unflatten(grid, z.segment(per_node * i, per_node));
    if (alias_sign != 0.0) {
      p.nodes.back() = p.nodes.front();
      p.nodes.back() *= alias_sign;
    }
    return p;
  }

  VectorXd fold(const std::vector<SpectralField>& g) const {
    VectorXd z = VectorXd::Zero(dof());
    for (int i = 0; i < free_nodes(); ++i)
      z.segment(per_node * i, per_node) = flatten(g[static_cast<std::size_t>(i)]);
    if (alias_sign != 0.0) z.segment(0, per_node) += alias_sign * flatten(g.back());
    return z;
  }
};

double path_scale(const DiscreteFunctional& F, const Path& initial) {
  const SpectralField& ref = F.x0_field ? *F.x0_field : initial.nodes.front();
  const double h = norm_h(ref);
  return std::max(1.0, h * h);
}

SolveTrace run_lbfgs(const std::function<double(const VectorXd&)>& value,
                     const std::function<double(const VectorXd&, VectorXd&)>& fg, VectorXd& z,
                     const SolveOptions& opts, double scale,
                     const VectorXd& metric_diag = VectorXd()) {
  const bool preconditioned = metric_diag.size() > 0;
  VectorXd inv_diag;
  if (preconditioned) inv_diag = metric_diag.cwiseInverse();
  SolveTrace trace;
  trace.scale = scale;

  const Eigen::Index n = z.size();
  VectorXd g(n), gnew(n);
  double f = fg(z, g);

  std::deque<std::pair<VectorXd, VectorXd>> pairs;  // (s, y)
  double last_step = 0.0;

  VectorXd best_z = z;
  double best_f = f;

  for (int iter = 0; iter <= opts.max_iters; ++iter) {
    const double gnorm = g.norm();
    trace.iterations.push_back({f, gnorm, last_step});
    if (f <= opts.value_tol * scale) {
      trace.termination = Termination::ValueCertified;
      break;
    }
    if (opts.grad_tol > 0.0 && gnorm <= opts.grad_tol) {
      trace.termination = Termination::GradientSmall;
      break;
    }
    if (iter == opts.max_iters) {
      trace.termination = Termination::MaxIters;
      break;
    }

    // Two-loop recursion.
    VectorXd d = -g;
    std::vector<double> alpha(pairs.size());
    for (std::size_t k = pairs.size(); k-- > 0;) {
      const auto& [s, y] = pairs[k];
      const double rho = 1.0 / y.dot(s);
      alpha[k] = rho * s.dot(d);
      d -= alpha[k] * y;
    }
    if (preconditioned) {
      // H0 = gamma * M^-1 with the generalized scaling s.y / y.M^-1 y.
      double gamma = 1.0;
      if (!pairs.empty()) {
        const auto& [s, y] = pairs.back();
        gamma = s.dot(y) / y.dot(inv_diag.cwiseProduct(y));
      }
      d = gamma * inv_diag.cwiseProduct(d);
    } else if (!pairs.empty()) {
      const auto& [s, y] = pairs.back();
      d *= s.dot(y) / y.dot(y);
    }
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      const auto& [s, y] = pairs[k];
      const double rho = 1.0 / y.dot(s);
      const double beta = rho * y.dot(d);
      d += (alpha[k] - beta) * s;
    }
    double slope = g.dot(d);
    if (!(slope < 0.0)) {
      pairs.clear();
      d = -g;
      slope = -gnorm * gnorm;
    }

    // Armijo backtracking; on failure retry from steepest descent once.
    auto backtrack = [&](const VectorXd& dir, double dirslope, double& step_out) -> bool {
      double step = 1.0;
      for (int bt = 0; bt < opts.ls_max_backtracks; ++bt) {
        const VectorXd zt = z + step * dir;
        const double ft = value(zt);
        if (std::isfinite(ft) && ft <= f + opts.ls_c1 * step * dirslope) {
          fg(zt, gnew);
          const VectorXd s = step * dir;
          const VectorXd y = gnew - g;
          if (s.dot(y) > 1e-12 * s.norm() * y.norm()) {
            pairs.emplace_back(s, y);
            if (static_cast<int>(pairs.size()) > opts.memory) pairs.pop_front();
          }
          z = zt;
          f = ft;
          g = gnew;
          step_out = step;
          return true;
        }
        step *= opts.ls_shrink;
      }
      return false;
    };

    double step = 0.0;
    bool ok = backtrack(d, slope, step);
    if (!ok && !pairs.empty()) {
      pairs.clear();
      ok = backtrack(-g, -gnorm * gnorm, step);
    }
    if (!ok) {
      trace.line_search_failed = true;
      trace.termination = Termination::MaxIters;
      break;
    }
    last_step = step;
    if (f < best_f) {
      best_f = f;
      best_z = z;
    }
  }

  if (best_f < f) {
    z = best_z;
    f = best_f;
    fg(z, g);
  }
  trace.final_total = f;
  trace.final_grad_norm = g.norm();
  return trace;
}

}  // namespace

void SolveOptions::validate() const {
  if (value_tol <= 0.0) throw std::invalid_argument("SolveOptions: value_tol must be positive");
  if (max_iters < 1) throw std::invalid_argument("SolveOptions: max_iters must be >= 1");
  if (!(ls_shrink > 0.0 && ls_shrink < 1.0))
    throw std::invalid_argument("SolveOptions: shrink factor must lie in (0,1)");
  if (memory < 1) throw std::invalid_argument("SolveOptions: memory must be >= 1");
}

const char* termination_name(Termination t) {
  switch (t) {
    case Termination::ValueCertified: return "value_certified";
    case Termination::GradientSmall: return "gradient_small";
    default: return "max_iters";
  }
}

SolveTrace lbfgs_minimize(const std::function<double(const VectorXd&, VectorXd&)>& fg,
                          VectorXd& z, const SolveOptions& opts, double scale) {
  opts.validate();
  auto value = [&](const VectorXd& zz) {
    VectorXd scratch;
    return fg(zz, scratch);
  };
  return run_lbfgs(value, fg, z, opts, scale);
}

Path default_initial_path(const DiscreteFunctional& F) {
  Path p(F.grid, F.T, F.N);
  if (F.boundary.boundary_kind() == BoundaryLagrangian::Kind::InitialValue && F.x0_field) {
    for (auto& node : p.nodes) node = *F.x0_field;
  }
  return p;
}

std::pair<Path, SolveTrace> minimize(const DiscreteFunctional& F, const Path& initial,
                                     const SolveOptions& opts) {
  opts.validate();
  const double scale = opts.scale_override > 0.0 ? opts.scale_override : path_scale(F, initial);

  std::vector<double> stages = opts.continuation;
  if (stages.empty()) stages.push_back(F.eps);

  PathDofMap dofs(F);
  VectorXd z = dofs.pack(initial);

  VectorXd metric;
  if (opts.precondition) {
    // Per-mode diagonal of the Stokes part of the gap-form Hessian:
    // dt*nu*|k|^2 from Phi plus 2/(nu*|k|^2*dt) from Phi* through the
    // difference quotient. Advection and boundary corrections are left to
    // the quasi-Newton pairs.
    const auto& g = *F.grid;
    const double dt = F.dt(), nu = g.nu;
    VectorXd per_node(dofs.per_node);
    for (int j = 0; j < g.d; ++j)
      for (Eigen::Index f = 0; f < g.modes(); ++f) {
        const double k2 = std::max(g.k2[f], 1.0);
        const double dval = dt * nu * k2 + 2.0 / (nu * k2 * dt);
        per_node[2 * (j * g.modes() + f)] = dval;
        per_node[2 * (j * g.modes() + f) + 1] = dval;
      }
    metric = VectorXd(dofs.dof());
    for (int i = 0; i < dofs.free_nodes(); ++i)
      metric.segment(dofs.per_node * i, dofs.per_node) = per_node;
  }

  SolveTrace combined;
  combined.scale = scale;
  for (std::size_t stage = 0; stage < stages.size(); ++stage) {
    const DiscreteFunctional Fs = F.with_eps(stages[stage]);
    auto value = [&](const VectorXd& zz) {
      return functional_value(Fs, dofs.unpack(zz)).total.as_double();
    };
    auto fg = [&](const VectorXd& zz, VectorXd& grad) {
      const Path p = dofs.unpack(zz);
      std::vector<SpectralField> gi;
      const FunctionalReport rep = functional_value_and_gradient(Fs, p, gi);
      grad = dofs.fold(gi);
      if (Fs.boundary.smooth()) {
        const VectorXd u0 = flatten(p.nodes.front());
        const VectorXd uN = flatten(p.nodes.back());
        const auto [b0, bN] = boundary_gap_gradient(Fs.boundary, u0, uN);
        grad.segment(0, dofs.per_node) += flatten(make_valid(unflatten(Fs.grid, b0)));
        grad.segment(dofs.per_node * Fs.N, dofs.per_node) +=
            flatten(make_valid(unflatten(Fs.grid, bN)));
      }
      return rep.total.as_double();
    };
    SolveTrace t = run_lbfgs(value, fg, z, opts, scale, metric);
    combined.iterations.insert(combined.iterations.end(), t.iterations.begin(),
                               t.iterations.end());
    combined.termination = t.termination;
    combined.line_search_failed = combined.line_search_failed || t.line_search_failed;
    combined.final_total = t.final_total;
    combined.final_grad_norm = t.final_grad_norm;
  }
  return {dofs.unpack(z), combined};
}

double fd_gradient_audit(const DiscreteFunctional& F, const Path& path, int samples,
                         std::uint64_t seed) {
  PathDofMap dofs(F);
  VectorXd z = dofs.pack(path);
  auto value = [&](const VectorXd& zz) {
    return functional_value(F, dofs.unpack(zz)).total.as_double();
  };
  auto grad = [&]() {
    const Path p = dofs.unpack(z);
    VectorXd g = dofs.fold(functional_gradient_interior(F, p));
    if (F.boundary.smooth()) {
      const VectorXd u0 = flatten(p.nodes.front());
      const VectorXd uN = flatten(p.nodes.back());
      const auto [b0, bN] = boundary_gap_gradient(F.boundary, u0, uN);
      g.segment(0, dofs.per_node) += flatten(make_valid(unflatten(F.grid, b0)));
      g.segment(dofs.per_node * F.N, dofs.per_node) +=
          flatten(make_valid(unflatten(F.grid, bN)));
    }
    return g;
  }();

  Rng rng(seed);
  double worst = 0.0;
  const double h = 1e-5;
  for (int s = 0; s < samples; ++s) {
    Path dir(F.grid, F.T, F.N);
    for (auto& node : dir.nodes) node = random_divfree(F.grid, rng, F.grid->kmax, 1.0);
    if (dofs.alias_sign != 0.0) {
      dir.nodes.back() = dir.nodes.front();
      dir.nodes.back() *= dofs.alias_sign;
    }
    VectorXd dz = dofs.pack(dir);
    dz /= dz.norm();
    const double fd = (value(z + h * dz) - value(z - h * dz)) / (2.0 * h);
    const double an = grad.dot(dz);
    const double denom = std::max({std::abs(an), std::abs(fd), 1e-10});
    worst = std::max(worst, std::abs(fd - an) / denom);
  }
  return worst;
}

std::pair<SpectralField, SolveTrace> minimize_stationary(const GridPtr& grid,
                                                         const SpectralField& f,
                                                         const SpectralField& initial,
                                                         const SolveOptions& opts) {
  opts.validate();
  const double h = norm_h(initial);
  const double scale =
      opts.scale_override > 0.0 ? opts.scale_override : std::max(1.0, h * h);
  VectorXd z = flatten(initial);
  auto value = [&](const VectorXd& zz) {
    return stationary_functional(grid, f, unflatten(grid, zz)).total.as_double();
  };
  auto fg = [&](const VectorXd& zz, VectorXd& grad) {
    const SpectralField u = unflatten(grid, zz);
    grad = flatten(stationary_gradient(grid, f, u));
    return stationary_functional(grid, f, u).total.as_double();
  };
  SolveTrace t = run_lbfgs(value, fg, z, opts, scale);
  return {unflatten(grid, z), t};
}

void write_trace_csv(const std::string& filename, const SolveTrace& trace) {
  std::ofstream out(filename);
  if (!out) throw std::runtime_error("write_trace_csv: cannot open " + filename);
  out << "iter,total,grad_norm,step\n";
  for (std::size_t i = 0; i < trace.iterations.size(); ++i) {
    const auto& it = trace.iterations[i];
    out << i << ',' << std::scientific << it.total << ',' << it.grad_norm << ',' << it.step
        << '\n';
  }
}

}  // namespace selfdual
