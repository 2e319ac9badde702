#include "selfdual/torus.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace selfdual {

namespace {

using Cplx = std::complex<double>;

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

void check_same_grid(const SpectralField& a, const SpectralField& b, const char* where) {
  if (a.grid.get() != b.grid.get())
    throw std::invalid_argument(std::string(where) + ": fields on different grids");
}

// 1D complex FFT along one axis of the flat n^d array. Eigen's fwd is the
// unnormalized analysis sum; inv includes the 1/n factor.
void fft_axis(Eigen::ArrayXcd& data, const TorusGrid& g, int axis, bool forward) {
  thread_local Eigen::FFT<double> fft;
  const int n = g.n;
  Eigen::Index stride = 1;
  for (int a = g.d - 1; a > axis; --a) stride *= n;
  Eigen::Index outer = 1;
  for (int a = 0; a < axis; ++a) outer *= n;
  const Eigen::Index block = stride * n;

  Eigen::VectorXcd line(n), out(n);
  for (Eigen::Index o = 0; o < outer; ++o) {
    for (Eigen::Index s = 0; s < stride; ++s) {
      const Eigen::Index base = o * block + s;
      for (int i = 0; i < n; ++i) line[i] = data[base + stride * i];
      if (forward)
        fft.fwd(out, line);
      else
        fft.inv(out, line);
      for (int i = 0; i < n; ++i) data[base + stride * i] = out[i];
    }
  }
}

Eigen::ArrayXcd spectral_to_phys(const TorusGrid& g, Eigen::ArrayXcd block) {
  for (int a = 0; a < g.d; ++a) fft_axis(block, g, a, /*forward=*/false);
  block *= std::pow(static_cast<double>(g.n), g.d);
  return block;
}

Eigen::ArrayXcd phys_to_spectral(const TorusGrid& g, Eigen::ArrayXcd block) {
  for (int a = 0; a < g.d; ++a) fft_axis(block, g, a, /*forward=*/true);
  block *= std::pow(static_cast<double>(g.n), -g.d);
  return block;
}

Eigen::ArrayXcd derivative_component(const TorusGrid& g, const SpectralField& u, int comp,
                                     int axis) {
  const Eigen::Index m = g.modes();
  Eigen::ArrayXcd d = u.coeff.segment(comp * m, m);
  d *= Cplx(0.0, 1.0) * g.kfreq[axis].cast<Cplx>();
  return d;
}

}  // namespace

std::shared_ptr<const TorusGrid> TorusGrid::make(int d, int n, double nu) {
  if (d != 2 && d != 3) throw std::invalid_argument("TorusGrid: d must be 2 or 3");
  if (!power_of_two(n) || n < 8)
    throw std::invalid_argument("TorusGrid: n must be a power of two, n >= 8");
  if (nu <= 0.0) throw std::invalid_argument("TorusGrid: nu must be positive");

  auto g = std::make_shared<TorusGrid>();
  g->d = d;
  g->n = n;
  g->nu = nu;
  g->kmax = n / 3;

  Eigen::Index m = 1;
  for (int a = 0; a < d; ++a) m *= n;
  g->k2 = Eigen::ArrayXd::Zero(m);
  g->keep = Eigen::ArrayXd::Ones(m);
  g->neg_index = Eigen::VectorXi::Zero(m);
  for (int a = 0; a < d; ++a) g->kfreq[a] = Eigen::ArrayXd::Zero(m);

  auto freq = [n](int i) { return i < n / 2 ? i : i - n; };
  std::array<int, 3> idx{0, 0, 0};
  for (Eigen::Index f = 0; f < m; ++f) {
    Eigen::Index rest = f;
    for (int a = d - 1; a >= 0; --a) {
      idx[a] = static_cast<int>(rest % n);
      rest /= n;
    }
    double k2 = 0.0;
    bool keep = true;
    Eigen::Index negflat = 0;
    for (int a = 0; a < d; ++a) {
      const int k = freq(idx[a]);
      g->kfreq[a][f] = k;
      k2 += double(k) * k;
      if (std::abs(k) > g->kmax) keep = false;
      const int negi = (n - idx[a]) % n;
      negflat = negflat * n + negi;
    }
    g->k2[f] = k2;
    g->keep[f] = keep ? 1.0 : 0.0;
    g->neg_index[f] = static_cast<int>(negflat);
  }
  return g;
}

double inner_h(const SpectralField& u, const SpectralField& v) {
  check_same_grid(u, v, "inner_h");
  return (u.coeff.conjugate() * v.coeff).real().sum();
}

double norm_h(const SpectralField& u) { return std::sqrt(u.coeff.abs2().sum()); }

double norm_x(const SpectralField& u) {
  const auto& g = *u.grid;
  double s = 0.0;
  for (int j = 0; j < g.d; ++j)
    s += (u.coeff.segment(j * g.modes(), g.modes()).abs2() * g.k2).sum();
  return std::sqrt(s);
}

double norm_xstar(const SpectralField& p) {
  const auto& g = *p.grid;
  double s = 0.0;
  for (int j = 0; j < g.d; ++j) {
    const auto block = p.coeff.segment(j * g.modes(), g.modes()).abs2();
    for (Eigen::Index f = 0; f < g.modes(); ++f)
      if (g.k2[f] > 0.0) s += block[f] / g.k2[f];
  }
  return std::sqrt(s);
}

SpectralField leray_project(const SpectralField& raw) {
  const auto& g = *raw.grid;
  SpectralField out = raw;
  const Eigen::Index m = g.modes();
  for (Eigen::Index f = 0; f < m; ++f) {
    if (g.k2[f] == 0.0) {
      for (int j = 0; j < g.d; ++j) out.coeff[j * m + f] = 0.0;
      continue;
    }
    Cplx kdot(0.0, 0.0);
    for (int j = 0; j < g.d; ++j) kdot += g.kfreq[j][f] * out.coeff[j * m + f];
    kdot /= g.k2[f];
    for (int j = 0; j < g.d; ++j) out.coeff[j * m + f] -= g.kfreq[j][f] * kdot;
  }
  return out;
}

SpectralField dealias(const SpectralField& u) {
  const auto& g = *u.grid;
  SpectralField out = u;
  for (int j = 0; j < g.d; ++j)
    out.coeff.segment(j * g.modes(), g.modes()) *= g.keep.cast<Cplx>();
  return out;
}

SpectralField symmetrize(const SpectralField& u) {
  const auto& g = *u.grid;
  SpectralField out(u.grid);
  const Eigen::Index m = g.modes();
  for (int j = 0; j < g.d; ++j)
    for (Eigen::Index f = 0; f < m; ++f)
      out.coeff[j * m + f] =
          0.5 * (u.coeff[j * m + f] + std::conj(u.coeff[j * m + g.neg_index[f]]));
  return out;
}

SpectralField make_valid(const SpectralField& raw) {
  return leray_project(dealias(symmetrize(raw)));
}

double field_invariant_violation(const SpectralField& u) {
  const auto& g = *u.grid;
  const Eigen::Index m = g.modes();
  const double scale = norm_h(u) + 1e-300;
  double worst = 0.0;
  for (Eigen::Index f = 0; f < m; ++f) {
    Cplx kdot(0.0, 0.0);
    for (int j = 0; j < g.d; ++j) {
      const Cplx c = u.coeff[j * m + f];
      kdot += g.kfreq[j][f] * c;
      worst = std::max(worst, std::abs(c - std::conj(u.coeff[j * m + g.neg_index[f]])));
      if (g.keep[f] == 0.0 || g.k2[f] == 0.0) worst = std::max(worst, std::abs(c));
    }
    worst = std::max(worst, std::abs(kdot));
  }
  return worst / scale;
}

Eigen::ArrayXcd to_physical_component(const SpectralField& u, int j) {
  const auto& g = *u.grid;
  return spectral_to_phys(g, u.coeff.segment(j * g.modes(), g.modes()));
}

SpectralField from_physical(const GridPtr& grid, const std::vector<Eigen::ArrayXcd>& phys) {
  if (static_cast<int>(phys.size()) != grid->d)
    throw std::invalid_argument("from_physical: wrong component count");
  SpectralField out(grid);
  for (int j = 0; j < grid->d; ++j)
    out.coeff.segment(j * grid->modes(), grid->modes()) = phys_to_spectral(*grid, phys[j]);
  return out;
}

SpectralField advection(const SpectralField& u) {
  const auto& g = *u.grid;
  const Eigen::Index m = g.modes();

  std::vector<Eigen::ArrayXcd> uphys(g.d);
  for (int j = 0; j < g.d; ++j) uphys[j] = to_physical_component(u, j);

  std::vector<Eigen::ArrayXcd> acc(g.d, Eigen::ArrayXcd::Zero(m));
  for (int j = 0; j < g.d; ++j) {
    for (int l = 0; l < g.d; ++l) {
      Eigen::ArrayXcd dphys = spectral_to_phys(g, derivative_component(g, u, j, l));
      acc[j] += (uphys[l].real() * dphys.real()).cast<Cplx>();
    }
  }
  return leray_project(dealias(from_physical(u.grid, acc)));
}

SpectralField advection_adjoint(const SpectralField& u, const SpectralField& w) {
  check_same_grid(u, w, "advection_adjoint");
  const auto& g = *u.grid;
  const Eigen::Index m = g.modes();

  std::vector<Eigen::ArrayXcd> uphys(g.d), wphys(g.d);
  for (int j = 0; j < g.d; ++j) {
    uphys[j] = to_physical_component(u, j);
    wphys[j] = to_physical_component(w, j);
  }

  std::vector<Eigen::ArrayXcd> acc(g.d, Eigen::ArrayXcd::Zero(m));
  // (grad u)^T w : acc_k += w_j d_k u_j
  for (int k = 0; k < g.d; ++k)
    for (int j = 0; j < g.d; ++j) {
      Eigen::ArrayXcd du = spectral_to_phys(g, derivative_component(g, u, j, k));
      acc[k] += (wphys[j].real() * du.real()).cast<Cplx>();
    }
  // -(u.grad) w : acc_k -= u_l d_l w_k
  for (int k = 0; k < g.d; ++k)
    for (int l = 0; l < g.d; ++l) {
      Eigen::ArrayXcd dw = spectral_to_phys(g, derivative_component(g, w, k, l));
      acc[k] -= (uphys[l].real() * dw.real()).cast<Cplx>();
    }
  return leray_project(dealias(from_physical(u.grid, acc)));
}

SpectralField duality_map(const SpectralField& u) {
  const auto& g = *u.grid;
  SpectralField out = u;
  for (int j = 0; j < g.d; ++j)
    out.coeff.segment(j * g.modes(), g.modes()) *= g.k2.cast<Cplx>();
  return out;
}

SpectralField stokes_inverse(const SpectralField& p) {
  const auto& g = *p.grid;
  const Eigen::Index m = g.modes();
  double mean_mag = 0.0;
  for (int j = 0; j < g.d; ++j) mean_mag = std::max(mean_mag, std::abs(p.coeff[j * m]));
  if (mean_mag > 1e-10 * (norm_h(p) + 1e-300))
    throw std::invalid_argument("stokes_inverse: input has a nonzero mean mode");
  SpectralField out = p;
  for (Eigen::Index f = 0; f < m; ++f) {
    const double factor = g.k2[f] > 0.0 ? 1.0 / g.k2[f] : 0.0;
    for (int j = 0; j < g.d; ++j) out.coeff[j * m + f] *= factor;
  }
  return out;
}

double regularity_ratio(const SpectralField& u) {
  const double h = norm_h(u), x = norm_x(u);
  if (h == 0.0 || x == 0.0) throw std::invalid_argument("regularity_ratio: zero field");
  const double a = norm_xstar(advection(u));
  if (u.grid->d == 2) return a / (h * x);
  return a / (std::sqrt(h) * x * std::sqrt(x));
}

SpectralField taylor_green(const GridPtr& grid, double amplitude) {
  const auto& g = *grid;
  const Eigen::Index m = g.modes();
  std::vector<Eigen::ArrayXcd> phys(g.d, Eigen::ArrayXcd::Zero(m));
  const double h = 2.0 * M_PI / g.n;
  std::array<int, 3> idx{0, 0, 0};
  for (Eigen::Index f = 0; f < m; ++f) {
    Eigen::Index rest = f;
    for (int a = g.d - 1; a >= 0; --a) {
      idx[a] = static_cast<int>(rest % g.n);
      rest /= g.n;
    }
    const double x = h * idx[0], y = h * idx[1];
    if (g.d == 2) {
      phys[0][f] = amplitude * std::sin(x) * std::cos(y);
      phys[1][f] = -amplitude * std::cos(x) * std::sin(y);
    } else {
      const double z = h * idx[2];
      phys[0][f] = amplitude * std::sin(x) * std::cos(y) * std::cos(z);
      phys[1][f] = -amplitude * std::cos(x) * std::sin(y) * std::cos(z);
      phys[2][f] = 0.0;
    }
  }
  return make_valid(from_physical(grid, phys));
}

SpectralField shear_mode(const GridPtr& grid, double amplitude) {
  const auto& g = *grid;
  SpectralField out(grid);
  const Eigen::Index m = g.modes();
  // u_1 = amplitude * sin(x_2): coefficients -i a/2 at k2=+1, +i a/2 at k2=-1.
  for (Eigen::Index f = 0; f < m; ++f) {
    bool others_zero = g.kfreq[0][f] == 0.0 && (g.d == 2 || g.kfreq[2][f] == 0.0);
    if (!others_zero) continue;
    if (g.kfreq[1][f] == 1.0) out.coeff[f] = Cplx(0.0, -0.5 * amplitude);
    if (g.kfreq[1][f] == -1.0) out.coeff[f] = Cplx(0.0, 0.5 * amplitude);
  }
  return out;
}

SpectralField random_divfree(const GridPtr& grid, Rng& rng, int kband, double amplitude) {
  const auto& g = *grid;
  SpectralField raw(grid);
  const Eigen::Index m = g.modes();
  for (int j = 0; j < g.d; ++j)
    for (Eigen::Index f = 0; f < m; ++f) {
      bool inband = true;
      for (int a = 0; a < g.d; ++a)
        if (std::abs(g.kfreq[a][f]) > kband) inband = false;
      if (!inband || g.k2[f] == 0.0) continue;
      raw.coeff[j * m + f] = Cplx(rng.gaussian(), rng.gaussian());
    }
  SpectralField out = make_valid(raw);
  const double h = norm_h(out);
  if (amplitude == 0.0 || h == 0.0) return SpectralField(grid);
  out *= amplitude / h;
  return out;
}

}  // namespace selfdual
