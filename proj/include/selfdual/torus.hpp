#pragma once

#include <Eigen/Dense>
#include <array>
#include <memory>

#include "selfdual/rng.hpp"

namespace selfdual {

/// Pseudo-spectral discretization of the d-dimensional periodic torus
/// [0,2pi)^d with n modes per dimension (power of two, n >= 8) and 2/3-rule
/// dealiasing. Integer wavenumbers; the retained band |k_j| <= n/3 makes
/// products of retained fields alias-free on the band, so the advection
/// pairing <(u.grad)u, u> vanishes to rounding.
///
/// Spaces are realized as weighted l2 sums over Fourier coefficients:
///   |u|_H^2  = sum |u^(k)|^2      (mean-normalized L2)
///   |u|_X^2  = sum |k|^2 |u^(k)|^2
///   |p|_X*^2 = sum |k|^-2 |p^(k)|^2
struct TorusGrid {
  int d = 2;
  int n = 32;
  double nu = 0.1;
  int kmax = 10;  // retained band bound

  Eigen::ArrayXd k2;                      // |k|^2 per flat mode index
  std::array<Eigen::ArrayXd, 3> kfreq;    // signed wavenumber per axis
  Eigen::ArrayXd keep;                    // 1.0 inside the retained band
  Eigen::VectorXi neg_index;              // flat index of -k

  Eigen::Index modes() const { return k2.size(); }

  static std::shared_ptr<const TorusGrid> make(int d, int n, double nu);
};

using GridPtr = std::shared_ptr<const TorusGrid>;

/// Divergence-free velocity field (or an X* dual density) as complex
/// Fourier coefficients, component-major: coeff[j*modes + flat(k)].
/// Fields are plain values and grids are shared read-only; every operation
/// below is pure and re-entrant (transform plans are thread_local), so
/// independent evaluations may run concurrently.
struct SpectralField {
  GridPtr grid;
  Eigen::ArrayXcd coeff;

  SpectralField() = default;
  explicit SpectralField(GridPtr g)
      : grid(std::move(g)), coeff(Eigen::ArrayXcd::Zero(grid->d * grid->modes())) {}

  Eigen::Index size() const { return coeff.size(); }

  SpectralField& operator+=(const SpectralField& o) {
    coeff += o.coeff;
    return *this;
  }
  SpectralField& operator-=(const SpectralField& o) {
    coeff -= o.coeff;
    return *this;
  }
  SpectralField& operator*=(double s) {
    coeff *= s;
    return *this;
  }
  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(double s, SpectralField a) { return a *= s; }
};

// -- inner products and norms ------------------------------------------------

double inner_h(const SpectralField& u, const SpectralField& v);
double norm_h(const SpectralField& u);
double norm_x(const SpectralField& u);
double norm_xstar(const SpectralField& p);

// -- canonicalization --------------------------------------------------------

/// Per-mode projector u^(k) -> (I - k k^T/|k|^2) u^(k), zero mean mode.
/// Idempotent; annihilates gradient fields.
SpectralField leray_project(const SpectralField& raw);

/// Zeroes coefficients outside the retained band.
SpectralField dealias(const SpectralField& u);

/// Enforces the reality constraint u^(-k) = conj(u^(k)).
SpectralField symmetrize(const SpectralField& u);

/// symmetrize + dealias + leray_project; the canonical way to turn raw
/// coefficients into a valid field.
SpectralField make_valid(const SpectralField& raw);

/// Max violation of the field invariants (divergence, reality, mean, band),
/// scaled by the field magnitude.
double field_invariant_violation(const SpectralField& u);

// -- transforms and operators ------------------------------------------------

/// Physical-space samples of component j on the n^d grid.
Eigen::ArrayXcd to_physical_component(const SpectralField& u, int j);

/// Field from physical-space component samples (inverse of the above).
SpectralField from_physical(const GridPtr& grid,
                            const std::vector<Eigen::ArrayXcd>& phys);

/// Dealiased, Leray-projected pseudo-spectral advection (u.grad)u in X*.
SpectralField advection(const SpectralField& u);

/// Adjoint of the linearization of advection at u, applied to w:
/// P D [ (grad u)^T w - (u.grad) w ]. Exact discrete adjoint.
SpectralField advection_adjoint(const SpectralField& u, const SpectralField& w);

/// Duality map X -> X*: multiply each mode by |k|^2.
SpectralField duality_map(const SpectralField& u);

/// Inverse Stokes multiplier |k|^-2; requires zero-mean input.
SpectralField stokes_inverse(const SpectralField& p);

/// |Lu|_X* / (|u|_H |u|_X) in 2D, |Lu|_X* / (|u|_H^1/2 |u|_X^3/2) in 3D.
/// Monitored diagnostic; throws on the zero field.
double regularity_ratio(const SpectralField& u);

// -- reference fields ----------------------------------------------------------

/// Taylor-Green vortex: (sin x cos y, -cos x sin y) in 2D and
/// (sin x cos y cos z, -cos x sin y cos z, 0) in 3D, times amplitude.
SpectralField taylor_green(const GridPtr& grid, double amplitude = 1.0);

/// Unidirectional shear (sin y, 0[, 0]) times amplitude; single mode |k|=1
/// with vanishing self-advection.
SpectralField shear_mode(const GridPtr& grid, double amplitude = 1.0);

/// Seeded random divergence-free field supported on |k_j| <= kband,
/// scaled to the requested H-norm (zero field when amplitude is 0).
SpectralField random_divfree(const GridPtr& grid, Rng& rng, int kband, double amplitude);

}  // namespace selfdual
