#pragma once

#include "ltlab/eigenset.hpp"
#include "ltlab/potentials.hpp"
#include "ltlab/tridiagonal.hpp"

namespace ltlab {

/// Uniform grid on [center - L, center + L] with N interior points and
/// Dirichlet ends; spacing h = 2L / (N + 1).
struct GridParams {
  double half_width = 10.0;
  int points = 1023;
  double center = 0.0;
  /// Relative cap for matching eigenvalues between the domain and its 1.5x
  /// enlargement at equal spacing.
  double eps_move = 1e-6;
  /// Relative cap for matching raw eigenvalues between h and h/2.
  double eps_refine = 1e-2;
  /// Eigenvalues closer than this to [0, inf) are discarded.
  double eps_axis = 1e-8;
  /// Eigenvalues closer than this are merged into one with multiplicity.
  double cluster_radius = 1e-9;
  /// Candidates whose wavenumber exceeds this many radians per cell, i.e.
  /// |E| > (hbar * max_phase_per_cell / h)^2 + max|V|, are unresolved.
  double max_phase_per_cell = 0.5;
  /// Candidates must decay by at least exp(-min_decay_exponent) between the
  /// potential's support and the Dirichlet ends. Slower ones are standing
  /// waves of the box, which the 1.5x enlargement check cannot reject since
  /// mode n at L reappears as mode 1.5n at 1.5L.
  double min_decay_exponent = 2.0;

  double spacing() const { return 2.0 * half_width / (points + 1); }
};

/// Grid resolution policy used to pick GridParams for a given hbar.
struct GridResolution {
  /// Target spacing h_factor * hbar / sqrt(1 + max|V|), i.e. about
  /// h_factor radians of phase per cell at energies of order max|V|. Rounded
  /// down so that the support spans a multiple of 8 cells.
  double h_factor = 0.1;
  /// Smallest exterior decay rate Re sqrt(-E) to be resolved; the padding
  /// on each side is hbar * max(10, 9 / decay_min).
  double decay_min = 0.07;
  double eps_move = 1e-6;
  double eps_refine = 1e-2;
  double eps_axis = 1e-8;
};

GridParams auto_grid_params(const Potential& v, double hbar, const GridResolution& resolution = {});

/// Second-order central differences for -hbar^2 d^2/dx^2 + V. Step potentials
/// enter through cell averages over [x_i - h/2, x_i + h/2], sampled ones
/// through point values.
TridiagonalComplexMatrix discretize(const Potential& v, double hbar, const GridParams& params);

/// Filtered eigenvalues of the discretised operator. Candidates must (1) match
/// between spacings h and h/2 (then Richardson-extrapolated), (2) stay put
/// when the domain grows by 1.5x at equal h, (3) keep delta(E) > eps_axis,
/// (4) be resolved (max_phase_per_cell) and decay inside the padding.
EigenSet find_eigenvalues_grid(const Potential& v, double hbar, const GridParams& params);

inline EigenSet find_eigenvalues_grid(const Potential& v, double hbar, const GridResolution& resolution = {}) {
  return find_eigenvalues_grid(v, hbar, auto_grid_params(v, hbar, resolution));
}

/// c_{d,l} = (l + (d-1)/2)(l + (d-3)/2) of the centrifugal term hbar^2 c / r^2.
double centrifugal_coefficient(int dimension, int l);

/// Number of linearly independent degree-l spherical harmonics in dimension d.
int harmonic_multiplicity(int dimension, int l);

/// Half-line problem of angular momentum l on (0, R]: the effective
/// potential V(r) + hbar^2 c_{d,l} / r^2 with Dirichlet conditions at r = 0
/// and r = R. For -1/4 <= c < 3/4 the Dirichlet condition at 0 selects the
/// regular (Friedrichs) solution; for c >= 3/4 it is automatic.
struct RadialChannel {
  Potential profile;
  double centrifugal = 0.0;
  double hbar = 1.0;

  Complex effective(double r) const;
};

RadialChannel radial_effective_problem(const RadialPotential& v, int l, double hbar);

/// Grid on (0, R] with N interior points, Dirichlet at both ends.
TridiagonalComplexMatrix discretize_radial(const RadialChannel& channel, double outer, int points);

struct RadialGridParams {
  double outer = 20.0;
  int points = 2047;
  double eps_move = 1e-6;
  double eps_refine = 1e-2;
  double eps_axis = 1e-8;
  double cluster_radius = 1e-9;
  double max_phase_per_cell = 0.5;
  double min_decay_exponent = 2.0;
};

RadialGridParams auto_radial_params(const RadialPotential& v, double hbar, const GridResolution& resolution = {});

/// Filtered eigenvalues of one channel, multiplicity 1 each (before the
/// spherical-harmonic degeneracy).
EigenSet find_channel_eigenvalues(const RadialChannel& channel, const RadialGridParams& params);

/// Union over l = 0..l_max; channel l contributes multiplicity
/// harmonic_multiplicity(d, l). Warns if the l_max channel is non-empty.
EigenSet find_eigenvalues_radial(const RadialPotential& v, double hbar, const RadialGridParams& params);

inline EigenSet find_eigenvalues_radial(const RadialPotential& v, double hbar,
                                        const GridResolution& resolution = {}) {
  return find_eigenvalues_radial(v, hbar, auto_radial_params(v, hbar, resolution));
}

}  // namespace ltlab
