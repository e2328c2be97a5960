#pragma once

#include <vector>

#include "ltlab/contour.hpp"
#include "ltlab/eigenset.hpp"
#include "ltlab/potentials.hpp"

namespace ltlab {

struct SecularOptions {
  /// Eigenvalues must satisfy delta(E) > axis_exclusion.
  double axis_exclusion = kDefaultAxisExclusion;
  /// C in the search radius (C * hbar^-1 * int |V|)^2.
  double region_constant = 0.6;
  ZeroSearchOptions search;
};

/// Matching function W(E) for -hbar^2 d^2/dx^2 + V with V a step potential,
/// together with W'/W. The left-decaying solution exp(k0 x), k0 = sqrt(-E)/hbar
/// with Re k0 > 0, and its right-decaying partner are carried across the pieces
/// by 2x2 transfer matrices and W is their Wronskian, equal to
/// psi'(x_n) + k0 psi(x_n) up to a positive factor. W vanishes exactly at
/// eigenvalues. Positive rescalings (exp(-|Re k_j| w_j) per piece, and the
/// choice of matching breakpoint) leave zeros, arguments and W'/W intact.
AnalyticSample matching_function(const StepPotential& v, double hbar, ComplexEnergy e);

struct CutFreePiece {
  SearchRegion region;
  /// SearchRegion::Edge flags of edges lying on the excluded strip.
  unsigned edges_on_strip = 0;
};

/// The pieces of region that avoid the strip {|Im E| <= eps, Re E >= -eps}
/// around the cut [0, inf).
std::vector<CutFreePiece> split_around_cut(const SearchRegion& region, double axis_exclusion);

/// Number of eigenvalues (with multiplicity) in region minus the cut strip.
int count_zeros(const SearchRegion& region, const StepPotential& v, double hbar, const SecularOptions& options = {});

/// Square [-R, R]^2 with R = (C hbar^-1 int|V|)^2; degenerate for V = 0.
SearchRegion default_region(const StepPotential& v, double hbar, double region_constant = 0.6);

EigenSet find_eigenvalues(const StepPotential& v, double hbar, const SearchRegion& region,
                          const SecularOptions& options = {});

inline EigenSet find_eigenvalues(const StepPotential& v, double hbar, const SecularOptions& options = {}) {
  return find_eigenvalues(v, hbar, default_region(v, hbar, options.region_constant), options);
}

}  // namespace ltlab
