#pragma once

#include <string>
#include <vector>

#include "ltlab/core.hpp"

namespace ltlab {

using ComplexEnergy = Complex;

/// Distance from E to the half-line [0, inf).
inline double delta(ComplexEnergy e) { return e.real() <= 0.0 ? std::abs(e) : std::abs(e.imag()); }

inline constexpr double kDefaultAxisExclusion = 1e-10;

enum class SolverTag { secular, grid, radial };

std::string to_string(SolverTag tag);
SolverTag solver_tag_from_string(const std::string& name);

struct EigenEntry {
  ComplexEnergy energy;
  int multiplicity = 1;
  double error_estimate = 0.0;
};

/// Eigenvalues with algebraic multiplicity, sorted by (re, im).
struct EigenSet {
  std::vector<EigenEntry> entries;
  double hbar = 1.0;
  SolverTag solver = SolverTag::secular;
  std::vector<std::string> warnings;
  /// Grid solvers: raw candidates rejected by the pollution filter.
  int discarded_candidates = 0;

  int total_multiplicity() const;
  /// Sorts entries and checks multiplicity >= 1 and delta(E) > axis_exclusion.
  void normalize(double axis_exclusion);
};

/// Table with columns re,im,multiplicity,error_estimate at 17 digits; a
/// leading "# hbar=... solver=..." line carries the metadata.
std::string to_csv(const EigenSet& eigs);
EigenSet eigenset_from_csv(const std::string& text);

}  // namespace ltlab
