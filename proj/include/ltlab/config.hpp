#pragma once

#include <cstdint>
#include <string>
#include <variant>

#include <json.hpp>

#include "ltlab/eigenset.hpp"
#include "ltlab/functionals.hpp"
#include "ltlab/gridsolve.hpp"
#include "ltlab/potentials.hpp"
#include "ltlab/secular.hpp"

namespace ltlab {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;
inline constexpr std::uint64_t kDefaultSeed = 20240601;

using AnyPotential = std::variant<Potential, RadialPotential>;

int dimension_of(const AnyPotential& v);

/// Solver choice plus its parameters. Regions and grids are rescaled per hbar
/// unless fixed here.
struct SolverConfig {
  SolverTag kind = SolverTag::secular;
  double region_constant = 0.6;
  std::optional<SearchRegion> region;
  double axis_exclusion = kDefaultAxisExclusion;
  GridResolution resolution;
};

/// Geometric grid from hbar_max down to hbar_min.
struct HbarGrid {
  double hbar_max = 1.0;
  double hbar_min = 0.1;
  int points = 2;

  void validate() const;
  std::vector<double> values() const;
};

/// Result of one solve, with diagnostics.
struct SolveOutcome {
  EigenSet eigs;
  SearchRegion region;  ///< secular search region; zero for grid solvers
};

SolveOutcome solve(const AnyPotential& v, double hbar, const SolverConfig& solver, std::uint64_t seed);
double evaluate(const FunctionalSpec& spec, const EigenSet& eigs, const AnyPotential& v, double hbar);

// JSON readers. Errors are InputError naming the offending field path.
Complex complex_from_json(const json& j, const std::string& field);
json complex_to_json(Complex z);
AnyPotential parse_potential(const json& j, const std::string& field = "potential");
SolverConfig parse_solver(const json& j, const std::string& field = "solver");
HbarGrid parse_hbar_grid(const json& j, const std::string& field = "hbar");
FunctionalSpec parse_functional(const json& j, int dimension, const std::string& field);

json read_json_file(const std::string& path);
/// Rejects a missing or foreign schema_version.
void check_schema_version(const json& j, const std::string& what);

/// FNV-1a 64 of the canonical dump, as 16 hex digits.
std::string config_hash(const json& j);

/// Default directory for output files: $LTLAB_OUTPUT_DIR or ".".
std::string default_output_directory();

}  // namespace ltlab
