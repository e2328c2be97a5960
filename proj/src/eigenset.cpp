#include "ltlab/eigenset.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

namespace ltlab {

std::string to_string(SolverTag tag) {
  switch (tag) {
    case SolverTag::secular:
      return "secular";
    case SolverTag::grid:
      return "grid";
    case SolverTag::radial:
      return "radial";
  }
  return "unknown";
}

SolverTag solver_tag_from_string(const std::string& name) {
  if (name == "secular") return SolverTag::secular;
  if (name == "grid") return SolverTag::grid;
  if (name == "radial") return SolverTag::radial;
  throw InputError("unknown solver '" + name + "' (expected secular, grid or radial)");
}

int EigenSet::total_multiplicity() const {
  int total = 0;
  for (const auto& e : entries) total += e.multiplicity;
  return total;
}

void EigenSet::normalize(double axis_exclusion) {
  std::erase_if(entries, [axis_exclusion](const EigenEntry& e) { return !(delta(e.energy) > axis_exclusion); });
  for (const auto& e : entries) {
    if (e.multiplicity < 1) throw ComputationError("eigenvalue with non-positive multiplicity");
  }
  std::sort(entries.begin(), entries.end(), [](const EigenEntry& a, const EigenEntry& b) {
    if (a.energy.real() != b.energy.real()) return a.energy.real() < b.energy.real();
    return a.energy.imag() < b.energy.imag();
  });
}

std::string to_csv(const EigenSet& eigs) {
  std::ostringstream out;
  out << "# hbar=" << format_double(eigs.hbar) << " solver=" << to_string(eigs.solver) << '\n';
  out << "re,im,multiplicity,error_estimate\n";
  for (const auto& e : eigs.entries) {
    out << format_double(e.energy.real()) << ',' << format_double(e.energy.imag()) << ',' << e.multiplicity << ','
        << format_double(e.error_estimate) << '\n';
  }
  return out.str();
}

namespace {

double cell_number(const std::string& cell, const std::string& column, int row) {
  char* end = nullptr;
  const double x = std::strtod(cell.c_str(), &end);
  if (cell.empty() || end != cell.c_str() + cell.size()) {
    throw InputError("eigenvalue table: bad value '" + cell + "' in column '" + column + "' at row " +
                     std::to_string(row));
  }
  return x;
}

}  // namespace

EigenSet eigenset_from_csv(const std::string& text) {
  EigenSet eigs;
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> header;
  int row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    if (line[0] == '#') {
      std::istringstream tokens(line.substr(1));
      std::string token;
      while (tokens >> token) {
        const auto eq = token.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = token.substr(0, eq), value = token.substr(eq + 1);
        if (key == "hbar") eigs.hbar = cell_number(value, "hbar", 0);
        if (key == "solver") eigs.solver = solver_tag_from_string(value);
      }
      continue;
    }
    std::istringstream split(line);
    std::string cell;
    while (std::getline(split, cell, ',')) cells.push_back(cell);
    if (header.empty()) {
      header = cells;
      for (const char* need : {"re", "im"}) {
        if (std::find(header.begin(), header.end(), need) == header.end()) {
          throw InputError(std::string("eigenvalue table: missing column '") + need + "'");
        }
      }
      continue;
    }
    ++row;
    if (cells.size() != header.size()) {
      throw InputError("eigenvalue table: row " + std::to_string(row) + " has " + std::to_string(cells.size()) +
                       " cells, expected " + std::to_string(header.size()));
    }
    EigenEntry e;
    double re = 0.0, im = 0.0;
    for (std::size_t k = 0; k < header.size(); ++k) {
      if (header[k] == "re") re = cell_number(cells[k], "re", row);
      if (header[k] == "im") im = cell_number(cells[k], "im", row);
      if (header[k] == "multiplicity") {
        const double m = cell_number(cells[k], "multiplicity", row);
        if (m != static_cast<int>(m)) throw InputError("eigenvalue table: non-integer multiplicity at row " + std::to_string(row));
        e.multiplicity = static_cast<int>(m);
      }
      if (header[k] == "error_estimate") e.error_estimate = cell_number(cells[k], "error_estimate", row);
    }
    e.energy = {re, im};
    if (e.multiplicity < 1) throw InputError("eigenvalue table: multiplicity < 1 at row " + std::to_string(row));
    eigs.entries.push_back(e);
  }
  if (header.empty()) throw InputError("eigenvalue table: missing header line");
  return eigs;
}

}  // namespace ltlab
