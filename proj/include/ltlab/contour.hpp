#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "ltlab/core.hpp"

namespace ltlab {

/// Axis-aligned rectangle [re_min, re_max] x [im_min, im_max].
struct SearchRegion {
  double re_min = 0.0;
  double re_max = 0.0;
  double im_min = 0.0;
  double im_max = 0.0;

  bool is_degenerate() const { return !(re_min < re_max) || !(im_min < im_max); }
  double width() const { return re_max - re_min; }
  double height() const { return im_max - im_min; }
  double diameter() const { return std::hypot(width(), height()); }
  Complex center() const { return {0.5 * (re_min + re_max), 0.5 * (im_min + im_max)}; }
  bool contains(Complex z, double margin = 0.0) const {
    return z.real() >= re_min - margin && z.real() <= re_max + margin && z.imag() >= im_min - margin &&
           z.imag() <= im_max + margin;
  }
  enum Edge : unsigned { kReMin = 1, kReMax = 2, kImMin = 4, kImMax = 8 };
  /// Same center, both sides scaled by factor; edges flagged in fixed_edges
  /// stay in place and the opposite edge absorbs the growth.
  SearchRegion dilated(double factor, unsigned fixed_edges = 0) const;
};

/// Value and logarithmic derivative f'/f of an analytic function. The value
/// may carry any smooth positive real normalisation: only its argument is
/// used for counting.
struct AnalyticSample {
  Complex value;
  Complex log_derivative;
};

using AnalyticFunction = std::function<AnalyticSample(Complex)>;

struct ContourOptions {
  /// A zero closer than this to the contour invalidates the count.
  double min_distance = 1e-12;
  int max_retries = 10;
  std::uint64_t seed = 0x6c746c6162ULL;
  /// Maximal distance of the winding integral to the nearest integer.
  double winding_tolerance = 0.25;
  /// Each contour segment is split until |f'/f| * length stays below this.
  double max_log_step = 0.5;
  /// SearchRegion::Edge flags kept in place by retry dilations.
  unsigned fixed_edges = 0;
};

/// Winding number of f along the boundary of region, or nullopt if a zero of
/// f lies within min_distance of the boundary.
std::optional<int> winding_number(const SearchRegion& region, const AnalyticFunction& f,
                                  const ContourOptions& options = {});

/// Number of zeros (with multiplicity) inside region. If the boundary passes
/// too close to a zero the rectangle is dilated by a seeded random factor in
/// [1.01, 1.05] and retried. `used` receives the rectangle actually counted.
int count_zeros(const SearchRegion& region, const AnalyticFunction& f, const ContourOptions& options = {},
                SearchRegion* used = nullptr);

struct ZeroEstimate {
  Complex location;
  int multiplicity = 1;
  double error_estimate = 0.0;
};

struct ZeroSearchOptions {
  ContourOptions contour;
  /// Newton stops once |step| <= newton_tolerance * max(1, |z|).
  double newton_tolerance = 1e-12;
  int newton_max_iterations = 60;
  /// Rectangles with count >= 2 below this diameter (relative to max(1,|z|))
  /// are reported as one zero of that multiplicity.
  double cluster_diameter = 1e-11;
};

/// Isolates every zero in region by recursive bisection on zero counts and
/// refines each by Newton's method. The reported multiplicities sum to the
/// count of the whole region.
std::vector<ZeroEstimate> find_zeros(const SearchRegion& region, const AnalyticFunction& f,
                                     const ZeroSearchOptions& options = {});

}  // namespace ltlab
