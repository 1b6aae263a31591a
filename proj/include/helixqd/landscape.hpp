#pragma once

#include <vector>

#include "helixqd/helix_potential.hpp"

namespace helixqd {

// Stationary points of V on s > 0. Minima and maxima interleave starting with
// a minimum: min_1 < max_1 < min_2 < ...
struct ExtremaSet {
  std::vector<double> minima;
  std::vector<double> maxima;
  HelixParams params;

  std::size_t well_count() const { return minima.size(); }
};

// Residual of the stationarity condition sin(s/beta) + h^2 s / (4 pi^2 R^2 beta).
double extremum_residual(const HelixParams& params, double s);

ExtremaSet find_extrema(const HelixParams& params);
int count_wells(const HelixParams& params);

// Ratios r = h/R at which the n-th well appears, for n = 1..n_max, decreasing.
std::vector<double> bifurcation_ratios(int n_max);

// Small-ratio approximation sqrt(8 pi / (2n + 1)). Odd n = 2k - 1 approximates
// the k-th bifurcation ratio.
double asymptotic_ratio(int n);

struct WellSegment {
  int index = 0;  // 1-based, counted outward from the Coulomb wall
  double left_boundary = 0.0;
  double right_boundary = 0.0;
  double minimum_position = 0.0;
  double minimum_value = 0.0;
  double threshold = 0.0;  // V at the outer flanking maximum

  double depth() const { return threshold - minimum_value; }
  double width() const { return right_boundary - left_boundary; }
};

std::vector<WellSegment> segment_wells(const ExtremaSet& extrema);

// One well cut out of the landscape: V between the two points where it equals
// the threshold, the constant threshold everywhere else.
class IsolatedWell {
 public:
  IsolatedWell(const WellSegment& segment, const HelixParams& params);

  double operator()(double s) const;

  const WellSegment& segment() const { return segment_; }
  const HelixParams& params() const { return params_; }
  double plateau() const { return segment_.threshold; }
  double inner_edge() const { return inner_edge_; }
  double outer_edge() const { return outer_edge_; }

 private:
  WellSegment segment_;
  HelixParams params_;
  double inner_edge_;
  double outer_edge_;
};

inline IsolatedWell isolate_well(const WellSegment& segment, const HelixParams& params) {
  return IsolatedWell(segment, params);
}

}  // namespace helixqd
