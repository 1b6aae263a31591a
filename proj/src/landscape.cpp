#include "helixqd/landscape.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "helixqd/errors.hpp"

namespace helixqd {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double two_pi = 2.0 * pi;
constexpr double bisection_tolerance = 1e-12;

// Stationarity condition in the winding phase u = s/beta:
//   G(u) = sin(u) + slope * u,  slope = (h / 2 pi R)^2.
// V' has the opposite sign of G, so a + to - crossing of G is a minimum of V.
double slope_of(const HelixParams& p) {
  const double q = p.ratio() / two_pi;
  return q * q;
}

double phase_residual(double slope, double u) { return std::sin(u) + slope * u; }

template <class F>
double bisect(F&& f, double lo, double hi, double tolerance) {
  double f_lo = f(lo);
  for (int iter = 0; iter < 200 && hi - lo > tolerance; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = f(mid);
    if (f_mid == 0.0) {
      return mid;
    }
    if ((f_mid < 0.0) == (f_lo < 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Monotone pieces of G are delimited by the critical points cos(u) = -slope.
struct Piece {
  double lo;
  double hi;
  bool decreasing;
};

std::vector<Piece> monotone_pieces(double slope) {
  std::vector<Piece> pieces;
  if (slope >= 1.0) {
    return pieces;
  }
  const double theta = std::acos(-slope);
  // |sin u| <= 1 bounds every root by u <= 1/slope.
  const double u_last = 1.0 / slope;
  for (double base = 0.0; base + theta <= u_last + two_pi; base += two_pi) {
    pieces.push_back({base + theta, base + two_pi - theta, true});
    pieces.push_back({base + two_pi - theta, base + two_pi + theta, false});
  }
  return pieces;
}

}  // namespace

double extremum_residual(const HelixParams& params, double s) {
  const double beta = params.beta();
  const double coefficient =
      params.pitch * params.pitch / (4.0 * pi * pi * params.radius * params.radius * beta);
  return std::sin(s / beta) + coefficient * s;
}

ExtremaSet find_extrema(const HelixParams& params) {
  ExtremaSet out;
  out.params = params;
  const double slope = slope_of(params);
  const double beta = params.beta();
  const auto g = [slope](double u) { return phase_residual(slope, u); };

  for (const Piece& piece : monotone_pieces(slope)) {
    const double g_lo = g(piece.lo);
    const double g_hi = g(piece.hi);
    if ((g_lo > 0.0) == (g_hi > 0.0) || g_lo == 0.0) {
      continue;
    }
    double u = bisect(g, piece.lo, piece.hi, bisection_tolerance / beta);
    // Guarded Newton polish: keep the step only if it stays in the bracket
    // and lowers the residual.
    const double derivative = std::cos(u) + slope;
    if (derivative != 0.0) {
      const double polished = u - g(u) / derivative;
      if (polished > piece.lo && polished < piece.hi && std::abs(g(polished)) < std::abs(g(u))) {
        u = polished;
      }
    }
    const double s = u * beta;

    const double delta = 1e-4 * beta;
    const double v = potential_value(params, s);
    const double v_left = potential_value(params, s - delta);
    const double v_right = potential_value(params, s + delta);
    bool is_minimum = piece.decreasing;
    if (v_left > v && v_right > v) {
      is_minimum = true;
    } else if (v_left < v && v_right < v) {
      is_minimum = false;
    }
    (is_minimum ? out.minima : out.maxima).push_back(s);
  }

  if (out.minima.size() != out.maxima.size()) {
    throw Error("find_extrema: unpaired stationary points (parameters at a bifurcation?)");
  }
  for (std::size_t k = 0; k < out.minima.size(); ++k) {
    const bool ordered = out.minima[k] < out.maxima[k] &&
                         (k + 1 == out.minima.size() || out.maxima[k] < out.minima[k + 1]);
    if (!ordered) {
      throw Error("find_extrema: extrema do not interleave");
    }
  }
  return out;
}

int count_wells(const HelixParams& params) {
  return static_cast<int>(find_extrema(params).well_count());
}

std::vector<double> bifurcation_ratios(int n_max) {
  if (n_max < 1) {
    throw InvalidArgument("bifurcation_ratios: n_max must be >= 1");
  }
  // With u = sqrt((2 pi / r)^4 - 1) the emergence condition reads
  //   cos(u) = -1 / sqrt(1 + u^2),
  // and the tangency lies on the negative half of the sine, so the k-th root
  // sits in the third quadrant (pi, 3 pi / 2) + 2 pi (k - 1).
  const auto condition = [](double u) { return std::cos(u) + 1.0 / std::sqrt(1.0 + u * u); };
  std::vector<double> ratios;
  ratios.reserve(static_cast<std::size_t>(n_max));
  for (int k = 1; k <= n_max; ++k) {
    const double lo = pi + two_pi * (k - 1);
    const double hi = lo + 0.5 * pi;
    const double u = bisect(condition, lo, hi, 1e-14 * hi);
    ratios.push_back(two_pi * std::pow(1.0 + u * u, -0.25));
  }

  for (std::size_t i = 0; i < ratios.size(); ++i) {
    double probe = 1e-3;
    if (i + 1 < ratios.size()) {
      probe = std::min(probe, (ratios[i] - ratios[i + 1]) / 3.0);
    }
    if (i > 0) {
      probe = std::min(probe, (ratios[i - 1] - ratios[i]) / 3.0);
    }
    const int above = count_wells(HelixParams::make(ratios[i] + probe, 1.0));
    const int below = count_wells(HelixParams::make(ratios[i] - probe, 1.0));
    if (above != static_cast<int>(i) || below != static_cast<int>(i) + 1) {
      throw Error("bifurcation_ratios: well count does not step at r = " +
                  std::to_string(ratios[i]));
    }
  }
  return ratios;
}

double asymptotic_ratio(int n) {
  if (n < 1) {
    throw InvalidArgument("asymptotic_ratio: n must be >= 1");
  }
  return std::sqrt(8.0 * pi / (2.0 * n + 1.0));
}

std::vector<WellSegment> segment_wells(const ExtremaSet& extrema) {
  const HelixParams& p = extrema.params;
  std::vector<WellSegment> wells;
  for (std::size_t k = 0; k < extrema.well_count(); ++k) {
    WellSegment w;
    w.index = static_cast<int>(k) + 1;
    w.minimum_position = extrema.minima[k];
    w.minimum_value = potential_value(p, w.minimum_position);
    w.right_boundary = extrema.maxima[k];
    w.threshold = potential_value(p, w.right_boundary);
    if (k == 0) {
      // Inner point of the Coulomb wall at the height of the first maximum.
      const auto excess = [&](double s) { return potential_value(p, s) - w.threshold; };
      double lo = 0.5 * w.minimum_position;
      while (excess(lo) <= 0.0) {
        lo *= 0.5;
      }
      w.left_boundary = bisect(excess, lo, w.minimum_position, bisection_tolerance);
    } else {
      w.left_boundary = extrema.maxima[k - 1];
    }
    wells.push_back(w);
  }
  return wells;
}

IsolatedWell::IsolatedWell(const WellSegment& segment, const HelixParams& params)
    : segment_(segment), params_(params), outer_edge_(segment.right_boundary) {
  if (!(segment.left_boundary < segment.minimum_position &&
        segment.minimum_position < segment.right_boundary)) {
    throw InvalidArgument("isolate_well: malformed well segment");
  }
  if (segment.index == 1) {
    inner_edge_ = segment.left_boundary;
  } else {
    const auto excess = [&](double s) { return potential_value(params_, s) - segment_.threshold; };
    inner_edge_ = bisect(excess, segment.left_boundary, segment.minimum_position,
                         bisection_tolerance);
  }
}

double IsolatedWell::operator()(double s) const {
  if (s <= inner_edge_ || s >= outer_edge_) {
    return segment_.threshold;
  }
  return std::min(potential_value(params_, s), segment_.threshold);
}

}  // namespace helixqd
