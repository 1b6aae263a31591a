#include "helixqd/helix_potential.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "helixqd/errors.hpp"

namespace helixqd {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

void require_nonzero(double s, const char* what) {
  if (s == 0.0) {
    throw SingularInput(std::string(what) + ": potential is singular at s = 0");
  }
}

// Squared 3D distance between the two particles. 1 - cos(u) is evaluated as
// 2 sin^2(u/2) so small separations keep full relative precision.
double squared_distance(const HelixParams& p, double beta, double s) {
  const double half_phase = std::sin(0.5 * s / beta);
  const double axial = p.pitch / (two_pi * beta);
  return 4.0 * p.radius * p.radius * half_phase * half_phase + axial * axial * s * s;
}

}  // namespace

HelixParams HelixParams::make(double pitch, double radius, double mass) {
  if (!(pitch > 0.0) || !(radius > 0.0) || !(mass > 0.0) || !std::isfinite(pitch) ||
      !std::isfinite(radius) || !std::isfinite(mass)) {
    throw InvalidArgument("helix parameters require h > 0, R > 0, M > 0");
  }
  return HelixParams{pitch, radius, mass};
}

double HelixParams::beta() const { return beta_of(pitch, radius); }

double beta_of(double pitch, double radius) { return std::hypot(pitch / two_pi, radius); }

double potential_value(const HelixParams& p, double s) {
  require_nonzero(s, "potential_value");
  return 1.0 / std::sqrt(squared_distance(p, p.beta(), s));
}

double potential_derivative(const HelixParams& p, double s) {
  require_nonzero(s, "potential_derivative");
  const double beta = p.beta();
  const double d2 = squared_distance(p, beta, s);
  const double axial = p.pitch / (two_pi * beta);
  // d(d2)/ds / 2
  const double half_slope = p.radius * p.radius * std::sin(s / beta) / beta + axial * axial * s;
  return -half_slope / (d2 * std::sqrt(d2));
}

double scaled_potential_value(double ratio, double s_scaled) {
  if (!(ratio > 0.0)) {
    throw InvalidArgument("scaled_potential_value: ratio must be positive");
  }
  require_nonzero(s_scaled, "scaled_potential_value");
  const double q = ratio / two_pi;
  const double half_phase = std::sin(0.5 * s_scaled);
  const double d2 = 4.0 * half_phase * half_phase + q * q * s_scaled * s_scaled;
  return std::sqrt(1.0 + q * q) / std::sqrt(d2);
}

HelixPoint cartesian_point(const HelixParams& p, double t) {
  const double phase = two_pi * t / p.pitch;
  const double stretch = std::sqrt(1.0 + std::pow(two_pi * p.radius / p.pitch, 2));
  return HelixPoint{{p.radius * std::cos(phase), p.radius * std::sin(phase), t}, stretch * t};
}

RegularizedPotential::RegularizedPotential(const HelixParams& params, double s_cut,
                                           InteractionKind kind)
    : params_(params), s_cut_(s_cut), kind_(kind) {
  if (!(s_cut > 0.0) || !std::isfinite(s_cut)) {
    throw InvalidArgument("regularization cutoff must be positive");
  }
  v_cap_ = bare(s_cut_);
}

double RegularizedPotential::bare(double s) const {
  if (kind_ == InteractionKind::coulomb) {
    require_nonzero(s, "coulomb potential");
    return 1.0 / std::abs(s);
  }
  return potential_value(params_, s);
}

double RegularizedPotential::operator()(double s) const {
  if (std::abs(s) < s_cut_) {
    return v_cap_;
  }
  return bare(s);
}

}  // namespace helixqd
