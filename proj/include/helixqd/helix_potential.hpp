#pragma once

#include <array>

namespace helixqd {

// Geometry of the helix and the common particle mass (hbar = e = 1).
// Construct through make() so the positivity invariants are checked.
struct HelixParams {
  double pitch = 0.0;   // h
  double radius = 0.0;  // R
  double mass = 1.0;    // M

  static HelixParams make(double pitch, double radius, double mass = 1.0);

  // sqrt((h/2pi)^2 + R^2): converts arc length into winding phase s/beta.
  double beta() const;
  // h/R, the only combination the landscape shape depends on.
  double ratio() const { return pitch / radius; }
};

double beta_of(double pitch, double radius);
inline double beta_of(const HelixParams& p) { return beta_of(p.pitch, p.radius); }

// Coulomb repulsion of two unit charges on the helix as a function of their
// arc-length separation s. Throws SingularInput at s == 0.
double potential_value(const HelixParams& p, double s);
double potential_derivative(const HelixParams& p, double s);

// beta * V(beta * s') expressed through the ratio r = h/R alone.
double scaled_potential_value(double ratio, double s_scaled);

struct HelixPoint {
  std::array<double, 3> xyz;
  double arc_length;
};

// Point on the helix at winding parameter t (z = t).
HelixPoint cartesian_point(const HelixParams& p, double t);

// Which bare interaction the regularized potential wraps.
enum class InteractionKind { helical, coulomb };

// Potential with the s = 0 singularity replaced by a flat cap:
// V_reg(s) = V(s_cut) for |s| < s_cut, V(s) otherwise.
class RegularizedPotential {
 public:
  static constexpr double default_cutoff = 1.0;

  RegularizedPotential(const HelixParams& params, double s_cut = default_cutoff,
                       InteractionKind kind = InteractionKind::helical);

  double operator()(double s) const;
  double bare(double s) const;

  const HelixParams& params() const { return params_; }
  double cutoff() const { return s_cut_; }
  double cap() const { return v_cap_; }
  InteractionKind kind() const { return kind_; }

 private:
  HelixParams params_;
  double s_cut_;
  double v_cap_;
  InteractionKind kind_;
};

inline double regularized_value(const RegularizedPotential& reg, double s) { return reg(s); }

}  // namespace helixqd
