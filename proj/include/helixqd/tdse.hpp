#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace helixqd {

using complex = std::complex<double>;

// Uniform grid including both end points; the wave function is pinned to zero
// at s_min and s_max (sine basis over the interior points).
struct Grid {
  double s_min = 0.0;
  double s_max = 0.0;
  int n_points = 0;

  double length() const { return s_max - s_min; }
  double spacing() const { return length() / (n_points - 1); }
  double point(int i) const { return s_min + i * spacing(); }
  int interior_size() const { return n_points - 2; }
};

inline constexpr int min_grid_points = 64;

Grid make_grid(double s_min, double s_max, int n_points);

struct WaveFunction {
  Grid grid;
  std::vector<complex> amplitudes;

  // Riemann sum of |psi|^2 * spacing.
  double norm() const;
  std::vector<double> density() const;
};

struct GaussianSpec {
  double s0 = 0.0;
  double delta_s = 1.0;  // position standard deviation of |psi|^2
  double p0 = 0.0;

  bool operator==(const GaussianSpec&) const = default;
};

// Packet must keep this many widths from both grid edges.
inline constexpr double packet_edge_widths = 8.0;

// psi(s) = (2 pi ds^2)^(-1/4) exp(-(s - s0)^2 / (4 ds^2)) exp(i p0 (s - s0)),
// renormalized on the grid.
WaveFunction init_gaussian(const Grid& grid, const GaussianSpec& spec);

std::vector<double> sample_on_grid(const Grid& grid, const std::function<double(double)>& f);

// Wavenumber n pi / L of sine mode n = 1..n_points-2.
double sine_wavenumber(const Grid& grid, int mode);

// Second-order split-operator propagator for H = p^2 / M + V(s):
//   psi <- e^{-i V dt/2} S^-1 e^{-i k^2 dt / M} S e^{-i V dt/2} psi
// with S the discrete sine transform on the interior points.
class SplitOperatorPropagator {
 public:
  SplitOperatorPropagator(const Grid& grid, std::vector<double> potential, double mass, double dt);
  ~SplitOperatorPropagator();
  SplitOperatorPropagator(SplitOperatorPropagator&&) noexcept;
  SplitOperatorPropagator& operator=(SplitOperatorPropagator&&) noexcept;

  void step(WaveFunction& psi) const;

  const Grid& grid() const { return grid_; }
  std::span<const double> potential() const { return potential_; }
  double mass() const { return mass_; }
  double dt() const { return dt_; }

 private:
  struct Plans;

  Grid grid_;
  std::vector<double> potential_;
  double mass_;
  double dt_;
  std::vector<complex> half_potential_phase_;
  std::vector<complex> kinetic_phase_;  // includes the inverse-transform scale
  std::unique_ptr<Plans> plans_;
};

// One Strang step; builds a throwaway propagator.
WaveFunction strang_step(const WaveFunction& psi, std::span<const double> potential, double mass,
                         double dt);

// <psi| p^2/M + V |psi> / <psi|psi>, kinetic part from the sine coefficients.
double total_energy(const WaveFunction& psi, std::span<const double> potential, double mass);
double kinetic_energy(const WaveFunction& psi, double mass);
// <psi| -i d/ds |psi> / <psi|psi> with the derivative of the sine series.
double momentum_expectation(const WaveFunction& psi);

struct PropagationConfig {
  double dt = 0.02;
  double t_final = 1000.0;
  std::vector<double> snapshot_times;
  int observable_stride = 50;

  long step_count() const;
  void validate() const;
};

// Receives observable records and density snapshots during propagate().
class PropagationSink {
 public:
  virtual ~PropagationSink() = default;
  virtual void record(double t, const WaveFunction& psi) = 0;
  virtual void snapshot(std::size_t index, double t, const WaveFunction& psi) = 0;
  virtual void warning(double t, const std::string& message) = 0;
};

// Points next to either edge watched for reflections off the box walls.
inline constexpr int edge_watch_points = 10;
inline constexpr double edge_density_limit = 1e-6;

struct PropagationResult {
  WaveFunction final_state;
  std::vector<double> snapshot_times;  // realized, on step boundaries
  std::optional<double> contamination_time;
  long steps = 0;
};

// Density at the edge points exceeds edge_density_limit.
bool edge_contaminated(const WaveFunction& psi);

PropagationResult propagate(const WaveFunction& psi0, std::span<const double> potential,
                            double mass, const PropagationConfig& config, PropagationSink& sink);

}  // namespace helixqd
