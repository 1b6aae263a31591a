#include "helixqd/tdse.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

#include "helixqd/errors.hpp"

namespace helixqd {

namespace {

// The FFTW planner is not thread safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// In-place real-to-real transform applied to `howmany` interleaved sequences
// of length n (stride howmany), e.g. real and imaginary parts of a complex array.
class R2RPlan {
 public:
  R2RPlan(int n, int howmany, fftw_r2r_kind kind) {
    std::vector<double> scratch(static_cast<std::size_t>(n) * howmany);
    std::lock_guard lock(planner_mutex());
    plan_ = fftw_plan_many_r2r(1, &n, howmany, scratch.data(), nullptr, howmany, 1,
                               scratch.data(), nullptr, howmany, 1, &kind,
                               FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (plan_ == nullptr) {
      throw Error("FFTW could not create a sine/cosine transform plan");
    }
  }
  ~R2RPlan() {
    if (plan_ != nullptr) {
      std::lock_guard lock(planner_mutex());
      fftw_destroy_plan(plan_);
    }
  }
  R2RPlan(const R2RPlan&) = delete;
  R2RPlan& operator=(const R2RPlan&) = delete;

  void execute(double* data) const { fftw_execute_r2r(plan_, data, data); }

 private:
  fftw_plan plan_ = nullptr;
};

double* interleaved(complex* z) { return reinterpret_cast<double*>(z); }

// Unnormalized sine coefficients Y_n = 2 sum_j psi_j sin(pi n j / (N+1)) of the
// interior amplitudes.
std::vector<complex> sine_coefficients(const WaveFunction& psi) {
  const int n = psi.grid.interior_size();
  std::vector<complex> coeff(psi.amplitudes.begin() + 1, psi.amplitudes.end() - 1);
  R2RPlan(n, 2, FFTW_RODFT00).execute(interleaved(coeff.data()));
  return coeff;
}

}  // namespace

Grid make_grid(double s_min, double s_max, int n_points) {
  if (n_points < min_grid_points) {
    throw InvalidArgument("grid needs at least " + std::to_string(min_grid_points) + " points");
  }
  if (!(s_min < s_max) || !std::isfinite(s_min) || !std::isfinite(s_max)) {
    throw InvalidArgument("grid range must satisfy s_min < s_max");
  }
  return Grid{s_min, s_max, n_points};
}

double WaveFunction::norm() const {
  double sum = 0.0;
  for (const complex& a : amplitudes) {
    sum += std::norm(a);
  }
  return sum * grid.spacing();
}

std::vector<double> WaveFunction::density() const {
  std::vector<double> rho(amplitudes.size());
  std::transform(amplitudes.begin(), amplitudes.end(), rho.begin(),
                 [](const complex& a) { return std::norm(a); });
  return rho;
}

WaveFunction init_gaussian(const Grid& grid, const GaussianSpec& spec) {
  if (!(spec.delta_s > 0.0)) {
    throw InvalidArgument("wave packet width must be positive");
  }
  const double reach = packet_edge_widths * spec.delta_s;
  if (spec.s0 - reach < grid.s_min || spec.s0 + reach > grid.s_max) {
    throw InvalidArgument("wave packet touches the grid boundary (needs 8 widths of clearance)");
  }
  WaveFunction psi{grid, std::vector<complex>(static_cast<std::size_t>(grid.n_points))};
  const double prefactor = std::pow(2.0 * std::numbers::pi * spec.delta_s * spec.delta_s, -0.25);
  for (int i = 1; i + 1 < grid.n_points; ++i) {
    const double x = grid.point(i) - spec.s0;
    const double envelope = prefactor * std::exp(-x * x / (4.0 * spec.delta_s * spec.delta_s));
    psi.amplitudes[static_cast<std::size_t>(i)] = envelope * std::polar(1.0, spec.p0 * x);
  }
  const double scale = 1.0 / std::sqrt(psi.norm());
  for (complex& a : psi.amplitudes) {
    a *= scale;
  }
  return psi;
}

std::vector<double> sample_on_grid(const Grid& grid, const std::function<double(double)>& f) {
  std::vector<double> out(static_cast<std::size_t>(grid.n_points));
  for (int i = 0; i < grid.n_points; ++i) {
    out[static_cast<std::size_t>(i)] = f(grid.point(i));
  }
  return out;
}

double sine_wavenumber(const Grid& grid, int mode) {
  return mode * std::numbers::pi / grid.length();
}

struct SplitOperatorPropagator::Plans {
  explicit Plans(int n) : sine(n, 2, FFTW_RODFT00) {}
  R2RPlan sine;
};

SplitOperatorPropagator::SplitOperatorPropagator(const Grid& grid, std::vector<double> potential,
                                                 double mass, double dt)
    : grid_(grid), potential_(std::move(potential)), mass_(mass), dt_(dt) {
  if (static_cast<int>(potential_.size()) != grid_.n_points) {
    throw InvalidArgument("potential samples do not match the grid");
  }
  if (!(mass > 0.0) || !(dt > 0.0)) {
    throw InvalidArgument("propagator needs positive mass and time step");
  }
  const int n = grid_.interior_size();
  half_potential_phase_.resize(static_cast<std::size_t>(n));
  kinetic_phase_.resize(static_cast<std::size_t>(n));
  // RODFT00 applied twice multiplies by 2 (N + 1).
  const double inverse_scale = 1.0 / (2.0 * (n + 1));
  for (int j = 0; j < n; ++j) {
    half_potential_phase_[static_cast<std::size_t>(j)] =
        std::polar(1.0, -0.5 * dt_ * potential_[static_cast<std::size_t>(j) + 1]);
    const double k = sine_wavenumber(grid_, j + 1);
    kinetic_phase_[static_cast<std::size_t>(j)] =
        std::polar(inverse_scale, -k * k * dt_ / mass_);
  }
  plans_ = std::make_unique<Plans>(n);
}

SplitOperatorPropagator::~SplitOperatorPropagator() = default;
SplitOperatorPropagator::SplitOperatorPropagator(SplitOperatorPropagator&&) noexcept = default;
SplitOperatorPropagator& SplitOperatorPropagator::operator=(SplitOperatorPropagator&&) noexcept =
    default;

void SplitOperatorPropagator::step(WaveFunction& psi) const {
  if (psi.grid.n_points != grid_.n_points) {
    throw InvalidArgument("wave function grid does not match the propagator");
  }
  complex* interior = psi.amplitudes.data() + 1;
  const std::size_t n = half_potential_phase_.size();
  for (std::size_t j = 0; j < n; ++j) {
    interior[j] *= half_potential_phase_[j];
  }
  plans_->sine.execute(interleaved(interior));
  for (std::size_t j = 0; j < n; ++j) {
    interior[j] *= kinetic_phase_[j];
  }
  plans_->sine.execute(interleaved(interior));
  for (std::size_t j = 0; j < n; ++j) {
    interior[j] *= half_potential_phase_[j];
  }
}

WaveFunction strang_step(const WaveFunction& psi, std::span<const double> potential, double mass,
                         double dt) {
  const SplitOperatorPropagator propagator(
      psi.grid, std::vector<double>(potential.begin(), potential.end()), mass, dt);
  WaveFunction out = psi;
  propagator.step(out);
  return out;
}

double kinetic_energy(const WaveFunction& psi, double mass) {
  const auto coeff = sine_coefficients(psi);
  double weighted = 0.0;
  double total = 0.0;
  for (std::size_t j = 0; j < coeff.size(); ++j) {
    const double k = sine_wavenumber(psi.grid, static_cast<int>(j) + 1);
    weighted += k * k * std::norm(coeff[j]);
    total += std::norm(coeff[j]);
  }
  return weighted / (mass * total);
}

double total_energy(const WaveFunction& psi, std::span<const double> potential, double mass) {
  if (potential.size() != psi.amplitudes.size()) {
    throw InvalidArgument("potential samples do not match the grid");
  }
  double weight = 0.0;
  double v = 0.0;
  for (std::size_t i = 0; i < potential.size(); ++i) {
    const double rho = std::norm(psi.amplitudes[i]);
    weight += rho;
    v += potential[i] * rho;
  }
  return kinetic_energy(psi, mass) + v / weight;
}

double momentum_expectation(const WaveFunction& psi) {
  const int n = psi.grid.interior_size();
  const auto coeff = sine_coefficients(psi);
  // psi_j = sum_n b_n sin(k_n x_j), b_n = Y_n / (N + 1); the derivative
  // sum_n b_n k_n cos(k_n x_j) is a REDFT00 of size N + 2 with zero end terms.
  std::vector<complex> cosine(static_cast<std::size_t>(n) + 2, complex{});
  for (int j = 0; j < n; ++j) {
    const double k = sine_wavenumber(psi.grid, j + 1);
    cosine[static_cast<std::size_t>(j) + 1] = 0.5 * k * coeff[static_cast<std::size_t>(j)] / double(n + 1);
  }
  R2RPlan(n + 2, 2, FFTW_REDFT00).execute(interleaved(cosine.data()));
  complex acc{};
  double weight = 0.0;
  for (std::size_t i = 0; i < psi.amplitudes.size(); ++i) {
    acc += std::conj(psi.amplitudes[i]) * cosine[i];
    weight += std::norm(psi.amplitudes[i]);
  }
  // <p> = -i <psi|psi'>
  return (complex(0.0, -1.0) * acc).real() / weight;
}

long PropagationConfig::step_count() const { return std::lround(t_final / dt); }

void PropagationConfig::validate() const {
  if (!(dt > 0.0) || !(dt <= t_final)) {
    throw InvalidArgument("propagation requires 0 < dt <= t_final");
  }
  if (observable_stride < 1) {
    throw InvalidArgument("observable_stride must be >= 1");
  }
  for (double t : snapshot_times) {
    if (t < 0.0 || t > t_final) {
      throw InvalidArgument("snapshot time outside [0, t_final]");
    }
  }
}

bool edge_contaminated(const WaveFunction& psi) {
  const int n = psi.grid.n_points;
  const int watch = std::min(edge_watch_points, n / 2);
  for (int i = 0; i < watch; ++i) {
    if (std::norm(psi.amplitudes[static_cast<std::size_t>(i)]) > edge_density_limit ||
        std::norm(psi.amplitudes[static_cast<std::size_t>(n - 1 - i)]) > edge_density_limit) {
      return true;
    }
  }
  return false;
}

PropagationResult propagate(const WaveFunction& psi0, std::span<const double> potential,
                            double mass, const PropagationConfig& config, PropagationSink& sink) {
  config.validate();
  const SplitOperatorPropagator propagator(
      psi0.grid, std::vector<double>(potential.begin(), potential.end()), mass, config.dt);
  const long steps = config.step_count();

  // (step index, snapshot index) sorted by step.
  std::vector<std::pair<long, std::size_t>> snapshots;
  for (std::size_t i = 0; i < config.snapshot_times.size(); ++i) {
    const long at = std::clamp(std::lround(config.snapshot_times[i] / config.dt), 0L, steps);
    snapshots.emplace_back(at, i);
  }
  std::stable_sort(snapshots.begin(), snapshots.end());

  PropagationResult result{psi0, std::vector<double>(config.snapshot_times.size()), {}, steps};
  WaveFunction& psi = result.final_state;
  auto next_snapshot = snapshots.begin();

  for (long step = 0;; ++step) {
    const double t = static_cast<double>(step) * config.dt;
    for (; next_snapshot != snapshots.end() && next_snapshot->first == step; ++next_snapshot) {
      result.snapshot_times[next_snapshot->second] = t;
      sink.snapshot(next_snapshot->second, t, psi);
    }
    if (step % config.observable_stride == 0 || step == steps) {
      sink.record(t, psi);
      if (!result.contamination_time && edge_contaminated(psi)) {
        result.contamination_time = t;
        sink.warning(t, "wave function density near the grid edge exceeds 1e-6; later data are "
                        "affected by box reflections");
      }
    }
    if (step == steps) {
      break;
    }
    propagator.step(psi);
  }
  return result;
}

}  // namespace helixqd
