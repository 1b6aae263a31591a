#include "helixqd/observables.hpp"

#include <algorithm>
#include <cmath>

namespace helixqd {

namespace {

// Fraction of grid cell i inside [lo, hi].
double cell_weight(const Grid& grid, int i, double lo, double hi) {
  const double d = grid.spacing();
  const double s = grid.point(i);
  const double overlap = std::min(hi, s + 0.5 * d) - std::max(lo, s - 0.5 * d);
  return std::clamp(overlap / d, 0.0, 1.0);
}

struct Integrals {
  double zeroth = 0.0;
  double first = 0.0;
  double second = 0.0;
};

Integrals integrate(const WaveFunction& psi, double lo, double hi) {
  const Grid& grid = psi.grid;
  const double d = grid.spacing();
  const int first = std::max(0, static_cast<int>(std::floor((lo - grid.s_min) / d)) - 1);
  const int last =
      std::min(grid.n_points - 1, static_cast<int>(std::ceil((hi - grid.s_min) / d)) + 1);
  Integrals out;
  for (int i = first; i <= last; ++i) {
    const double w = cell_weight(grid, i, lo, hi);
    if (w == 0.0) {
      continue;
    }
    const double s = grid.point(i);
    const double p = w * std::norm(psi.amplitudes[static_cast<std::size_t>(i)]) * d;
    out.zeroth += p;
    out.first += p * s;
    out.second += p * s * s;
  }
  return out;
}

}  // namespace

std::vector<double> well_occupations(const WaveFunction& psi, std::span<const WellSegment> wells) {
  std::vector<double> out;
  out.reserve(wells.size());
  for (const WellSegment& w : wells) {
    out.push_back(integrate(psi, w.left_boundary, w.right_boundary).zeroth);
  }
  return out;
}

double outside_occupation(const WaveFunction& psi, std::span<const WellSegment> wells) {
  if (wells.empty()) {
    return psi.norm();
  }
  const double inside =
      integrate(psi, wells.front().left_boundary, wells.back().right_boundary).zeroth;
  return std::max(0.0, psi.norm() - inside);
}

IntrawellMoments intrawell_moments(const WaveFunction& psi, const WellSegment& well,
                                   double occupancy_floor) {
  const Integrals in = integrate(psi, well.left_boundary, well.right_boundary);
  IntrawellMoments m;
  m.occupation = in.zeroth;
  if (in.zeroth < occupancy_floor || in.zeroth <= 0.0) {
    return m;
  }
  m.valid = true;
  m.mean = in.first / in.zeroth;
  m.stddev = std::sqrt(std::max(0.0, in.second / in.zeroth - m.mean * m.mean));
  return m;
}

std::vector<std::optional<double>> first_passage_times(const ObservablesSeries& series,
                                                       double level) {
  std::vector<std::optional<double>> out(series.well_count());
  for (std::size_t k = 0; k < series.well_count(); ++k) {
    for (std::size_t i = 0; i < series.size(); ++i) {
      if (series.iwo[k][i] >= level) {
        out[k] = series.times[i];
        break;
      }
    }
  }
  return out;
}

double SnapshotRecord::integrated_density() const {
  if (s.size() < 2) {
    return 0.0;
  }
  const double d = (s.back() - s.front()) / static_cast<double>(s.size() - 1);
  double sum = 0.0;
  for (double v : abs2) {
    sum += v;
  }
  return sum * d;
}

SnapshotRecord make_snapshot(double t, const WaveFunction& psi) {
  SnapshotRecord rec;
  rec.t = t;
  const std::size_t n = psi.amplitudes.size();
  rec.s.resize(n);
  rec.re.resize(n);
  rec.im.resize(n);
  rec.abs2.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    rec.s[i] = psi.grid.point(static_cast<int>(i));
    rec.re[i] = psi.amplitudes[i].real();
    rec.im[i] = psi.amplitudes[i].imag();
    rec.abs2[i] = rec.re[i] * rec.re[i] + rec.im[i] * rec.im[i];
  }
  return rec;
}

ObservablesRecorder::ObservablesRecorder(std::vector<WellSegment> wells,
                                         std::vector<double> potential, double mass,
                                         double occupancy_floor)
    : wells_(std::move(wells)),
      potential_(std::move(potential)),
      mass_(mass),
      occupancy_floor_(occupancy_floor),
      series_(wells_.size()) {}

void ObservablesRecorder::record(double t, const WaveFunction& psi) {
  series_.times.push_back(t);
  series_.norm.push_back(psi.norm());
  series_.energy.push_back(total_energy(psi, potential_, mass_));
  series_.outside.push_back(outside_occupation(psi, wells_));
  for (std::size_t k = 0; k < wells_.size(); ++k) {
    const IntrawellMoments m = intrawell_moments(psi, wells_[k], occupancy_floor_);
    series_.iwo[k].push_back(m.occupation);
    series_.mean[k].push_back(m.mean);
    series_.stddev[k].push_back(m.stddev);
    series_.valid[k].push_back(m.valid);
  }
}

void ObservablesRecorder::snapshot(std::size_t index, double t, const WaveFunction& psi) {
  SnapshotRecord rec = make_snapshot(t, psi);
  if (snapshot_handler_) {
    snapshot_handler_(index, rec);
  } else {
    snapshots_.push_back(std::move(rec));
  }
}

void ObservablesRecorder::warning(double t, const std::string& message) {
  warnings_.push_back(message);
  if (warning_handler_) {
    warning_handler_(t, message);
  }
}

}  // namespace helixqd
