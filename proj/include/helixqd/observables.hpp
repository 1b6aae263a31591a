#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "helixqd/landscape.hpp"
#include "helixqd/tdse.hpp"

namespace helixqd {

// Individual well occupations: probability inside each well interval. Each
// grid point stands for the cell [s - d/2, s + d/2] and contributes the
// fraction of its cell lying in the well, so a point sitting on a shared
// boundary is split half-half.
std::vector<double> well_occupations(const WaveFunction& psi, std::span<const WellSegment> wells);

// Probability outside [left_1, right_n]: norm minus the sum of occupations.
double outside_occupation(const WaveFunction& psi, std::span<const WellSegment> wells);

inline constexpr double default_occupancy_floor = 1e-4;

struct IntrawellMoments {
  double occupation = 0.0;
  double mean = 0.0;
  double stddev = 0.0;
  bool valid = false;  // occupation >= floor
};

// Mean and standard deviation of s renormalized to the well's occupation.
IntrawellMoments intrawell_moments(const WaveFunction& psi, const WellSegment& well,
                                   double occupancy_floor = default_occupancy_floor);

struct ObservablesSeries {
  std::vector<double> times;
  std::vector<double> norm;
  std::vector<double> energy;
  std::vector<double> outside;
  // Indexed [well][record].
  std::vector<std::vector<double>> iwo;
  std::vector<std::vector<double>> mean;
  std::vector<std::vector<double>> stddev;
  std::vector<std::vector<bool>> valid;

  explicit ObservablesSeries(std::size_t wells = 0)
      : iwo(wells), mean(wells), stddev(wells), valid(wells) {}
  std::size_t size() const { return times.size(); }
  std::size_t well_count() const { return iwo.size(); }
};

// Earliest record time with iwo >= level for each well, if any.
std::vector<std::optional<double>> first_passage_times(const ObservablesSeries& series,
                                                       double level);

struct SnapshotRecord {
  double t = 0.0;
  std::vector<double> s;
  std::vector<double> re;
  std::vector<double> im;
  std::vector<double> abs2;

  double integrated_density() const;
};

SnapshotRecord make_snapshot(double t, const WaveFunction& psi);

// PropagationSink that accumulates an ObservablesSeries and keeps the
// snapshots (or hands them to a callback instead).
class ObservablesRecorder : public PropagationSink {
 public:
  using SnapshotHandler = std::function<void(std::size_t, const SnapshotRecord&)>;
  using WarningHandler = std::function<void(double, const std::string&)>;

  ObservablesRecorder(std::vector<WellSegment> wells, std::vector<double> potential, double mass,
                      double occupancy_floor = default_occupancy_floor);

  void on_snapshot(SnapshotHandler handler) { snapshot_handler_ = std::move(handler); }
  void on_warning(WarningHandler handler) { warning_handler_ = std::move(handler); }

  void record(double t, const WaveFunction& psi) override;
  void snapshot(std::size_t index, double t, const WaveFunction& psi) override;
  void warning(double t, const std::string& message) override;

  const ObservablesSeries& series() const { return series_; }
  const std::vector<SnapshotRecord>& snapshots() const { return snapshots_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  std::vector<WellSegment> wells_;
  std::vector<double> potential_;
  double mass_;
  double occupancy_floor_;
  ObservablesSeries series_;
  std::vector<SnapshotRecord> snapshots_;
  std::vector<std::string> warnings_;
  SnapshotHandler snapshot_handler_;
  WarningHandler warning_handler_;
};

}  // namespace helixqd
