#pragma once

#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "helixqd/config.hpp"
#include "helixqd/landscape.hpp"
#include "helixqd/observables.hpp"
#include "helixqd/spectral.hpp"

namespace helixqd {

inline constexpr const char* tool_version = "0.3.0";

// Environment variable naming the default output root.
inline constexpr const char* output_root_variable = "HELIXQD_OUTPUT_ROOT";
std::filesystem::path default_output_root();

enum ExitCode : int {
  exit_ok = 0,
  exit_config_error = 2,
  exit_numerical_failure = 3,
  exit_contamination_abort = 4,
};

struct RunManifest {
  nlohmann::json document;
  int exit_code = exit_ok;

  bool ok() const { return exit_code == exit_ok; }
  std::size_t well_count() const;
};

// Writes extrema.csv, spectrum.csv, potential.csv, observables.csv,
// snapshot_<i>.csv and manifest.json into `directory` (created if needed).
// Errors are caught and recorded in the manifest together with the stage.
RunManifest run_experiment(const ExperimentConfig& config, const std::filesystem::path& directory);

// One sweep axis: dotted config key (e.g. "helix.h") and its values.
struct SweepAxis {
  std::string key;
  std::vector<nlohmann::json> values;
};

enum class SweepMode { product, zip };

struct SweepPlan {
  nlohmann::json base;  // config document, may name a preset
  std::vector<SweepAxis> axes;
  SweepMode mode = SweepMode::product;
};

SweepPlan parse_sweep(std::string_view text);

// Runs every point of the plan in out_root/run_<i> on up to `jobs` threads and
// writes out_root/index.json. Failed runs are recorded, the sweep continues.
std::vector<RunManifest> sweep(const SweepPlan& plan, const std::filesystem::path& out_root,
                               int jobs = 1);

// CSV writers shared by the CLI subcommands (17 significant digits).
void write_extrema_csv(const std::filesystem::path& file, const ExtremaSet& extrema);
void write_spectrum_csv(const std::filesystem::path& file,
                        const std::vector<std::pair<int, SpectrumResult>>& spectra);
void write_potential_csv(const std::filesystem::path& file, const Grid& grid,
                         const RegularizedPotential& potential);
void write_observables_csv(const std::filesystem::path& file, const ObservablesSeries& series);
void write_snapshot_csv(const std::filesystem::path& file, const SnapshotRecord& snapshot);

void write_extrema_csv(std::FILE* out, const ExtremaSet& extrema);
void write_spectrum_csv(std::FILE* out, const std::vector<std::pair<int, SpectrumResult>>& spectra);
void write_potential_csv(std::FILE* out, const Grid& grid, const RegularizedPotential& potential);
void write_observables_csv(std::FILE* out, const ObservablesSeries& series);
void write_snapshot_csv(std::FILE* out, const SnapshotRecord& snapshot);

std::string format_double(double value);

}  // namespace helixqd
