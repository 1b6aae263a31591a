#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "helixqd/helix_potential.hpp"
#include "helixqd/tdse.hpp"

namespace helixqd {

struct SpectraSettings {
  bool enabled = true;
  int n_points = 4001;
  int order = 10;
  bool operator==(const SpectraSettings&) const = default;
};

struct GridSettings {
  double s_min = 0.0;
  double s_max = 0.0;
  int n_points = 0;
  bool operator==(const GridSettings&) const = default;
};

struct PropagationSettings {
  double dt = 0.0;
  double t_final = 0.0;
  std::vector<double> snapshot_times;
  int observable_stride = 0;
  bool abort_on_contamination = false;
  bool operator==(const PropagationSettings&) const = default;
};

// Everything a run needs. Optional sections switch stages off: without a
// wave packet the run stops after the landscape (and spectra).
struct ExperimentConfig {
  std::string name;
  InteractionKind interaction = InteractionKind::helical;
  double pitch = 0.0;
  double radius = 0.0;
  double mass = 1.0;
  double s_cut = RegularizedPotential::default_cutoff;
  std::optional<GridSettings> grid;
  std::optional<GaussianSpec> wavepacket;
  PropagationSettings propagation;
  SpectraSettings spectra;
  std::string output_directory;

  HelixParams helix() const { return HelixParams::make(pitch, radius, mass); }
  RegularizedPotential potential() const { return RegularizedPotential(helix(), s_cut, interaction); }
  Grid make_grid() const;
  PropagationConfig propagation_config() const;

  bool operator==(const ExperimentConfig&) const = default;
};

// Defaults for omitted propagation fields.
double default_time_step(double mass);
int default_observable_stride(double dt);
inline constexpr double default_final_time = 1000.0;

// Parses a JSON document. A "preset" key seeds the config from that preset
// before the document's own values are applied. Throws ConfigError with the
// line/column or the offending key.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig config_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const ExperimentConfig& config);
std::string serialize_config(const ExperimentConfig& config);

// Checks every cross-module invariant (helix, grid, packet clearance, dt).
void validate(const ExperimentConfig& config);

struct PresetInfo {
  std::string name;
  std::string caption;
  ExperimentConfig config;
};

const std::vector<PresetInfo>& list_presets();
ExperimentConfig preset_config(std::string_view name);

}  // namespace helixqd
