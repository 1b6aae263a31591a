#include "helixqd/config.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "helixqd/errors.hpp"
#include "helixqd/landscape.hpp"

namespace helixqd {

using nlohmann::json;

namespace {

void reject_unknown(const json& object, const std::string& prefix,
                    const std::set<std::string>& allowed) {
  if (!object.is_object()) {
    throw ConfigError("'" + prefix + "' must be an object");
  }
  for (const auto& item : object.items()) {
    if (!allowed.contains(item.key())) {
      const std::string path = prefix.empty() ? item.key() : prefix + "." + item.key();
      throw ConfigError("unknown key '" + path + "'");
    }
  }
}

template <class T>
T read(const json& object, const std::string& key, const std::string& path, T fallback) {
  if (!object.contains(key)) {
    return fallback;
  }
  try {
    return object.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("key '" + path + "' has the wrong type");
  }
}

template <class T>
T require(const json& object, const std::string& key, const std::string& path) {
  if (!object.contains(key)) {
    throw ConfigError("missing required key '" + path + "'");
  }
  return read<T>(object, key, path, T{});
}

std::pair<int, int> line_and_column(std::string_view text, std::size_t byte) {
  int line = 1;
  int column = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

}  // namespace

double default_time_step(double mass) { return mass >= 10.0 ? 0.05 : 0.02; }

int default_observable_stride(double dt) {
  return std::max(1, static_cast<int>(std::lround(1.0 / dt)));
}

Grid ExperimentConfig::make_grid() const {
  if (!grid) {
    throw ConfigError("config has no grid section");
  }
  return helixqd::make_grid(grid->s_min, grid->s_max, grid->n_points);
}

PropagationConfig ExperimentConfig::propagation_config() const {
  return PropagationConfig{propagation.dt, propagation.t_final, propagation.snapshot_times,
                           propagation.observable_stride};
}

ExperimentConfig config_from_json(const json& doc) {
  reject_unknown(doc, "",
                 {"name", "potential", "helix", "mass", "regularization", "grid", "wavepacket",
                  "propagation", "spectra", "output"});
  ExperimentConfig c;
  c.name = read<std::string>(doc, "name", "name", "");

  const auto kind = read<std::string>(doc, "potential", "potential", "helical");
  if (kind == "helical") {
    c.interaction = InteractionKind::helical;
  } else if (kind == "coulomb") {
    c.interaction = InteractionKind::coulomb;
  } else {
    throw ConfigError("key 'potential' must be \"helical\" or \"coulomb\"");
  }

  if (!doc.contains("helix")) {
    throw ConfigError("missing required key 'helix'");
  }
  const json& helix = doc.at("helix");
  reject_unknown(helix, "helix", {"h", "R"});
  c.pitch = require<double>(helix, "h", "helix.h");
  c.radius = require<double>(helix, "R", "helix.R");
  c.mass = read<double>(doc, "mass", "mass", 1.0);

  if (doc.contains("regularization")) {
    const json& reg = doc.at("regularization");
    reject_unknown(reg, "regularization", {"s_cut"});
    c.s_cut = read<double>(reg, "s_cut", "regularization.s_cut", c.s_cut);
  }

  if (doc.contains("grid")) {
    const json& g = doc.at("grid");
    reject_unknown(g, "grid", {"s_min", "s_max", "n_points"});
    c.grid = GridSettings{require<double>(g, "s_min", "grid.s_min"),
                          require<double>(g, "s_max", "grid.s_max"),
                          require<int>(g, "n_points", "grid.n_points")};
  }

  if (doc.contains("wavepacket")) {
    const json& w = doc.at("wavepacket");
    reject_unknown(w, "wavepacket", {"s0", "delta_s", "p0"});
    c.wavepacket = GaussianSpec{require<double>(w, "s0", "wavepacket.s0"),
                                require<double>(w, "delta_s", "wavepacket.delta_s"),
                                read<double>(w, "p0", "wavepacket.p0", 0.0)};
  }

  const json prop = doc.value("propagation", json::object());
  reject_unknown(prop, "propagation",
                 {"dt", "t_final", "snapshot_times", "observable_stride", "abort_on_contamination"});
  c.propagation.dt = read<double>(prop, "dt", "propagation.dt", default_time_step(c.mass));
  c.propagation.t_final = read<double>(prop, "t_final", "propagation.t_final", default_final_time);
  c.propagation.snapshot_times =
      read<std::vector<double>>(prop, "snapshot_times", "propagation.snapshot_times", {});
  c.propagation.observable_stride =
      read<int>(prop, "observable_stride", "propagation.observable_stride",
                c.propagation.dt > 0.0 ? default_observable_stride(c.propagation.dt) : 1);
  c.propagation.abort_on_contamination =
      read<bool>(prop, "abort_on_contamination", "propagation.abort_on_contamination", false);

  if (doc.contains("spectra")) {
    const json& s = doc.at("spectra");
    reject_unknown(s, "spectra", {"enabled", "n_points", "order"});
    c.spectra.enabled = read<bool>(s, "enabled", "spectra.enabled", c.spectra.enabled);
    c.spectra.n_points = read<int>(s, "n_points", "spectra.n_points", c.spectra.n_points);
    c.spectra.order = read<int>(s, "order", "spectra.order", c.spectra.order);
  }

  if (doc.contains("output")) {
    const json& o = doc.at("output");
    reject_unknown(o, "output", {"directory"});
    c.output_directory = read<std::string>(o, "directory", "output.directory", "");
  }

  validate(c);
  return c;
}

ExperimentConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const auto [line, column] = line_and_column(text, e.byte > 0 ? e.byte - 1 : 0);
    throw ConfigError("parse error at line " + std::to_string(line) + ", column " +
                      std::to_string(column) + ": " + e.what());
  }
  if (!doc.is_object()) {
    throw ConfigError("config must be a JSON object");
  }
  if (doc.contains("preset")) {
    const auto name = read<std::string>(doc, "preset", "preset", "");
    json merged = to_json(preset_config(name));
    doc.erase("preset");
    merged.merge_patch(doc);
    return config_from_json(merged);
  }
  return config_from_json(doc);
}

json to_json(const ExperimentConfig& c) {
  json doc;
  doc["name"] = c.name;
  doc["potential"] = c.interaction == InteractionKind::helical ? "helical" : "coulomb";
  doc["helix"] = {{"h", c.pitch}, {"R", c.radius}};
  doc["mass"] = c.mass;
  doc["regularization"] = {{"s_cut", c.s_cut}};
  if (c.grid) {
    doc["grid"] = {{"s_min", c.grid->s_min}, {"s_max", c.grid->s_max},
                   {"n_points", c.grid->n_points}};
  }
  if (c.wavepacket) {
    doc["wavepacket"] = {{"s0", c.wavepacket->s0},
                         {"delta_s", c.wavepacket->delta_s},
                         {"p0", c.wavepacket->p0}};
  }
  doc["propagation"] = {{"dt", c.propagation.dt},
                        {"t_final", c.propagation.t_final},
                        {"snapshot_times", c.propagation.snapshot_times},
                        {"observable_stride", c.propagation.observable_stride},
                        {"abort_on_contamination", c.propagation.abort_on_contamination}};
  doc["spectra"] = {{"enabled", c.spectra.enabled},
                    {"n_points", c.spectra.n_points},
                    {"order", c.spectra.order}};
  doc["output"] = {{"directory", c.output_directory}};
  return doc;
}

std::string serialize_config(const ExperimentConfig& config) { return to_json(config).dump(2); }

void validate(const ExperimentConfig& c) {
  try {
    const HelixParams helix = c.helix();
    RegularizedPotential(helix, c.s_cut, c.interaction);
    if (c.spectra.order < 2 || c.spectra.order % 2 != 0 || c.spectra.n_points < 101) {
      throw ConfigError("spectra: order must be even >= 2 and n_points >= 101");
    }
    if (c.wavepacket && !c.grid) {
      throw ConfigError("a wavepacket section requires a grid section");
    }
    if (c.grid) {
      const Grid grid = c.make_grid();
      if (c.interaction == InteractionKind::helical) {
        const std::vector<WellSegment> wells = segment_wells(find_extrema(helix));
        if (!wells.empty() && (grid.s_min > wells.front().left_boundary ||
                               grid.s_max < wells.back().right_boundary)) {
          throw ConfigError("grid does not cover the wells, which span [" +
                            std::to_string(wells.front().left_boundary) + ", " +
                            std::to_string(wells.back().right_boundary) + "]");
        }
      }
      if (c.wavepacket) {
        init_gaussian(grid, *c.wavepacket);
      }
    }
    if (c.wavepacket) {
      c.propagation_config().validate();
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  }
}

namespace {

ExperimentConfig preset(std::string name, InteractionKind kind, double h, double r, double m,
                        GridSettings grid, GaussianSpec packet, double t_final,
                        std::vector<double> snapshots) {
  ExperimentConfig c;
  c.name = std::move(name);
  c.interaction = kind;
  c.pitch = h;
  c.radius = r;
  c.mass = m;
  c.grid = grid;
  c.wavepacket = packet;
  c.propagation.dt = default_time_step(m);
  c.propagation.t_final = t_final;
  c.propagation.snapshot_times = std::move(snapshots);
  c.propagation.observable_stride = default_observable_stride(c.propagation.dt);
  c.spectra.enabled = kind == InteractionKind::helical;
  return c;
}

std::vector<PresetInfo> build_presets() {
  const auto helical = InteractionKind::helical;
  const GridSettings short_grid{-150.0, 1000.0, 2301};
  const GridSettings long_grid{-150.0, 1500.0, 3301};
  const GridSettings wide_grid{-500.0, 1500.0, 4001};
  std::vector<PresetInfo> p;
  p.push_back({"fig2",
               "pure Coulomb reference, s0=220, ds=4, p0=0, M=1, 2301 points on [-150,1000], "
               "flat cap at s_cut",
               preset("fig2", InteractionKind::coulomb, 5.8, 4.0, 1.0, short_grid,
                      {220.0, 4.0, 0.0}, 1000.0, {0.0, 400.0, 1000.0})});
  p.push_back({"fig3", "h=5.8, R=4, M=1, s0=220, ds=4, p0=0, 2301 points on [-150,1000]",
               preset("fig3", helical, 5.8, 4.0, 1.0, short_grid, {220.0, 4.0, 0.0}, 1000.0,
                      {0.0, 500.0, 700.0, 1000.0})});
  p.push_back({"fig4", "h=5.8, R=4, M=1, s0=40.99, ds=6, p0=0, 2301 points on [-150,1000]",
               preset("fig4", helical, 5.8, 4.0, 1.0, short_grid, {40.99, 6.0, 0.0}, 1000.0,
                      {0.0, 140.0, 230.0, 400.0, 1000.0})});
  p.push_back({"fig5", "h=5.8, R=4, M=1, s0=13.63, ds=4.5, p0=0, 3301 points on [-150,1500]",
               preset("fig5", helical, 5.8, 4.0, 1.0, long_grid, {13.63, 4.5, 0.0}, 2000.0,
                      {0.0, 200.0})});
  p.push_back({"fig6", "h=5.8, R=4, M=1, s0=220, ds=4.5, p0=-0.154, 3301 points on [-150,1500]",
               preset("fig6", helical, 5.8, 4.0, 1.0, long_grid, {220.0, 4.5, -0.154}, 1000.0,
                      {550.0, 1000.0})});
  p.push_back({"fig7", "h=5.8, R=4, M=1, s0=220, ds=4.5, p0=-0.8, 4001 points on [-500,1500]",
               preset("fig7", helical, 5.8, 4.0, 1.0, wide_grid, {220.0, 4.5, -0.8}, 310.0,
                      {180.0, 310.0})});
  p.push_back({"fig8", "h=10, R=10, M=1, s0=350, ds=4, p0=0, 4301 points on [-150,2000]",
               preset("fig8", helical, 10.0, 10.0, 1.0, {-150.0, 2000.0, 4301},
                      {350.0, 4.0, 0.0}, 1500.0, {600.0, 750.0, 1100.0, 1500.0})});
  p.push_back({"fig9", "h=10, R=10, M=1, s0=32.5, ds=4, p0=0, 3301 points on [-150,1500]",
               preset("fig9", helical, 10.0, 10.0, 1.0, long_grid, {32.5, 4.0, 0.0}, 1000.0,
                      {0.0, 100.0, 200.0, 1000.0})});
  p.push_back({"fig10", "h=10, R=10, M=1, s0=350, ds=4, p0=-0.3, 3301 points on [-150,1500]",
               preset("fig10", helical, 10.0, 10.0, 1.0, long_grid, {350.0, 4.0, -0.3}, 1500.0,
                      {940.0, 1500.0})});
  p.push_back({"fig11", "h=10, R=10, M=10, s0=350, ds=1.2, p0=0, 3301 points on [-150,1500]",
               preset("fig11", helical, 10.0, 10.0, 10.0, long_grid, {350.0, 1.2, 0.0}, 5000.0,
                      {1800.0, 2500.0, 5000.0})});
  p.push_back({"fig12", "h=10, R=10, M=10, s0=98, ds=1.2, p0=0, 3301 points on [-150,1500]",
               preset("fig12", helical, 10.0, 10.0, 10.0, long_grid, {98.0, 1.2, 0.0}, 5000.0,
                      {3000.0})});
  p.push_back({"fig13", "h=10, R=10, M=10, s0=32.5, ds=1.2, p0=0, 4001 points on [-500,1500]",
               preset("fig13", helical, 10.0, 10.0, 10.0, wide_grid, {32.5, 1.2, 0.0}, 5000.0,
                      {4100.0})});
  return p;
}

}  // namespace

const std::vector<PresetInfo>& list_presets() {
  static const std::vector<PresetInfo> presets = build_presets();
  return presets;
}

ExperimentConfig preset_config(std::string_view name) {
  for (const PresetInfo& p : list_presets()) {
    if (p.name == name) {
      return p.config;
    }
  }
  throw ConfigError("unknown preset '" + std::string(name) + "'");
}

}  // namespace helixqd
