#include <CLI11.hpp>
#include <fmt/core.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <thread>

#include "helixqd/config.hpp"
#include "helixqd/errors.hpp"
#include "helixqd/landscape.hpp"
#include "helixqd/runner.hpp"
#include "helixqd/spectral.hpp"

namespace fs = std::filesystem;
using namespace helixqd;

namespace {

struct Source {
  std::string config_path;
  std::string preset;
  std::optional<double> pitch;
  std::optional<double> radius;
  std::optional<double> mass;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open " + path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// A manifest.json is accepted wherever a config is: its "config" member is
// the complete config of that run.
ExperimentConfig load_config_file(const std::string& path) {
  const std::string text = read_file(path);
  const auto doc = nlohmann::json::parse(text, nullptr, false);
  if (!doc.is_discarded() && doc.is_object() && doc.contains("tool_version") &&
      doc.contains("config")) {
    return parse_config(doc.at("config").dump());
  }
  return parse_config(text);
}

ExperimentConfig resolve(const Source& src) {
  ExperimentConfig config;
  if (!src.config_path.empty()) {
    config = load_config_file(src.config_path);
  } else if (!src.preset.empty()) {
    config = preset_config(src.preset);
  } else if (!src.pitch || !src.radius) {
    throw ConfigError("give --config, --preset, or both --pitch and --radius");
  }
  if (src.pitch) config.pitch = *src.pitch;
  if (src.radius) config.radius = *src.radius;
  if (src.mass) config.mass = *src.mass;
  return config;
}

void add_source_options(CLI::App* cmd, Source& src) {
  cmd->add_option("--config", src.config_path, "JSON config (or a run's manifest.json)");
  cmd->add_option("--preset", src.preset, "named preset, see `helixqd preset`");
  cmd->add_option("--pitch", src.pitch, "helix pitch");
  cmd->add_option("--radius", src.radius, "helix radius");
  cmd->add_option("--mass", src.mass, "mass M");
}

// Writes to <out>/<name> when --out is set, else stdout.
template <typename Writer>
void emit(const std::string& out_dir, const std::string& name, Writer&& writer) {
  if (out_dir.empty()) {
    writer(stdout);
    return;
  }
  fs::create_directories(out_dir);
  const fs::path file = fs::path(out_dir) / name;
  std::FILE* handle = std::fopen(file.c_str(), "w");
  if (handle == nullptr) {
    throw ConfigError("cannot write " + file.string());
  }
  writer(handle);
  std::fclose(handle);
  fmt::print(stderr, "wrote {}\n", file.string());
}

fs::path run_directory(const std::string& out, const ExperimentConfig& config) {
  if (!out.empty()) {
    return out;
  }
  if (!config.output_directory.empty()) {
    return config.output_directory;
  }
  return default_output_root() / (config.name.empty() ? "run" : config.name);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two particles on a helix: landscape, spectra and wave-packet dynamics"};
  app.set_version_flag("--version", tool_version);
  app.require_subcommand(1);

  Source src;
  std::string out;
  int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

  auto* potential_cmd = app.add_subcommand("potential", "dump the regularized V(s) on a grid");
  add_source_options(potential_cmd, src);
  std::optional<double> s_min;
  std::optional<double> s_max;
  std::optional<int> n_points;
  potential_cmd->add_option("--s-min", s_min, "grid start (default: config grid or -150)");
  potential_cmd->add_option("--s-max", s_max, "grid end (default: config grid or 1000)");
  potential_cmd->add_option("--n", n_points, "grid points (default: config grid or 2301)");
  potential_cmd->add_option("--out", out, "output directory (default: stdout)");

  auto* extrema_cmd = app.add_subcommand("extrema", "minima and maxima of V for s > 0");
  add_source_options(extrema_cmd, src);
  extrema_cmd->add_option("--out", out, "output directory (default: stdout)");

  auto* bif_cmd = app.add_subcommand("bifurcations", "ratios h/R where new wells appear");
  int bif_count = 5;
  bif_cmd->add_option("--n", bif_count, "number of ratios")->check(CLI::PositiveNumber);
  bif_cmd->add_option("--out", out, "output directory (default: stdout)");

  auto* spectrum_cmd = app.add_subcommand("spectrum", "bound states of each isolated well");
  add_source_options(spectrum_cmd, src);
  std::optional<int> fd_points;
  std::optional<int> fd_order;
  spectrum_cmd->add_option("--n-points", fd_points, "finite-difference grid points per well");
  spectrum_cmd->add_option("--order", fd_order, "stencil order (even)");
  spectrum_cmd->add_option("--out", out, "output directory (default: stdout)");

  auto* propagate_cmd = app.add_subcommand("propagate", "full run: landscape, spectra, dynamics");
  add_source_options(propagate_cmd, src);
  propagate_cmd->add_option("--out", out, "run directory");

  auto* preset_cmd = app.add_subcommand("preset", "list presets, or print one as JSON");
  std::string preset_name;
  preset_cmd->add_option("name", preset_name, "preset name");

  auto* sweep_cmd = app.add_subcommand("sweep", "run a parameter sweep");
  std::string sweep_path;
  sweep_cmd->add_option("--config", sweep_path, "sweep file {base, ranges, mode}")->required();
  sweep_cmd->add_option("--out", out, "sweep root directory");
  sweep_cmd->add_option("--jobs", jobs, "concurrent runs")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_config_error;
  }

  try {
    if (*potential_cmd) {
      const ExperimentConfig config = resolve(src);
      const GridSettings fallback = config.grid.value_or(GridSettings{-150.0, 1000.0, 2301});
      const Grid grid = make_grid(s_min.value_or(fallback.s_min), s_max.value_or(fallback.s_max),
                                  n_points.value_or(fallback.n_points));
      const RegularizedPotential v = config.potential();
      emit(out, "potential.csv", [&](std::FILE* f) { write_potential_csv(f, grid, v); });
    } else if (*extrema_cmd) {
      const ExtremaSet extrema = find_extrema(resolve(src).helix());
      emit(out, "extrema.csv", [&](std::FILE* f) { write_extrema_csv(f, extrema); });
    } else if (*bif_cmd) {
      const std::vector<double> ratios = bifurcation_ratios(bif_count);
      emit(out, "bifurcations.csv", [&](std::FILE* f) {
        fmt::print(f, "wells,ratio,asymptotic\n");
        for (std::size_t k = 0; k < ratios.size(); ++k) {
          const int n = 2 * static_cast<int>(k) + 1;
          fmt::print(f, "{},{},{}\n", k + 1, format_double(ratios[k]),
                     format_double(asymptotic_ratio(n)));
        }
      });
    } else if (*spectrum_cmd) {
      const ExperimentConfig config = resolve(src);
      const HelixParams helix = config.helix();
      std::vector<std::pair<int, SpectrumResult>> spectra;
      for (const WellSegment& segment : segment_wells(find_extrema(helix))) {
        const IsolatedWell well(segment, helix);
        const FDParameters fd = default_fd_parameters(
            well, fd_points.value_or(config.spectra.n_points), fd_order.value_or(config.spectra.order));
        spectra.emplace_back(segment.index, well_spectrum(well, fd));
      }
      emit(out, "spectrum.csv", [&](std::FILE* f) { write_spectrum_csv(f, spectra); });
    } else if (*propagate_cmd) {
      const ExperimentConfig config = resolve(src);
      const fs::path dir = run_directory(out, config);
      const RunManifest manifest = run_experiment(config, dir);
      const auto& doc = manifest.document;
      if (manifest.ok()) {
        fmt::print("{}: ok, {} wells, {:.1f} s -> {}\n", config.name, manifest.well_count(),
                   doc.value("wall_clock_seconds", 0.0), dir.string());
      } else {
        fmt::print(stderr, "{}: {} in stage {}: {}\n", config.name, doc.value("status", ""),
                   doc.value("failure_stage", ""), doc.value("error", ""));
      }
      return manifest.exit_code;
    } else if (*preset_cmd) {
      if (preset_name.empty()) {
        for (const PresetInfo& p : list_presets()) {
          fmt::print("{:<7} {}\n", p.name, p.caption);
        }
      } else {
        fmt::print("{}\n", serialize_config(preset_config(preset_name)));
      }
    } else if (*sweep_cmd) {
      const SweepPlan plan = parse_sweep(read_file(sweep_path));
      const fs::path root = out.empty() ? default_output_root() / "sweep" : fs::path(out);
      const std::vector<RunManifest> runs = sweep(plan, root, jobs);
      int failed = 0;
      for (const RunManifest& m : runs) {
        failed += m.ok() ? 0 : 1;
      }
      fmt::print("{} runs, {} failed -> {}\n", runs.size(), failed, (root / "index.json").string());
    }
  } catch (const ConfigError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return exit_config_error;
  } catch (const InvalidArgument& e) {
    fmt::print(stderr, "invalid argument: {}\n", e.what());
    return exit_config_error;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return exit_numerical_failure;
  }
  return exit_ok;
}
