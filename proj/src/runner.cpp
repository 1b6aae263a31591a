#include "helixqd/runner.hpp"

#include <fmt/core.h>

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <thread>

#include "helixqd/errors.hpp"

namespace helixqd {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Thrown from the warning hook when the config asks to stop at the first
// sign of box reflections.
struct ContaminationAbort {
  double t;
};

json well_json(const WellSegment& w) {
  return {{"index", w.index},
          {"left_boundary", w.left_boundary},
          {"right_boundary", w.right_boundary},
          {"minimum_position", w.minimum_position},
          {"minimum_value", w.minimum_value},
          {"threshold", w.threshold},
          {"depth", w.depth()}};
}

void write_json(const fs::path& file, const json& doc) {
  std::ofstream out(file);
  if (!out) {
    throw Error("cannot write " + file.string());
  }
  out << doc.dump(2) << '\n';
}

class CsvFile {
 public:
  explicit CsvFile(const fs::path& file) : handle_(std::fopen(file.c_str(), "w")) {
    if (handle_ == nullptr) {
      throw Error("cannot write " + file.string());
    }
  }
  CsvFile(const CsvFile&) = delete;
  CsvFile& operator=(const CsvFile&) = delete;
  ~CsvFile() { std::fclose(handle_); }

  std::FILE* get() const { return handle_; }

 private:
  std::FILE* handle_;
};

}  // namespace

fs::path default_output_root() {
  if (const char* root = std::getenv(output_root_variable); root != nullptr && *root != '\0') {
    return root;
  }
  return "runs";
}

std::string format_double(double value) {
  if (std::isnan(value)) {
    return "nan";
  }
  return fmt::format("{:.17g}", value);
}

std::size_t RunManifest::well_count() const {
  const auto it = document.find("derived");
  if (it == document.end() || !it->contains("wells")) {
    return 0;
  }
  return it->at("wells").size();
}

void write_extrema_csv(std::FILE* out, const ExtremaSet& extrema) {
  fmt::print(out, "index,kind,s,V\n");
  for (std::size_t k = 0; k < extrema.well_count(); ++k) {
    const double s_min = extrema.minima[k];
    const double s_max = extrema.maxima[k];
    fmt::print(out, "{},min,{},{}\n", k + 1, format_double(s_min),
               format_double(potential_value(extrema.params, s_min)));
    fmt::print(out, "{},max,{},{}\n", k + 1, format_double(s_max),
               format_double(potential_value(extrema.params, s_max)));
  }
}

void write_spectrum_csv(std::FILE* out,
                        const std::vector<std::pair<int, SpectrumResult>>& spectra) {
  fmt::print(out, "well,n,energy,spacing,bound\n");
  for (const auto& [well, result] : spectra) {
    for (std::size_t n = 0; n < result.eigenvalues.size(); ++n) {
      const double spacing = n < result.spacings.size() ? result.spacings[n] : std::nan("");
      fmt::print(out, "{},{},{},{},{}\n", well, n, format_double(result.eigenvalues[n]),
                 format_double(spacing), static_cast<int>(n) < result.bound_count ? 1 : 0);
    }
  }
}

void write_potential_csv(std::FILE* out, const Grid& grid, const RegularizedPotential& potential) {
  fmt::print(out, "s,V\n");
  for (int i = 0; i < grid.n_points; ++i) {
    const double s = grid.point(i);
    fmt::print(out, "{},{}\n", format_double(s), format_double(potential(s)));
  }
}

void write_observables_csv(std::FILE* out, const ObservablesSeries& series) {
  fmt::print(out, "t,norm,energy,outside");
  for (std::size_t k = 1; k <= series.well_count(); ++k) {
    fmt::print(out, ",iwo_{0},mean_{0},std_{0},valid_{0}", k);
  }
  fmt::print(out, "\n");
  for (std::size_t i = 0; i < series.size(); ++i) {
    fmt::print(out, "{},{},{},{}", format_double(series.times[i]), format_double(series.norm[i]),
               format_double(series.energy[i]), format_double(series.outside[i]));
    for (std::size_t k = 0; k < series.well_count(); ++k) {
      const bool valid = series.valid[k][i];
      fmt::print(out, ",{},{},{},{}", format_double(series.iwo[k][i]),
                 format_double(valid ? series.mean[k][i] : std::nan("")),
                 format_double(valid ? series.stddev[k][i] : std::nan("")), valid ? 1 : 0);
    }
    fmt::print(out, "\n");
  }
}

void write_snapshot_csv(std::FILE* out, const SnapshotRecord& snapshot) {
  fmt::print(out, "# t={}\n", format_double(snapshot.t));
  fmt::print(out, "s,re,im,abs2\n");
  for (std::size_t i = 0; i < snapshot.s.size(); ++i) {
    fmt::print(out, "{},{},{},{}\n", format_double(snapshot.s[i]), format_double(snapshot.re[i]),
               format_double(snapshot.im[i]), format_double(snapshot.abs2[i]));
  }
}

void write_extrema_csv(const fs::path& file, const ExtremaSet& extrema) {
  write_extrema_csv(CsvFile(file).get(), extrema);
}

void write_spectrum_csv(const fs::path& file,
                        const std::vector<std::pair<int, SpectrumResult>>& spectra) {
  write_spectrum_csv(CsvFile(file).get(), spectra);
}

void write_potential_csv(const fs::path& file, const Grid& grid,
                         const RegularizedPotential& potential) {
  write_potential_csv(CsvFile(file).get(), grid, potential);
}

void write_observables_csv(const fs::path& file, const ObservablesSeries& series) {
  write_observables_csv(CsvFile(file).get(), series);
}

void write_snapshot_csv(const fs::path& file, const SnapshotRecord& snapshot) {
  write_snapshot_csv(CsvFile(file).get(), snapshot);
}

RunManifest run_experiment(const ExperimentConfig& config, const fs::path& directory) {
  const auto started = std::chrono::steady_clock::now();
  RunManifest manifest;
  json& doc = manifest.document;
  doc["tool_version"] = tool_version;
  doc["config"] = to_json(config);
  doc["status"] = "running";
  doc["files"] = json::array();
  json& derived = doc["derived"];
  std::string stage = "setup";

  const auto finish = [&](int code, const std::string& status) {
    manifest.exit_code = code;
    doc["status"] = status;
    doc["exit_code"] = code;
    doc["wall_clock_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    try {
      write_json(directory / "manifest.json", doc);
    } catch (const Error&) {
      // Directory not writable: the caller still gets the manifest.
    }
  };
  const auto produced = [&](const std::string& name) { doc["files"].push_back(name); };

  try {
    std::error_code ec;
    fs::create_directories(directory, ec);
    if (ec) {
      throw ConfigError("cannot create output directory " + directory.string() + ": " +
                        ec.message());
    }
    validate(config);

    stage = "landscape";
    const HelixParams helix = config.helix();
    const RegularizedPotential potential = config.potential();
    derived["beta"] = helix.beta();
    derived["ratio"] = helix.ratio();
    derived["regularization"] = {{"s_cut", potential.cutoff()}, {"v_cap", potential.cap()}};
    std::vector<WellSegment> wells;
    if (config.interaction == InteractionKind::helical) {
      const ExtremaSet extrema = find_extrema(helix);
      wells = segment_wells(extrema);
      write_extrema_csv(directory / "extrema.csv", extrema);
      produced("extrema.csv");
    }
    derived["wells"] = json::array();
    for (const WellSegment& w : wells) {
      derived["wells"].push_back(well_json(w));
    }

    stage = "spectra";
    if (config.spectra.enabled && !wells.empty()) {
      std::vector<std::pair<int, SpectrumResult>> spectra;
      json counts = json::array();
      for (const WellSegment& segment : wells) {
        const IsolatedWell well(segment, helix);
        const FDParameters fd =
            default_fd_parameters(well, config.spectra.n_points, config.spectra.order);
        spectra.emplace_back(segment.index, well_spectrum(well, fd));
        counts.push_back(spectra.back().second.bound_count);
      }
      derived["bound_counts"] = counts;
      write_spectrum_csv(directory / "spectrum.csv", spectra);
      produced("spectrum.csv");
    }

    stage = "propagation";
    if (config.wavepacket) {
      const Grid grid = config.make_grid();
      const PropagationConfig prop = config.propagation_config();
      std::vector<double> samples = sample_on_grid(grid, [&](double s) { return potential(s); });
      write_potential_csv(directory / "potential.csv", grid, potential);
      produced("potential.csv");

      const WaveFunction psi0 = init_gaussian(grid, *config.wavepacket);
      ObservablesRecorder recorder(wells, samples, config.mass);
      recorder.on_snapshot([&](std::size_t index, const SnapshotRecord& rec) {
        const std::string name = fmt::format("snapshot_{}.csv", index);
        write_snapshot_csv(directory / name, rec);
      });
      json warnings = json::array();
      recorder.on_warning([&](double t, const std::string& message) {
        warnings.push_back({{"t", t}, {"message", message}});
        if (config.propagation.abort_on_contamination) {
          throw ContaminationAbort{t};
        }
      });

      std::optional<PropagationResult> result;
      std::optional<double> aborted_at;
      try {
        result = propagate(psi0, samples, config.mass, prop, recorder);
      } catch (const ContaminationAbort& abort) {
        aborted_at = abort.t;
      }
      write_observables_csv(directory / "observables.csv", recorder.series());
      produced("observables.csv");
      for (std::size_t i = 0; i < prop.snapshot_times.size(); ++i) {
        const std::string name = fmt::format("snapshot_{}.csv", i);
        if (fs::exists(directory / name)) {
          produced(name);
        }
      }
      doc["warnings"] = warnings;
      if (aborted_at) {
        doc["contamination_time"] = *aborted_at;
        doc["failure_stage"] = stage;
        doc["error"] = "boundary contamination";
        finish(exit_contamination_abort, "aborted");
        return manifest;
      }
      doc["realized_snapshot_times"] = result->snapshot_times;
      doc["steps"] = result->steps;
      doc["contamination_time"] =
          result->contamination_time ? json(*result->contamination_time) : json(nullptr);
      const auto& series = recorder.series();
      if (series.size() > 0) {
        double norm_drift = 0.0;
        double energy_drift = 0.0;
        for (std::size_t i = 0; i < series.size(); ++i) {
          norm_drift = std::max(norm_drift, std::abs(series.norm[i] - series.norm.front()));
          energy_drift = std::max(
              energy_drift, std::abs(series.energy[i] - series.energy.front()) /
                                std::abs(series.energy.front()));
        }
        derived["norm_drift"] = norm_drift;
        derived["relative_energy_drift"] = energy_drift;
      }
    }
  } catch (const ConfigError& e) {
    doc["failure_stage"] = stage;
    doc["error"] = e.what();
    finish(exit_config_error, "failed");
    return manifest;
  } catch (const std::exception& e) {
    doc["failure_stage"] = stage;
    doc["error"] = e.what();
    finish(exit_numerical_failure, "failed");
    return manifest;
  }
  finish(exit_ok, "ok");
  return manifest;
}

SweepPlan parse_sweep(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("sweep file: ") + e.what());
  }
  if (!doc.is_object()) {
    throw ConfigError("sweep file must be a JSON object");
  }
  for (const auto& item : doc.items()) {
    if (item.key() != "base" && item.key() != "ranges" && item.key() != "mode") {
      throw ConfigError("unknown key '" + item.key() + "' in sweep file");
    }
  }
  if (!doc.contains("base")) {
    throw ConfigError("sweep file needs a 'base' config");
  }
  SweepPlan plan;
  plan.base = doc.at("base");
  const std::string mode = doc.value("mode", "product");
  if (mode == "product") {
    plan.mode = SweepMode::product;
  } else if (mode == "zip") {
    plan.mode = SweepMode::zip;
  } else {
    throw ConfigError("sweep mode must be \"product\" or \"zip\"");
  }
  const json ranges = doc.value("ranges", json::object());
  if (!ranges.is_object()) {
    throw ConfigError("sweep 'ranges' must map config keys to lists");
  }
  for (const auto& item : ranges.items()) {
    if (!item.value().is_array()) {
      throw ConfigError("sweep range '" + item.key() + "' must be a list");
    }
    plan.axes.push_back({item.key(), item.value().get<std::vector<json>>()});
  }
  return plan;
}

namespace {

void set_dotted(json& doc, const std::string& key, const json& value) {
  json* node = &doc;
  std::size_t start = 0;
  for (std::size_t dot = key.find('.'); dot != std::string::npos; dot = key.find('.', start)) {
    node = &(*node)[key.substr(start, dot - start)];
    start = dot + 1;
  }
  (*node)[key.substr(start)] = value;
}

std::vector<json> sweep_points(const SweepPlan& plan) {
  std::vector<json> points;
  if (plan.axes.empty()) {
    points.push_back(json::object());
    return points;
  }
  if (plan.mode == SweepMode::zip) {
    const std::size_t n = plan.axes.front().values.size();
    for (const SweepAxis& axis : plan.axes) {
      if (axis.values.size() != n) {
        throw ConfigError("zip sweep: all ranges need the same length");
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      json point = json::object();
      for (const SweepAxis& axis : plan.axes) {
        point[axis.key] = axis.values[i];
      }
      points.push_back(point);
    }
    return points;
  }
  points.push_back(json::object());
  for (const SweepAxis& axis : plan.axes) {
    std::vector<json> next;
    for (const json& partial : points) {
      for (const json& v : axis.values) {
        json point = partial;
        point[axis.key] = v;
        next.push_back(point);
      }
    }
    points = std::move(next);
  }
  return points;
}

}  // namespace

std::vector<RunManifest> sweep(const SweepPlan& plan, const fs::path& out_root, int jobs) {
  const std::vector<json> points = sweep_points(plan);
  std::vector<RunManifest> manifests(points.size());
  std::vector<fs::path> directories(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    directories[i] = out_root / fmt::format("run_{:04d}", i);
  }

  std::atomic<std::size_t> next{0};
  const auto worker = [&]() {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      json doc = plan.base;
      for (const auto& item : points[i].items()) {
        set_dotted(doc, item.key(), item.value());
      }
      try {
        manifests[i] = run_experiment(parse_config(doc.dump()), directories[i]);
      } catch (const Error& e) {
        manifests[i].exit_code = exit_config_error;
        manifests[i].document = {{"status", "failed"},
                                 {"failure_stage", "config"},
                                 {"error", e.what()},
                                 {"exit_code", exit_config_error}};
      }
    }
  };
  const int threads = std::max(1, std::min<int>(jobs, static_cast<int>(points.size())));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back(worker);
    }
  }

  json index = json::array();
  for (std::size_t i = 0; i < points.size(); ++i) {
    index.push_back({{"index", i},
                     {"directory", directories[i].filename().string()},
                     {"overrides", points[i]},
                     {"status", manifests[i].document.value("status", "failed")},
                     {"exit_code", manifests[i].exit_code},
                     {"well_count", manifests[i].well_count()}});
  }
  std::error_code ec;
  fs::create_directories(out_root, ec);
  write_json(out_root / "index.json", {{"runs", index}});
  return manifests;
}

}  // namespace helixqd
