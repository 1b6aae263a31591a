#include <doctest.h>

#include <string>

#include "helixqd/config.hpp"
#include "helixqd/errors.hpp"

using namespace helixqd;

namespace {

const char* minimal = R"({
  "helix": {"h": 5.8, "R": 4},
  "grid": {"s_min": -150, "s_max": 1000, "n_points": 2301},
  "wavepacket": {"s0": 220, "delta_s": 4, "p0": 0}
})";

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("minimal config gets the documented defaults") {
  const ExperimentConfig c = parse_config(minimal);
  CHECK(c.pitch == 5.8);
  CHECK(c.radius == 4.0);
  CHECK(c.mass == 1.0);
  CHECK(c.s_cut == 1.0);
  CHECK(c.interaction == InteractionKind::helical);
  CHECK(c.propagation.dt == 0.02);
  CHECK(c.propagation.observable_stride == 50);
  CHECK(c.propagation.t_final == default_final_time);
  CHECK_FALSE(c.propagation.abort_on_contamination);
  CHECK(c.spectra.enabled);
  CHECK(c.spectra.n_points == 4001);
  CHECK(c.spectra.order == 10);
  REQUIRE(c.grid);
  CHECK(c.make_grid().spacing() == 0.5);
}

TEST_CASE("heavier runs default to a longer step") {
  const ExperimentConfig c = parse_config(R"({"helix": {"h": 10, "R": 10}, "mass": 10,
    "grid": {"s_min": -150, "s_max": 1500, "n_points": 3301},
    "wavepacket": {"s0": 350, "delta_s": 1.2}})");
  CHECK(c.propagation.dt == 0.05);
  CHECK(c.propagation.observable_stride == 20);
  CHECK(c.wavepacket->p0 == 0.0);
  CHECK(default_time_step(1.0) == 0.02);
  CHECK(default_observable_stride(0.02) == 50);
}

TEST_CASE("landscape-only config") {
  const ExperimentConfig c = parse_config(R"({"helix": {"h": 3, "R": 5}})");
  CHECK_FALSE(c.grid);
  CHECK_FALSE(c.wavepacket);
  CHECK_THROWS_AS(c.make_grid(), ConfigError);
}

TEST_CASE("errors name the offending key or position") {
  const std::string sigma = error_of(R"({"helix": {"h": 5.8, "R": 4},
    "grid": {"s_min": -150, "s_max": 1000, "n_points": 2301},
    "wavepacket": {"s0": 220, "sigma": 4}})");
  CHECK(sigma.find("wavepacket.sigma") != std::string::npos);
  CHECK(error_of(R"({"helix": {"h": 5.8, "R": 4}, "colour": 1})").find("colour") !=
        std::string::npos);
  CHECK(error_of(R"({"helix": {"h": 5.8}})").find("helix.R") != std::string::npos);
  CHECK(error_of(R"({"helix": {"h": "tall", "R": 4}})").find("helix.h") != std::string::npos);

  const std::string syntax = error_of("{\n  \"helix\": {\"h\": 5.8,\n  \"R\": }\n}");
  CHECK(syntax.find("line 3") != std::string::npos);
  CHECK(error_of("[1, 2]").find("object") != std::string::npos);
  CHECK(error_of(R"({"preset": "fig99"})").find("fig99") != std::string::npos);
  CHECK(error_of(R"({"helix": {"h": 5.8, "R": 4}, "potential": "yukawa"})").find("potential") !=
        std::string::npos);
}

TEST_CASE("invariant violations") {
  // Packet within 8 widths of the edge.
  CHECK_THROWS_AS(parse_config(R"({"helix": {"h": 5.8, "R": 4},
    "grid": {"s_min": -150, "s_max": 1000, "n_points": 2301},
    "wavepacket": {"s0": 980, "delta_s": 4}})"),
                  ConfigError);
  // Grid too short for the outermost well (max at s ~ 72.4).
  CHECK_THROWS_AS(parse_config(R"({"helix": {"h": 5.8, "R": 4},
    "grid": {"s_min": -150, "s_max": 60, "n_points": 421},
    "wavepacket": {"s0": 20, "delta_s": 1}})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"helix": {"h": -1, "R": 4}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"helix": {"h": 5.8, "R": 4}, "mass": 0})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"helix": {"h": 5.8, "R": 4}, "spectra": {"order": 9}})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"helix": {"h": 5.8, "R": 4},
    "wavepacket": {"s0": 20, "delta_s": 1}})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"preset": "fig3", "propagation": {"dt": 0}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"preset": "fig3", "propagation": {"snapshot_times": [2000]}})"),
                  ConfigError);
}

TEST_CASE("presets") {
  const auto& presets = list_presets();
  CHECK(presets.size() == 12);
  for (const PresetInfo& p : presets) {
    CAPTURE(p.name);
    CHECK_FALSE(p.caption.empty());
    CHECK(p.config.name == p.name);
    CHECK_NOTHROW(validate(p.config));
    CHECK(p.config == preset_config(p.name));
  }

  const ExperimentConfig fig3 = parse_config(R"({"preset": "fig3"})");
  CHECK(fig3.pitch == 5.8);
  CHECK(fig3.radius == 4.0);
  CHECK(fig3.mass == 1.0);
  CHECK(fig3.wavepacket->s0 == 220.0);
  CHECK(fig3.wavepacket->delta_s == 4.0);
  CHECK(fig3.wavepacket->p0 == 0.0);
  CHECK(fig3.grid->n_points == 2301);
  CHECK(fig3.grid->s_min == -150.0);
  CHECK(fig3.grid->s_max == 1000.0);

  CHECK(preset_config("fig6").wavepacket->p0 == -0.154);
  const ExperimentConfig fig7 = preset_config("fig7");
  CHECK(fig7.wavepacket->p0 == -0.8);
  CHECK(fig7.grid->s_min == -500.0);
  CHECK(fig7.grid->s_max == 1500.0);
  CHECK(fig7.grid->n_points == 4001);
  const ExperimentConfig fig12 = preset_config("fig12");
  CHECK(fig12.wavepacket->s0 == 98.0);
  CHECK(fig12.wavepacket->delta_s == 1.2);
  CHECK(fig12.mass == 10.0);
  CHECK(fig12.propagation.dt == 0.05);
  CHECK(preset_config("fig2").interaction == InteractionKind::coulomb);
  CHECK(preset_config("fig8").wavepacket->s0 == 350.0);
  CHECK_THROWS_AS(preset_config("nope"), ConfigError);
}

TEST_CASE("preset values can be overridden") {
  const ExperimentConfig c =
      parse_config(R"({"preset": "fig3", "wavepacket": {"p0": -0.1}, "name": "custom"})");
  CHECK(c.wavepacket->p0 == -0.1);
  CHECK(c.wavepacket->s0 == 220.0);
  CHECK(c.name == "custom");
  CHECK(c.propagation.snapshot_times == preset_config("fig3").propagation.snapshot_times);
}

TEST_CASE("serialization round trip") {
  for (const PresetInfo& p : list_presets()) {
    CAPTURE(p.name);
    CHECK(parse_config(serialize_config(p.config)) == p.config);
  }
  const ExperimentConfig c = parse_config(minimal);
  CHECK(parse_config(serialize_config(c)) == c);
  const ExperimentConfig bare = parse_config(R"({"helix": {"h": 3, "R": 5}, "mass": 2.5})");
  CHECK(parse_config(serialize_config(bare)) == bare);
  CHECK(config_from_json(to_json(bare)) == bare);
}
