#include <string>

#include <gtest/gtest.h>

#include "chemochip/chemochip.hpp"

using namespace chemochip;

namespace {
const std::string minimal = R"({
  "geometry": { "Lx": 1.0, "Ly": 1.0, "L": 1.0, "channels": [[0.25, 0.5]] },
  "grid": { "dx": 0.25, "dt": 0.01, "t_end": 0.1 }
})";

std::string with(const std::string& extra) {
  return R"({
  "geometry": { "Lx": 1.0, "Ly": 1.0, "L": 1.0, "channels": [[0.25, 0.5]] },
  "grid": { "dx": 0.25, "dt": 0.01, "t_end": 0.1 },)" +
         extra + "}";
}
}  // namespace

TEST(Config, DefaultsFillOmittedSections) {
  const RunConfig c = parse_config(minimal);
  EXPECT_EQ(c.params, ModelParams{});
  EXPECT_EQ(c.solver, SolveSettings{});
  EXPECT_EQ(c.solver.channel_model, ChannelModel::Hyperbolic);
  EXPECT_EQ(c.solver.aho_relaxation, AhoRelaxation::Consistent);
  EXPECT_DOUBLE_EQ(c.grid.dy, 0.25);  // dy follows dx
  EXPECT_DOUBLE_EQ(c.layout.K, 1.0);
  EXPECT_EQ(c.output_dir, "out");
}

TEST(Config, RoundTripIsLossless) {
  RunConfig c = parse_config(with(R"(
    "name": "rt",
    "params": { "k1": 1e-7, "K_T": 0.5, "alpha_T": 0.2 },
    "channel_model": "parabolic",
    "solver": { "scheme": "explicit", "aho_relaxation": "displayed", "boundary": "naive_neumann",
                "order": ["T", "M", "phi", "omega"], "kk_ratio": "abort", "monotonicity_every": 3 },
    "initial": {
      "T": [ { "domain": "left", "gaussian": { "amplitude": 2.0, "center": [0.5, 0.5], "width": 0.2 } } ],
      "omega": [ { "domain": "channel:0", "constant": 0.5 } ]
    },
    "output": { "directory": "somewhere" })"));
  EXPECT_EQ(c.solver.aho_relaxation, AhoRelaxation::Displayed);
  EXPECT_EQ(c.solver.boundary, BoundaryMode::NaiveNeumann);
  EXPECT_EQ(c.solver.order[0], Species::T);
  const RunConfig back = parse_config(serialize_config(c));
  EXPECT_EQ(back, c);
}

TEST(Config, ShippedConfigsRoundTrip) {
  for (const char* name : {"chip_mass_audit", "example1_space", "example1_time", "example2_chip",
                           "example3_strong_chemotaxis", "example4_parabolic_channels"}) {
    const RunConfig c = load_config(std::string(CHEMOCHIP_CONFIG_DIR) + "/" + name + ".json");
    EXPECT_EQ(parse_config(serialize_config(c)), c) << name;
    EXPECT_NO_THROW(c.discretize()) << name;
  }
}

TEST(Config, UnknownKeysAreErrors) {
  EXPECT_THROW(parse_config(with(R"("colour": "red")")), ConfigError);
  EXPECT_THROW(parse_config(with(R"("params": { "D_X": 1.0 })")), ConfigError);
  EXPECT_THROW(parse_config(with(R"("solver": { "aho_relaxation": "lazy" })")), ConfigError);
}

TEST(Config, GeometryErrors) {
  EXPECT_THROW(parse_config(R"({ "grid": { "dx": 0.25, "dt": 0.01 } })"), ConfigError);
  EXPECT_THROW(parse_config(R"({
    "geometry": { "Lx": 1.0, "Ly": 1.0, "L": 1.0, "channels": [[0.25, 0.5], [0.5, 0.75]] },
    "grid": { "dx": 0.25, "dt": 0.01 } })"),
               ConfigError);
  EXPECT_THROW(parse_config("{ not json"), ConfigError);
}

TEST(Config, BadValuesAreErrors) {
  EXPECT_THROW(parse_config(with(R"("params": { "D_T": 0.0 })")), ConfigError);
  EXPECT_THROW(parse_config(with(R"("solver": { "damping": 1.5 })")), ConfigError);
  EXPECT_THROW(parse_config(with(R"("solver": { "order": ["T", "T", "phi", "omega"] })")), ConfigError);
  EXPECT_THROW(parse_config(with(R"("initial": { "T": [ { "domain": "channel:3", "constant": 1.0 } ] })")),
               ConfigError);
}

TEST(Config, InitialProfilesLandOnTheRightDomains) {
  const RunConfig c = parse_config(with(R"(
    "initial": {
      "T": [ { "domain": "right", "constant": 2.0 } ],
      "phi": [ { "domain": "channels", "linear": { "value": 1.0, "slope": 2.0, "axis": "x" } } ]
    })"));
  const DiscreteLayout d = c.discretize();
  const SystemState s = initial_state(c, d);
  EXPECT_EQ(s.chambers[0].T(1, 1), 0.0);
  EXPECT_EQ(s.chambers[1].T(1, 1), 2.0);
  // ramp in channel-local coordinates: 1 + 2 x
  EXPECT_DOUBLE_EQ(s.channels[0].phi[0], 1.0);
  EXPECT_DOUBLE_EQ(s.channels[0].phi[4], 3.0);
  EXPECT_EQ(s.chambers[0].phi(0, 0), 0.0);
}

TEST(StepCount, RoundsUpPartialSteps) {
  EXPECT_EQ(step_count(1.0, 1e-3), 1000u);
  EXPECT_EQ(step_count(0.0, 1e-3), 0u);
  EXPECT_EQ(step_count(0.25, 0.1), 3u);
  EXPECT_THROW(step_count(-1.0, 0.1), ConfigError);
}
