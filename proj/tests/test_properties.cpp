// Invariants of the coupled step on randomized states.

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "chemochip/chemochip.hpp"

using namespace chemochip;

namespace {
ChipLayout small_chip(double K) {
  ChipLayout g;
  g.Lx = 2.0;
  g.Ly = 3.0;
  g.L = 2.0;
  g.K = K;
  g.channels = {{0.5, 1.0}, {2.0, 2.5}};
  return g;
}

SystemState random_state(const DiscreteLayout& d, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> u(0.5, 1.5);
  SystemState s = SystemState::zeros(d);
  for (auto& c : s.chambers)
    for (Species sp : all_species)
      for (double& v : c[sp].values()) v = u(gen);
  for (auto& c : s.channels)
    for (Species sp : all_species)
      for (double& v : c[sp].values()) v = u(gen);
  return s;
}

// Zero reaction terms, so every species total is invariant.
ModelParams no_reactions() {
  ModelParams p;
  p.alpha_phi = p.beta_phi = p.alpha_omega = p.beta_omega = 0.0;
  p.k_omega = 0.0;
  p.k1 = 1e-6;
  return p;
}

SolveSettings settings(ChannelModel m) {
  SolveSettings s;
  s.channel_model = m;
  s.tolerance = 1e-13;
  return s;
}

class ByModel : public ::testing::TestWithParam<ChannelModel> {};
}  // namespace

TEST_P(ByModel, SingleStepConservesEverySpecies) {
  const DiscreteLayout d = build_grid(small_chip(1.0), 0.5, 0.5, 1e-2);
  const ModelParams p = no_reactions();
  for (unsigned seed = 1; seed <= 5; ++seed) {
    const SystemState s0 = random_state(d, seed);
    const SystemState s1 = advance_step(s0, d, p, settings(GetParam()));
    const LedgerEntry a = total_mass(s0, d), b = total_mass(s1, d);
    for (int k = 0; k < 4; ++k) EXPECT_NEAR(b.total[k], a.total[k], 1e-13 * a.total[k]) << "seed " << seed;
  }
}

TEST_P(ByModel, BalancedUniformStateIsSteady) {
  const DiscreteLayout d = build_grid(small_chip(2.0), 0.5, 0.5, 1e-2);
  ModelParams p;
  p.k_omega = 0.0;
  std::mt19937 gen(11);
  std::uniform_real_distribution<double> u(0.1, 2.0);
  for (int trial = 0; trial < 3; ++trial) {
    const double T = u(gen), M = u(gen);
    // source balance alpha u = beta c for both chemicals
    const double phi = p.alpha_phi * T / p.beta_phi, omega = p.alpha_omega * M / p.beta_omega;
    SystemState s = SystemState::zeros(d);
    for (auto& c : s.chambers) {
      c.T.fill(T);
      c.M.fill(M);
      c.phi.fill(phi);
      c.omega.fill(omega);
    }
    for (auto& c : s.channels) {
      c.T.fill(T);
      c.M.fill(M);
      c.phi.fill(phi);
      c.omega.fill(omega);
    }
    SolveSettings st;  // chemicals near 1e3 keep the residual above 1e-13
    st.channel_model = GetParam();
    const RunResult r = run_simulation(s, d, p, st, 0.05);
    const SystemState& f = r.final_state;
    for (const auto& c : f.chambers)
      for (std::size_t q = 0; q < c.T.size(); ++q) {
        EXPECT_NEAR(c.T.values()[q], T, 1e-12 * T);
        EXPECT_NEAR(c.M.values()[q], M, 1e-12 * M);
        EXPECT_NEAR(c.phi.values()[q], phi, 1e-12 * phi);
        EXPECT_NEAR(c.omega.values()[q], omega, 1e-12 * omega);
      }
    for (const auto& c : f.channels)
      for (std::size_t q = 0; q < c.T.size(); ++q) {
        EXPECT_NEAR(c.T[q], T, 1e-12 * T);
        EXPECT_NEAR(c.phi[q], phi, 1e-12 * phi);
        EXPECT_NEAR(c.vT[q], 0.0, 1e-12);
        EXPECT_NEAR(c.vM[q], 0.0, 1e-12);
      }
  }
}

TEST_P(ByModel, ZeroPermeabilityDecouplesDomains) {
  const DiscreteLayout d = build_grid(small_chip(0.0), 0.5, 0.5, 1e-2);
  const ModelParams p;
  const SolveSettings s = settings(GetParam());
  const SystemState s0 = random_state(d, 21);
  const SystemState coupled = run_simulation(s0, d, p, s, 0.05).final_state;
  for (std::size_t c = 0; c < d.chambers; ++c) {
    const DiscreteLayout dc = chamber_only(d, c);
    SystemState one = SystemState::zeros(dc);
    one.chambers[0] = s0.chambers[c];
    const SystemState alone = run_simulation(one, dc, p, s, 0.05).final_state;
    for (Species sp : all_species) EXPECT_TRUE(alone.chambers[0][sp] == coupled.chambers[c][sp]);
  }
  for (std::size_t m = 0; m < d.channels.size(); ++m) {
    const DiscreteLayout dm = channel_only(d, m);
    SystemState one = SystemState::zeros(dm);
    one.channels[0] = s0.channels[m];
    const SystemState alone = run_simulation(one, dm, p, s, 0.05).final_state;
    for (Species sp : all_species) EXPECT_TRUE(alone.channels[0][sp] == coupled.channels[m][sp]);
    EXPECT_TRUE(alone.channels[0].vT == coupled.channels[m].vT);
  }
}

TEST_P(ByModel, DrugDecayFollowsTrapezoidalFactor) {
  ChipLayout g = small_chip(0.0);
  const DiscreteLayout d = build_grid(g, 0.5, 0.5, 0.05);
  ModelParams p;
  p.k_omega = 0.0;
  p.K_T = 2.0;
  SystemState s = SystemState::zeros(d);
  for (auto& c : s.chambers) c.T.fill(1.0);
  for (auto& c : s.channels) c.T.fill(1.0);
  const SystemState n = advance_step(s, d, p, settings(GetParam()));
  const double b = p.K_T * d.dt;
  const double factor = (1.0 - 0.5 * b) / (1.0 + 0.5 * b);
  for (const auto& c : n.chambers)
    for (double v : c.T.values()) EXPECT_NEAR(v, factor, 1e-14);
  if (GetParam() == ChannelModel::Parabolic)
    for (const auto& c : n.channels)
      for (double v : c.T.values()) EXPECT_NEAR(v, factor, 1e-14);
}

INSTANTIATE_TEST_SUITE_P(Channels, ByModel,
                         ::testing::Values(ChannelModel::Parabolic, ChannelModel::Hyperbolic),
                         [](const auto& info) { return to_string(info.param); });

TEST(Naive, CopyNeumannLeaksMass) {
  const DiscreteLayout d = build_grid(small_chip(1.0), 0.5, 0.5, 1e-2);
  const ModelParams p = no_reactions();
  SolveSettings s = settings(ChannelModel::Parabolic);
  s.boundary = BoundaryMode::NaiveNeumann;
  const SystemState s0 = random_state(d, 3);
  const SystemState s1 = advance_step(s0, d, p, s);
  const double a = total_mass(s0, d).total[0], b = total_mass(s1, d).total[0];
  EXPECT_GT(std::abs(b - a) / a, 1e-6);
}

TEST(Cfl, RatiosAgainstLimits) {
  ChipLayout g = small_chip(1.0);
  ModelParams p;
  p.D_T = p.D_M = p.D_phi = p.D_omega = 1.0;
  // 2 * 1 * 0.05 / 0.25 = 0.4
  EXPECT_TRUE(cfl_check(build_grid(g, 0.5, 0.5, 0.05), p, ChannelModel::Parabolic).ok());
  // 0.8
  const CflReport r = cfl_check(build_grid(g, 0.5, 0.5, 0.1), p, ChannelModel::Parabolic);
  EXPECT_FALSE(r.ok());
  EXPECT_DOUBLE_EQ(r.entries[0].ratio, 0.8);
  EXPECT_DOUBLE_EQ(r.entries[1].ratio, 0.4);
}

TEST(Safeguards, KkAbortTrips) {
  ChipLayout g = small_chip(1e3);
  const DiscreteLayout d = build_grid(g, 0.5, 0.5, 1e-2);
  ModelParams p;
  p.D_T = p.D_M = p.D_phi = p.D_omega = 1.0;
  SolveSettings s = settings(ChannelModel::Parabolic);
  s.kk_action = SafeguardAction::Abort;
  EXPECT_THROW(Stepper(d, p, s), SafeguardAbort);
  s.kk_action = SafeguardAction::Warn;
  Stepper warn(d, p, s);
  ASSERT_GT(warn.safeguards().total, 0u);
  EXPECT_EQ(warn.safeguards().events.front().check, "kk_ratio");
}
