#include <cmath>

#include <gtest/gtest.h>

#include "chemochip/chemochip.hpp"

using namespace chemochip;

TEST(Sensitivity, TableValuesAtZeroAttractant) {
  ModelParams p;
  // 3.9e-9 / (5e-6)^2
  EXPECT_NEAR(chemotactic_sensitivity(1.0, 0.0, p), 156.0, 1e-9);
}

TEST(Sensitivity, DoublesDenominatorBase) {
  ModelParams p;
  // 2 * 3.9e-9 / (1e-5)^2
  EXPECT_NEAR(chemotactic_sensitivity(2.0, 5e-6, p), 78.0, 1e-9);
}

TEST(Sensitivity, GeneralExponentMatchesPow) {
  ModelParams p;
  p.gamma = 1.5;
  EXPECT_NEAR(chemotactic_sensitivity(3.0, 0.25, p), 3.0 * p.k1 / std::pow(p.k2 + 0.25, 1.5), 1e-22);
}

TEST(Sensitivity, ZeroCellsGiveZero) {
  ModelParams p;
  EXPECT_EQ(chemotactic_sensitivity(0.0, 1.0, p), 0.0);
}

TEST(Sensitivity, RejectsAttractantBelowMinusK2) {
  ModelParams p;
  EXPECT_THROW(chemotactic_sensitivity(1.0, -1e-5, p), InvalidStateError);
}

TEST(KillRate, HalfAtUnitOmega) {
  ModelParams p;
  EXPECT_DOUBLE_EQ(kill_rate(1.0, p), 0.5);
  EXPECT_NEAR(kill_rate(999.0, p), 0.999, 1e-15);
  EXPECT_EQ(kill_rate(0.0, p), 0.0);
}

TEST(KillRate, PoleIsRejected) {
  ModelParams p;
  EXPECT_THROW(kill_rate(-1.0, p), InvalidStateError);
}

TEST(DrugRate, HalvesAfterOneHalfLife) {
  ModelParams p;
  p.K_M = 2.0;
  p.alpha_M = std::log(2.0);
  EXPECT_NEAR(drug_rate(1.0, Species::M, p), 1.0, 1e-15);
}

TEST(DrugRate, DefaultsAreZeroAndChemicalsNeverDecayByDrug) {
  ModelParams p;
  for (double t : {0.0, 1.0, 50.0}) {
    EXPECT_EQ(drug_rate(t, Species::T, p), 0.0);
    EXPECT_EQ(drug_rate(t, Species::M, p), 0.0);
  }
  p.K_T = 3.0;
  EXPECT_EQ(drug_rate(0.0, Species::Phi, p), 0.0);
  EXPECT_EQ(drug_rate(0.0, Species::T, p), 3.0);
}

TEST(WaveSpeed, DefaultsToRootDiffusivity) {
  ModelParams p;
  EXPECT_DOUBLE_EQ(p.wave_speed(Species::T), std::sqrt(56.0));
  EXPECT_DOUBLE_EQ(p.wave_speed(Species::M), 30.0);
  p.lambda_T_wave = 4.0;
  EXPECT_DOUBLE_EQ(p.wave_speed(Species::T), 4.0);
}

namespace {
DiscreteLayout single_chamber() {
  ChipLayout g;
  g.Lx = 1.0;
  g.Ly = 1.0;
  g.L = 1.0;
  g.right_chamber = false;
  return build_grid(g, 0.25, 0.25, 1e-3);
}
}  // namespace

TEST(Monotonicity, KillingBoundFailsForLargeTumorUnderImmuneAttack) {
  const DiscreteLayout d = single_chamber();
  SystemState s = SystemState::zeros(d);
  s.chambers[0].T(2, 2) = 3.0;
  s.chambers[0].omega(2, 2) = 1.0;
  ModelParams p;
  const MonotonicityReport r = monotonicity_check(s, d, p);
  EXPECT_NEAR(r.killing.worst, 1.5, 1e-15);
  EXPECT_FALSE(r.killing.ok);
  EXPECT_EQ(r.killing.where.i, 2u);
  EXPECT_EQ(r.killing.where.j, 2u);
  EXPECT_TRUE(r.chemotaxis.ok);
}

TEST(Monotonicity, ChemotaxisBoundUsesGradientMagnitude) {
  const DiscreteLayout d = single_chamber();
  SystemState s = SystemState::zeros(d);
  ModelParams p;
  // phi = x on the grid: gradient 1 everywhere, sensitivity k1/(k2+phi)^2 largest at x=0.
  for (std::size_t i = 0; i < s.chambers[0].phi.extent_x(); ++i)
    for (std::size_t j = 0; j < s.chambers[0].phi.extent_y(); ++j) s.chambers[0].phi(i, j) = 0.25 * i;
  const MonotonicityReport r = monotonicity_check(s, d, p);
  EXPECT_NEAR(r.chemotaxis.worst, 156.0, 1e-9);
  EXPECT_EQ(r.chemotaxis.where.i, 0u);
  EXPECT_FALSE(r.chemotaxis.ok);
  EXPECT_DOUBLE_EQ(r.chemotaxis.bound, 30.0);
}

TEST(Monotonicity, QuietStatePasses) {
  const DiscreteLayout d = single_chamber();
  SystemState s = SystemState::zeros(d);
  ModelParams p;
  EXPECT_TRUE(monotonicity_check(s, d, p).ok());
}
