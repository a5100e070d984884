#include <vector>

#include <gtest/gtest.h>

#include "chemochip/chemochip.hpp"

using namespace chemochip;

TEST(Ghost, ChamberSide) {
  // r = 2 dx / D = 0.5: 0.5 + 1 * 0.5 * (1.2 - 1.0) + 0.5 * 0.2
  EXPECT_NEAR(ghost_value_2d(0.5, 1.0, 1.2, 0.2, 2.0, 0.5, 1.0), 0.7, 1e-15);
  // no exchange and no flux: plain reflection
  EXPECT_DOUBLE_EQ(ghost_value_2d(0.9, 3.0, 7.0, 0.0, 1.0, 0.5, 0.0), 0.9);
  EXPECT_THROW(ghost_value_2d(0, 0, 0, 0, 0.0, 1, 1), std::invalid_argument);
}

TEST(Ghost, ChannelSide) {
  // r = 1: 2 - 1*1*0.5*1 + 1*1*0.75 - 0.2
  EXPECT_NEAR(ghost_value_1d(2.0, 1.0, 0.75, 0.2, 1.0, 0.5, 1.0, 0.5), 2.05, 1e-15);
}

TEST(Interface, FluxFromDensities) {
  EXPECT_DOUBLE_EQ(hyperbolic_interface_v0(1.0, 1.5, 2.0, 0.5), 2.0);
  EXPECT_DOUBLE_EQ(hyperbolic_interface_v0(4.0, 9.0, 0.0, 0.5), 0.0);
}

TEST(Interface, WallQuadratureIsTrapezoid) {
  const std::vector<double> w{1.0, 2.0, 3.0};
  EXPECT_DOUBLE_EQ(wall_quadrature(w, 0.25), 0.25 * (0.5 + 2.0 + 1.5));
  EXPECT_THROW(wall_quadrature(std::vector<double>{1.0}, 0.25), std::invalid_argument);
}

TEST(KkRatio, SmallRatiosPass) {
  const KkRatioReport r = kk_ratio_check(1.0, 1e-3, 0.5, 0.5, 0.5, 2);
  EXPECT_DOUBLE_EQ(r.per_dx.value, 2e-3);
  EXPECT_DOUBLE_EQ(r.wall_sum.value, 2e-3);
  EXPECT_DOUBLE_EQ(r.per_sigma.value, 1e-3);
  EXPECT_TRUE(r.ok());
}

TEST(KkRatio, LargePermeabilityFails) {
  const KkRatioReport r = kk_ratio_check(5e4, 1e-3, 0.5, 0.5, 0.5, 2);
  EXPECT_DOUBLE_EQ(r.per_dx.value, 100.0);
  EXPECT_FALSE(r.per_dx.ok);
  EXPECT_FALSE(r.ok());
}

namespace {
DiscreteLayout tiny_chip(double K) {
  ChipLayout g;
  g.Lx = 1.0;
  g.Ly = 1.0;
  g.L = 1.0;
  g.K = K;
  g.channels = {{0.25, 0.5}};
  return build_grid(g, 0.25, 0.25, 1e-2);
}
}  // namespace

TEST(KkRatio, LayoutOverloadUsesFinerSpacing) {
  const KkRatioReport r = kk_ratio_check(tiny_chip(2.0), 0);
  EXPECT_DOUBLE_EQ(r.per_dx.value, 2.0 * 1e-2 / 0.25);
  EXPECT_TRUE(r.ok());
}

// Exchange terms alone move mass between a wall and a channel end without creating any.
TEST(Exchange, WallAndEndTermsBalance) {
  const DiscreteLayout d = tiny_chip(3.0);
  Field2D u(d.nx, d.ny, 0.0);
  Field1D c(d.channels[0].n, 0.0);
  const InterfaceMap im = interface_indices(d, 0, Side::Left);
  for (std::size_t j = im.j_a; j <= im.j_b; ++j) u(im.wall_i, j) = 1.0 + 0.1 * j;
  c[0] = 0.4;
  ChamberBlock b;
  b.old = &u;
  b.dx = d.dx;
  b.dy = d.dy;
  b.dt = d.dt;
  ChannelBlock ch;
  ch.old = &c;
  ch.offset = u.size();
  ch.dx = d.channels[0].dx;
  ch.dt = d.dt;
  const Coupling cp{im, &b, &ch};
  ExplicitSink s(u.size() + c.size());
  emit_exchange_wall(s, cp, 0.0);
  emit_exchange_end(s, cp, 0.0);
  double wall = 0.0;
  for (std::size_t j = im.j_a; j <= im.j_b; ++j)
    wall += s.values()[u.index(im.wall_i, j)] * d.dy * 0.5 * d.dx;  // interior rows, edge column
  const double end = s.values()[ch.offset] * 0.5 * ch.dx;
  EXPECT_NEAR(wall + end, 0.0, 1e-16);
  EXPECT_GT(end, 0.0);  // the wall is denser, so mass flows into the channel
}
