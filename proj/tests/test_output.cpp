#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "chemochip/chemochip.hpp"

using namespace chemochip;

namespace {
std::vector<std::string> lines_of(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

struct TmpDir {
  std::filesystem::path path;
  TmpDir() {
    path = std::filesystem::temp_directory_path() /
           ("chemochip_test_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    std::filesystem::remove_all(path);
  }
  ~TmpDir() { std::filesystem::remove_all(path); }
};

DiscreteLayout tiny() {
  ChipLayout g;
  g.Lx = 1.0;
  g.Ly = 2.0;
  g.L = 1.0;
  g.channels = {{0.5, 1.0}};
  return build_grid(g, 0.5, 0.5, 0.1);
}
}  // namespace

TEST(Snapshot, FileNamesArePaddedSteps) {
  EXPECT_EQ(snapshot_name("channel_3", 42), "channel_3_00000042.csv");
}

TEST(Snapshot, ChamberAndChannelLayouts) {
  TmpDir tmp;
  const DiscreteLayout d = tiny();
  SystemState s = SystemState::zeros(d);
  s.t = 0.5;
  s.chambers[1].M(2, 1) = 0.25;
  s.channels[0].vT[1] = -3.0;
  write_snapshot(tmp.path, s, d, ChannelModel::Hyperbolic, 7);

  const auto right = lines_of(tmp.path / "chamber_right_00000007.csv");
  ASSERT_EQ(right.size(), 2u + 15u);
  EXPECT_EQ(right[0], "# t=5.000000000000000e-01 domain=chamber_right model=hyperbolic");
  EXPECT_EQ(right[1], "i,j,x,y,T,M,phi,omega");
  // row for (2, 1): x = Lx + L + 2 dx = 3
  EXPECT_EQ(right[2 + 2 * 5 + 1],
            "2,1,3.000000000000000e+00,5.000000000000000e-01,0.000000000000000e+00,"
            "2.500000000000000e-01,0.000000000000000e+00,0.000000000000000e+00");

  const auto ch = lines_of(tmp.path / "channel_0_00000007.csv");
  ASSERT_EQ(ch.size(), 2u + 3u);
  EXPECT_EQ(ch[1], "i,x,T,M,phi,omega,vT,vM");
  EXPECT_EQ(ch[3].substr(0, 24), "1,1.500000000000000e+00,");
  EXPECT_NE(ch[3].find(",-3.000000000000000e+00,"), std::string::npos);

  write_snapshot(tmp.path, s, d, ChannelModel::Parabolic, 8);
  EXPECT_EQ(lines_of(tmp.path / "channel_0_00000008.csv")[1], "i,x,T,M,phi,omega");
}

TEST(Ledger, OneRowPerDomainAndEntry) {
  TmpDir tmp;
  const DiscreteLayout d = tiny();
  SystemState s = SystemState::zeros(d);
  s.chambers[0].T.fill(1.0);
  MassLedger l;
  l.entries.push_back(total_mass(s, d));
  s.t = 0.1;
  l.entries.push_back(total_mass(s, d));
  write_ledger(tmp.path / "ledger.csv", l);
  const auto rows = lines_of(tmp.path / "ledger.csv");
  ASSERT_EQ(rows.size(), 1u + 2u * 3u);
  EXPECT_EQ(rows[0], "t,domain,mass_T,mass_M,mass_phi,mass_omega,total_T,total_M,total_phi,total_omega");
  EXPECT_EQ(rows[1].substr(0, 35), "0.000000000000000e+00,chamber_left,");
  EXPECT_EQ(rows[6].substr(0, 32), "1.000000000000000e-01,channel_0,");
  std::stringstream ss(rows[1]);
  std::vector<std::string> cells;
  for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
  ASSERT_EQ(cells.size(), 10u);
  EXPECT_DOUBLE_EQ(std::stod(cells[2]), 2.0);  // unit density on a 1 x 2 chamber
  EXPECT_DOUBLE_EQ(std::stod(cells[6]), 2.0);
}

TEST(Summary, CarriesDriftAndMinima) {
  const DiscreteLayout d = tiny();
  SystemState s = SystemState::zeros(d);
  s.chambers[0].T.fill(1.0);
  s.chambers[0].phi.fill(1.0);
  ModelParams p;
  p.k_omega = 0.0;
  SolveSettings st;
  st.channel_model = ChannelModel::Parabolic;
  RunConfig cfg;
  cfg.name = "sum";
  cfg.solver = st;
  const RunResult r = run_simulation(s, d, p, st, 0.2);
  const auto j = summarize(cfg, r);
  EXPECT_EQ(j["name"], "sum");
  EXPECT_EQ(j["steps"], 2);
  EXPECT_TRUE(j["mass_drift"]["T"].contains("value"));
  EXPECT_EQ(j["minimum"].size(), 4u);
  EXPECT_FALSE(j["negativity_flagged"].get<bool>());
}
