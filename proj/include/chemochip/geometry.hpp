#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "chemochip/errors.hpp"

namespace chemochip {

/// Channel mouth on the shared wall, a <= y <= b.
struct Interval {
  double a = 0.0;
  double b = 0.0;
  bool operator==(const Interval&) const = default;
};

/// The physical chip: chambers [0,Lx]x[0,Ly] joined by horizontal channels of length L.
struct ChipLayout {
  double Lx = 100.0;
  double Ly = 1000.0;
  double L = 500.0;
  std::vector<Interval> channels;
  double K = 1.0;
  std::vector<double> channel_K;   // optional per-channel permeability, overrides K
  std::vector<double> channel_dx;  // optional per-channel spacing, 0 means chamber dx
  bool right_chamber = true;

  double sigma() const { return channels.empty() ? 0.0 : channels.front().b - channels.front().a; }
  double permeability(std::size_t m) const { return m < channel_K.size() ? channel_K[m] : K; }
  std::size_t chamber_count() const { return right_chamber ? 2 : 1; }

  bool operator==(const ChipLayout&) const = default;
};

enum class Violation { NonPositiveSize, BoundaryEscape, Overlap, NonUniformWidth, BadOverride };

struct LayoutIssue {
  Violation kind;
  std::size_t channel;  // zero-based channel index
  std::string message;
};

struct ValidationReport {
  std::vector<LayoutIssue> issues;
  bool ok() const { return issues.empty(); }
  std::string describe() const {
    std::ostringstream os;
    for (const auto& e : issues) os << e.message << '\n';
    return os.str();
  }
};

inline ValidationReport validate_layout(const ChipLayout& g) {
  ValidationReport r;
  auto add = [&](Violation v, std::size_t m, const std::string& msg) {
    r.issues.push_back({v, m, msg});
  };
  if (!(g.Lx > 0) || !(g.Ly > 0) || !(g.L > 0))
    add(Violation::NonPositiveSize, 0, "chamber and channel sizes must be positive");
  if (!(g.K >= 0)) add(Violation::NonPositiveSize, 0, "permeability K must be nonnegative");
  const std::size_t M = g.channels.size();
  const double sigma = g.sigma();
  const double tol = 1e-12 * std::max(1.0, g.Ly);
  for (std::size_t m = 0; m < M; ++m) {
    const auto& c = g.channels[m];
    if (!(c.b > c.a))
      add(Violation::NonPositiveSize, m, "channel " + std::to_string(m) + ": empty mouth");
    if (std::abs((c.b - c.a) - sigma) > tol)
      add(Violation::NonUniformWidth, m, "channel " + std::to_string(m) + ": width differs");
    if (m + 1 < M && c.b >= g.channels[m + 1].a)
      add(Violation::Overlap, m, "channel " + std::to_string(m) + ": overlaps its successor");
  }
  if (M > 0) {
    if (g.channels.front().a <= 0)
      add(Violation::BoundaryEscape, 0, "channel 0: mouth touches the bottom wall");
    if (g.channels.back().b >= g.Ly)
      add(Violation::BoundaryEscape, M - 1, "channel " + std::to_string(M - 1) + ": mouth touches the top wall");
  }
  if (g.channel_K.size() > M)
    add(Violation::BadOverride, 0, "more permeabilities than channels");
  for (std::size_t m = 0; m < g.channel_K.size(); ++m)
    if (!(g.channel_K[m] >= 0))
      add(Violation::BadOverride, m, "channel " + std::to_string(m) + ": negative permeability");
  if (g.channel_dx.size() > M) add(Violation::BadOverride, 0, "more spacings than channels");
  for (std::size_t m = 0; m < g.channel_dx.size(); ++m)
    if (g.channel_dx[m] < 0)
      add(Violation::BadOverride, m, "channel " + std::to_string(m) + ": negative spacing");
  return r;
}

enum class Side { Left, Right };

/// Where a channel end meets a chamber wall.
struct InterfaceMap {
  std::size_t channel = 0;
  Side side = Side::Left;
  std::size_t chamber = 0;  // 0 left, 1 right
  std::size_t wall_i = 0;
  std::size_t j_a = 0;
  std::size_t j_b = 0;
  double sigma = 0.0;
  double K = 0.0;
};

struct ChannelGrid {
  std::size_t n = 0;  // interior nodes, ends are 0 and n+1
  double dx = 0.0;
  double length = 0.0;
  double y_mid = 0.0;
  double K = 0.0;
};

/// Uniform grids for every domain plus the interface index maps.
struct DiscreteLayout {
  double dx = 0.0;
  double dy = 0.0;
  double dt = 0.0;
  std::size_t nx = 0;
  std::size_t ny = 0;
  std::size_t chambers = 2;
  double Lx = 0.0;
  double L = 0.0;
  std::vector<ChannelGrid> channels;
  std::vector<InterfaceMap> interfaces;

  /// Global x coordinate of the left edge of chamber c.
  double chamber_origin(std::size_t c) const { return c == 0 ? 0.0 : Lx + L; }
};

namespace detail {
inline std::optional<std::size_t> exact_ratio(double length, double step) {
  if (!(step > 0)) return std::nullopt;
  const double r = length / step;
  const double k = std::round(r);
  if (k < 0 || std::abs(r - k) > 1e-9 * std::max(1.0, std::abs(r))) return std::nullopt;
  return static_cast<std::size_t>(k);
}
}  // namespace detail

inline DiscreteLayout build_grid(const ChipLayout& g, double dx, double dy, double dt) {
  auto report = validate_layout(g);
  if (!report.ok()) throw ConfigError("invalid layout:\n" + report.describe());
  if (!(dx > 0) || !(dy > 0) || !(dt > 0)) throw ConfigError("dx, dy, dt must be positive");

  auto steps = [](double len, double h, const char* what) {
    auto k = detail::exact_ratio(len, h);
    if (!k || *k < 1) throw ConfigError(std::string(what) + " is not a multiple of the grid spacing");
    return *k;
  };

  DiscreteLayout d;
  d.dx = dx;
  d.dy = dy;
  d.dt = dt;
  d.Lx = g.Lx;
  d.L = g.L;
  d.chambers = g.chamber_count();
  d.nx = steps(g.Lx, dx, "Lx") - 1;
  d.ny = steps(g.Ly, dy, "Ly") - 1;
  for (std::size_t m = 0; m < g.channels.size(); ++m) {
    ChannelGrid c;
    c.dx = (m < g.channel_dx.size() && g.channel_dx[m] > 0) ? g.channel_dx[m] : dx;
    c.n = steps(g.L, c.dx, "channel length") - 1;
    c.length = g.L;
    c.K = g.permeability(m);
    c.y_mid = 0.5 * (g.channels[m].a + g.channels[m].b);
    d.channels.push_back(c);

    auto ja = detail::exact_ratio(g.channels[m].a, dy);
    auto jb = detail::exact_ratio(g.channels[m].b, dy);
    if (!ja || !jb)
      throw ConfigError("channel " + std::to_string(m) + ": mouth is not aligned to the grid");
    for (std::size_t c_idx = 0; c_idx < d.chambers; ++c_idx) {
      InterfaceMap im;
      im.channel = m;
      im.side = c_idx == 0 ? Side::Left : Side::Right;
      im.chamber = c_idx;
      im.wall_i = c_idx == 0 ? d.nx + 1 : 0;
      im.j_a = *ja;
      im.j_b = *jb;
      im.sigma = static_cast<double>(*jb - *ja) * dy;
      im.K = c.K;
      d.interfaces.push_back(im);
    }
  }
  return d;
}

/// The same grid restricted to chamber c alone, with no channels attached.
inline DiscreteLayout chamber_only(const DiscreteLayout& d, std::size_t c) {
  if (c >= d.chambers) throw std::out_of_range("no chamber " + std::to_string(c));
  DiscreteLayout r = d;
  r.chambers = 1;
  r.channels.clear();
  r.interfaces.clear();
  return r;
}

/// The same grid restricted to channel m alone, both ends free.
inline DiscreteLayout channel_only(const DiscreteLayout& d, std::size_t m) {
  if (m >= d.channels.size()) throw std::out_of_range("no channel " + std::to_string(m));
  DiscreteLayout r = d;
  r.chambers = 0;
  r.channels = {d.channels[m]};
  r.interfaces.clear();
  return r;
}

inline InterfaceMap interface_indices(const DiscreteLayout& d, std::size_t m, Side side) {
  for (const auto& im : d.interfaces)
    if (im.channel == m && im.side == side) return im;
  throw std::out_of_range("no interface for channel " + std::to_string(m));
}

}  // namespace chemochip
