#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "chemochip/geometry.hpp"
#include "chemochip/state.hpp"

namespace chemochip {

inline double trap_1d(std::span<const double> z, double dx) {
  if (z.size() < 2) throw std::invalid_argument("trapezoid rule needs two points");
  double s = 0.5 * (z.front() + z.back());
  for (std::size_t i = 1; i + 1 < z.size(); ++i) s += z[i];
  return dx * s;
}

inline double trap_1d(const Field1D& z, double dx) { return trap_1d(z.values(), dx); }

inline double trap_2d(const Field2D& z, double dx, double dy) {
  const std::size_t I = z.extent_x() - 1;
  const std::size_t J = z.extent_y() - 1;
  if (I < 1 || J < 1) throw std::invalid_argument("trapezoid rule needs two points per axis");
  double s = 0.0;
  for (std::size_t i = 0; i <= I; ++i) {
    const double wi = (i == 0 || i == I) ? 0.5 : 1.0;
    double row = 0.5 * (z(i, 0) + z(i, J));
    for (std::size_t j = 1; j < J; ++j) row += z(i, j);
    s += wi * row;
  }
  return dx * dy * s;
}

/// Masses of every species at one instant, per domain and in total.
struct LedgerEntry {
  double t = 0.0;
  std::vector<std::string> domains;
  std::vector<std::array<double, 4>> per_domain;
  std::array<double, 4> total{};
};

struct MassLedger {
  std::vector<LedgerEntry> entries;
};

inline LedgerEntry total_mass(const SystemState& s, const DiscreteLayout& d) {
  LedgerEntry e;
  e.t = s.t;
  for (std::size_t c = 0; c < s.chambers.size(); ++c) {
    std::array<double, 4> m{};
    for (Species sp : all_species)
      m[static_cast<int>(sp)] = trap_2d(s.chambers[c][sp], d.dx, d.dy);
    e.domains.push_back(chamber_id(c));
    e.per_domain.push_back(m);
  }
  for (std::size_t k = 0; k < s.channels.size(); ++k) {
    std::array<double, 4> m{};
    for (Species sp : all_species)
      m[static_cast<int>(sp)] = trap_1d(s.channels[k][sp], d.channels[k].dx);
    e.domains.push_back(channel_id(k));
    e.per_domain.push_back(m);
  }
  for (const auto& m : e.per_domain)
    for (int k = 0; k < 4; ++k) e.total[k] += m[k];
  return e;
}

struct DriftReport {
  double value = 0.0;
  bool absolute = false;  // set when the initial mass vanishes
};

inline DriftReport mass_drift(const MassLedger& ledger, Species s) {
  if (ledger.entries.empty()) throw std::invalid_argument("empty ledger");
  const int k = static_cast<int>(s);
  const double m0 = ledger.entries.front().total[k];
  DriftReport r;
  r.absolute = m0 == 0.0;
  for (const auto& e : ledger.entries) {
    const double d = std::abs(e.total[k] - m0);
    r.value = std::max(r.value, r.absolute ? d : d / std::abs(m0));
  }
  return r;
}

inline constexpr double negativity_tolerance = -1e-13;

struct SpeciesMinimum {
  double value = std::numeric_limits<double>::infinity();
  NodeRef where;
};

struct PositivityReport {
  std::array<SpeciesMinimum, 4> minimum;
  bool flagged = false;
};

inline PositivityReport positivity_monitor(const SystemState& s) {
  PositivityReport r;
  auto see = [&](Species sp, double v, const std::string& dom, std::size_t i, std::size_t j) {
    auto& m = r.minimum[static_cast<int>(sp)];
    if (v < m.value) m = {v, {dom, i, j}};
  };
  for (std::size_t c = 0; c < s.chambers.size(); ++c)
    for (Species sp : all_species) {
      const Field2D& f = s.chambers[c][sp];
      for (std::size_t i = 0; i < f.extent_x(); ++i)
        for (std::size_t j = 0; j < f.extent_y(); ++j)
          if (f(i, j) < r.minimum[static_cast<int>(sp)].value) see(sp, f(i, j), chamber_id(c), i, j);
    }
  for (std::size_t m = 0; m < s.channels.size(); ++m)
    for (Species sp : all_species) {
      const Field1D& f = s.channels[m][sp];
      for (std::size_t i = 0; i < f.size(); ++i)
        if (f[i] < r.minimum[static_cast<int>(sp)].value) see(sp, f[i], channel_id(m), i, 0);
    }
  for (const auto& m : r.minimum)
    if (m.value < negativity_tolerance) r.flagged = true;
  return r;
}

}  // namespace chemochip
