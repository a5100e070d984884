#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "chemochip/field.hpp"
#include "chemochip/geometry.hpp"

namespace chemochip {

struct ChamberState {
  Field2D T, M, phi, omega;

  Field2D& operator[](Species s) {
    switch (s) {
      case Species::T: return T;
      case Species::M: return M;
      case Species::Phi: return phi;
      default: return omega;
    }
  }
  const Field2D& operator[](Species s) const { return const_cast<ChamberState&>(*this)[s]; }
};

struct ChannelState {
  Field1D T, M, phi, omega;
  Field1D vT, vM;  // average fluxes, hyperbolic model only

  Field1D& operator[](Species s) {
    switch (s) {
      case Species::T: return T;
      case Species::M: return M;
      case Species::Phi: return phi;
      default: return omega;
    }
  }
  const Field1D& operator[](Species s) const { return const_cast<ChannelState&>(*this)[s]; }
  Field1D& flux(Species s) { return s == Species::T ? vT : vM; }
  const Field1D& flux(Species s) const { return s == Species::T ? vT : vM; }
};

/// Every evolved unknown at one time level.
struct SystemState {
  std::vector<ChamberState> chambers;
  std::vector<ChannelState> channels;
  double t = 0.0;

  static SystemState zeros(const DiscreteLayout& d) {
    SystemState s;
    for (std::size_t c = 0; c < d.chambers; ++c) {
      Field2D z(d.nx, d.ny);
      s.chambers.push_back({z, z, z, z});
    }
    for (const auto& ch : d.channels) {
      Field1D z(ch.n);
      s.channels.push_back({z, z, z, z, z, z});
    }
    return s;
  }
};

inline std::string chamber_id(std::size_t c) { return c == 0 ? "chamber_left" : "chamber_right"; }
inline std::string channel_id(std::size_t m) { return "channel_" + std::to_string(m); }

/// A grid node somewhere on the chip, for diagnostics.
struct NodeRef {
  std::string domain;
  std::size_t i = 0;
  std::size_t j = 0;
};

}  // namespace chemochip
