#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <stdexcept>

#include "chemochip/geometry.hpp"
#include "chemochip/relation.hpp"
#include "chemochip/scheme1d_hyperbolic.hpp"
#include "chemochip/scheme1d_parabolic.hpp"
#include "chemochip/scheme2d.hpp"

namespace chemochip {

/// Trapezoid weight of wall node j within the mouth [j_a, j_b].
inline double mouth_weight(const InterfaceMap& m, std::size_t j) {
  return (j == m.j_a || j == m.j_b) ? 0.5 : 1.0;
}

/// dy-weighted trapezoidal integral of the wall values over the mouth.
inline double wall_quadrature(std::span<const double> wall, double dy) {
  if (wall.size() < 2) throw std::invalid_argument("a mouth spans at least two wall nodes");
  double s = 0.5 * (wall.front() + wall.back());
  for (std::size_t k = 1; k + 1 < wall.size(); ++k) s += wall[k];
  return dy * s;
}

/// Ghost value beyond the chamber wall implied by the exchange condition.
inline double ghost_value_2d(double u_inner, double u_wall, double u_channel, double f_wall,
                             double D, double dx, double K) {
  if (D == 0.0) throw std::invalid_argument("ghost value needs D > 0");
  const double r = 2.0 * dx / D;
  return u_inner + K * r * (u_channel - u_wall) + r * f_wall;
}

/// Ghost value before the channel mouth implied by the exchange condition.
inline double ghost_value_1d(double u1, double u0, double wall_integral, double f0, double D,
                             double dx, double K, double sigma) {
  if (D == 0.0) throw std::invalid_argument("ghost value needs D > 0");
  const double r = 2.0 * dx / D;
  return u1 - K * r * sigma * u0 + r * K * wall_integral - r * f0;
}

/// Flux leaving the chamber into the channel, -K sigma u_0 + K int u_wall.
inline double hyperbolic_interface_v0(double u0, double wall_integral, double K, double sigma) {
  if (K == 0.0) return 0.0;
  return -K * sigma * u0 + K * wall_integral;
}

struct RatioCheck {
  double value = 0.0;
  bool ok = true;
};

struct KkRatioReport {
  RatioCheck per_dx;      // K dt / dx
  RatioCheck wall_sum;    // K dt dy / dx times the number of mouth nodes
  RatioCheck per_sigma;   // K dt sigma / dx
  bool ok() const { return per_dx.ok && wall_sum.ok && per_sigma.ok; }
};

inline KkRatioReport kk_ratio_check(double K, double dt, double dx, double dy, double sigma,
                                    std::size_t mouth_nodes, double threshold = 0.5) {
  KkRatioReport r;
  r.per_dx.value = K * dt / dx;
  r.wall_sum.value = K * dt * dy / dx * static_cast<double>(mouth_nodes);
  r.per_sigma.value = K * dt * sigma / dx;
  for (RatioCheck* c : {&r.per_dx, &r.wall_sum, &r.per_sigma}) c->ok = c->value <= threshold;
  return r;
}

inline KkRatioReport kk_ratio_check(const DiscreteLayout& d, std::size_t m,
                                    double threshold = 0.5) {
  const InterfaceMap im = interface_indices(d, m, Side::Left);
  const double h = std::min(d.dx, d.channels[m].dx);
  return kk_ratio_check(im.K, d.dt, h, d.dy, im.sigma, im.j_b - im.j_a + 1, threshold);
}

/// A channel end joined to a chamber wall, for one species.
struct Coupling {
  InterfaceMap map;
  const ChamberBlock* chamber = nullptr;
  const ChannelBlock* channel = nullptr;

  std::size_t channel_node() const {
    return map.side == Side::Left ? 0 : channel->last();
  }
};

/// Exchange terms on the chamber wall rows, 2K dt/dx w_j (u_c - u_w).
template <RelationSink S>
inline void emit_exchange_wall(S& s, const Coupling& cp, double w) {
  const double K = cp.map.K;
  if (K == 0.0) return;
  const ChamberBlock& b = *cp.chamber;
  const std::size_t e = cp.channel_node();
  const double uc = (*cp.channel->old)[e];
  for (std::size_t j = cp.map.j_a; j <= cp.map.j_b; ++j) {
    const std::size_t row = b.col(cp.map.wall_i, j);
    const double c = 2.0 * K * b.dt / b.dx * mouth_weight(cp.map, j);
    emit_mixed(s, row, cp.channel->col(e), c, uc, w);
    emit_mixed(s, row, row, -c, (*b.old)(cp.map.wall_i, j), w);
  }
}

/// Exchange terms on the channel end row, -2K dt/dx_c (sigma u_c - int u_w).
template <RelationSink S>
inline void emit_exchange_end(S& s, const Coupling& cp, double w) {
  const double K = cp.map.K;
  if (K == 0.0) return;
  const ChannelBlock& c = *cp.channel;
  const ChamberBlock& b = *cp.chamber;
  const std::size_t e = cp.channel_node();
  const std::size_t row = c.col(e);
  const double k = 2.0 * K * c.dt / c.dx;
  emit_mixed(s, row, row, -k * cp.map.sigma, (*c.old)[e], w);
  for (std::size_t j = cp.map.j_a; j <= cp.map.j_b; ++j)
    emit_mixed(s, row, b.col(cp.map.wall_i, j), k * b.dy * mouth_weight(cp.map, j),
               (*b.old)(cp.map.wall_i, j), w);
}

/// Wall relations over the mouth: edge formula plus exchange with the channel end.
template <RelationSink S>
inline void interface_update_u_2d(S& s, const Coupling& cp, double w_chamber, double w_exchange) {
  for (std::size_t j = cp.map.j_a; j <= cp.map.j_b; ++j)
    emit_chamber_node(s, *cp.chamber, cp.map.wall_i, j, w_chamber);
  emit_exchange_wall(s, cp, w_exchange);
}

/// Parabolic channel end relation: free-end formula plus exchange with the wall.
template <RelationSink S>
inline void interface_update_u_1d_parabolic(S& s, const Coupling& cp, double w_channel,
                                            double w_exchange) {
  emit_channel_node(s, *cp.channel, cp.channel_node(), w_channel);
  emit_exchange_end(s, cp, w_exchange);
}

/// Both sides of the interface for a chemoattractant.
template <RelationSink S>
inline void interface_update_phi(S& s, const Coupling& cp, double w) {
  interface_update_u_2d(s, cp, w, w);
  interface_update_u_1d_parabolic(s, cp, w, w);
}

/// Hyperbolic channel end relation: one-sided AHO terms plus exchange with the wall.
template <RelationSink S>
inline void hyperbolic_interface_u0(S& s, const Coupling& cp, AhoMode mode, double w_exchange) {
  emit_hyperbolic_end(s, *cp.channel, cp.map.side == Side::Left ? End::Left : End::Right, mode);
  emit_exchange_end(s, cp, w_exchange);
}

/// v at a joined end from the new densities: v = -+(K sigma u_c - K int u_w).
template <RelationSink S>
inline void emit_interface_flux(S& s, const Coupling& cp) {
  const double K = cp.map.K;
  if (K == 0.0) return;
  const ChannelBlock& c = *cp.channel;
  const ChamberBlock& b = *cp.chamber;
  const std::size_t e = cp.channel_node();
  const double sgn = cp.map.side == Side::Left ? 1.0 : -1.0;
  const std::size_t row = c.vcol(e);
  s.add(row, c.col(e), -sgn * K * cp.map.sigma);
  for (std::size_t j = cp.map.j_a; j <= cp.map.j_b; ++j)
    s.add(row, b.col(cp.map.wall_i, j), sgn * K * b.dy * mouth_weight(cp.map, j));
}

}  // namespace chemochip
