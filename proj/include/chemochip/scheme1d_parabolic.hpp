#pragma once

#include <cmath>
#include <cstddef>

#include "chemochip/model.hpp"
#include "chemochip/relation.hpp"

namespace chemochip {

struct ChemotacticFlux1D {
  Field1D f, theta;
};

inline ChemotacticFlux1D chemotactic_flux_1d(const Field1D& u, const Field1D& phi, double dx,
                                             const ModelParams& p) {
  ChemotacticFlux1D r{Field1D(u.n()), Field1D(u.n())};
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double chi = chemotactic_sensitivity(u[i], phi[i], p);
    if (chi == 0.0) continue;
    const double g = diff_1d(phi, i, dx);
    r.f[i] = chi * g;
    r.theta[i] = chi * std::abs(g);
  }
  return r;
}

/// Mass-preserving relation for channel node i, ends treated as no-flux.
template <RelationSink S>
inline void emit_channel_node(S& s, const ChannelBlock& b, std::size_t i, double w) {
  const Field1D& u = *b.old;
  const std::size_t N1 = b.last();
  const std::size_t row = b.col(i);
  s.add_rhs(row, u[i]);
  const double c = b.D * b.dt / (b.dx * b.dx);
  const double h = b.dx, dt = b.dt;
  double known = 0.0;
  if (i == 0) {
    emit_mixed(s, row, b.col(0), -2.0 * c, u[0], w);
    emit_mixed(s, row, b.col(1), 2.0 * c, u[1], w);
    if (b.f) known += -(dt / h) * ((*b.f)[0] + (*b.f)[1]);
    if (b.theta) known += -(dt / h) * ((*b.theta)[1] - (*b.theta)[0]);
  } else if (i == N1) {
    emit_mixed(s, row, b.col(N1 - 1), 2.0 * c, u[N1 - 1], w);
    emit_mixed(s, row, b.col(N1), -2.0 * c, u[N1], w);
    if (b.f) known += (dt / h) * ((*b.f)[N1 - 1] + (*b.f)[N1]);
    if (b.theta) known += -(dt / h) * ((*b.theta)[N1 - 1] - (*b.theta)[N1]);
  } else {
    emit_mixed(s, row, b.col(i - 1), c, u[i - 1], w);
    emit_mixed(s, row, b.col(i), -2.0 * c, u[i], w);
    emit_mixed(s, row, b.col(i + 1), c, u[i + 1], w);
    if (b.f) known += -(dt / (2.0 * h)) * ((*b.f)[i + 1] - (*b.f)[i - 1]);
    if (b.theta) {
      const Field1D& th = *b.theta;
      known += -(dt / (2.0 * h)) * (th[i - 1] - 2.0 * th[i] + th[i + 1]);
    }
  }
  if (known != 0.0) s.add_rhs(row, known);
  emit_source(s, row, dt, b.source, i, row, u[i], w);
}

/// Crank-Nicolson relations at interior nodes i = 1..N.
template <RelationSink S>
inline void cn_step_u_1d(S& s, const ChannelBlock& b, double w = 0.5) {
  for (std::size_t i = 1; i < b.last(); ++i) emit_channel_node(s, b, i, w);
}

/// Relation at a free channel end.
template <RelationSink S>
inline void emit_channel_end(S& s, const ChannelBlock& b, End end, double w,
                             BoundaryMode mode = BoundaryMode::MassPreserving) {
  const std::size_t i = end == End::Left ? 0 : b.last();
  if (mode == BoundaryMode::NaiveNeumann) {
    s.add(b.col(i), b.col(end == End::Left ? 1 : i - 1), 1.0);
    return;
  }
  emit_channel_node(s, b, i, w);
}

/// Explicit update of a free end: u_0 + 2D dt/dx^2 (u_1 - u_0) - dt/dx (f_0 + f_1), mirrored on the right.
inline double outer_boundary_u_1d(const Field1D& u, const Field1D& f, double D, double dx,
                                  double dt, End end) {
  ChannelBlock b;
  b.old = &u;
  b.f = &f;
  b.D = D;
  b.dx = dx;
  b.dt = dt;
  ExplicitSink s(u.size());
  emit_channel_end(s, b, end, 0.0);
  return s.values()[end == End::Left ? 0 : u.size() - 1];
}

/// Chemoattractant relations on a whole channel with free ends.
template <RelationSink S>
inline void step_phi_1d(S& s, const ChannelBlock& b, double w = 0.5) {
  emit_channel_end(s, b, End::Left, w);
  cn_step_u_1d(s, b, w);
  emit_channel_end(s, b, End::Right, w);
}

}  // namespace chemochip
