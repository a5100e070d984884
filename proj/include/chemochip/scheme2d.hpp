#pragma once

#include <cmath>
#include <cstddef>

#include "chemochip/model.hpp"
#include "chemochip/relation.hpp"

namespace chemochip {

struct ChemotacticFlux2D {
  Field2D fx, fy, theta;
};

/// f = chi(u, phi) grad phi and theta = chi(u, phi) |grad phi|, all at time n.
inline ChemotacticFlux2D chemotactic_flux_2d(const Field2D& u, const Field2D& phi, double dx,
                                             double dy, const ModelParams& p) {
  ChemotacticFlux2D r{Field2D(u.nx(), u.ny()), Field2D(u.nx(), u.ny()), Field2D(u.nx(), u.ny())};
  for (std::size_t i = 0; i < u.extent_x(); ++i)
    for (std::size_t j = 0; j < u.extent_y(); ++j) {
      const double chi = chemotactic_sensitivity(u(i, j), phi(i, j), p);
      if (chi == 0.0) continue;
      const double gx = diff_x(phi, i, j, dx);
      const double gy = diff_y(phi, i, j, dy);
      r.fx(i, j) = chi * gx;
      r.fy(i, j) = chi * gy;
      r.theta(i, j) = chi * std::hypot(gx, gy);
    }
  return r;
}

namespace detail {

// Terms along one axis at position k of 0..last with neighbours reflected at the ends.
// get(k) reads a time-n value, col(k) gives the unknown's column.
template <RelationSink S, class Get, class Col>
inline void axis_diffusion(S& s, std::size_t row, std::size_t k, std::size_t last, double c,
                           double w, Get get, Col col) {
  if (k == 0) {
    emit_mixed(s, row, col(0), -2.0 * c, get(0), w);
    emit_mixed(s, row, col(1), 2.0 * c, get(1), w);
  } else if (k == last) {
    emit_mixed(s, row, col(last - 1), 2.0 * c, get(last - 1), w);
    emit_mixed(s, row, col(last), -2.0 * c, get(last), w);
  } else {
    emit_mixed(s, row, col(k - 1), c, get(k - 1), w);
    emit_mixed(s, row, col(k), -2.0 * c, get(k), w);
    emit_mixed(s, row, col(k + 1), c, get(k + 1), w);
  }
}

// Divergence of an explicit flux: paired end terms, centered inside.
template <class Get>
inline double axis_convection(std::size_t k, std::size_t last, double dt, double h, Get f) {
  if (k == 0) return -(dt / h) * (f(0) + f(1));
  if (k == last) return (dt / h) * (f(last - 1) + f(last));
  return -(dt / (2.0 * h)) * (f(k + 1) - f(k - 1));
}

// Artificial viscosity: subtracted second difference of theta, one-sided at the ends.
template <class Get>
inline double axis_viscosity(std::size_t k, std::size_t last, double dt, double h, Get th) {
  if (k == 0) return -(dt / h) * (th(1) - th(0));
  if (k == last) return -(dt / h) * (th(last - 1) - th(last));
  return -(dt / (2.0 * h)) * (th(k - 1) - 2.0 * th(k) + th(k + 1));
}

}  // namespace detail

/// Mass-preserving relation for node (i, j) of a chamber, any position.
template <RelationSink S>
inline void emit_chamber_node(S& s, const ChamberBlock& b, std::size_t i, std::size_t j,
                              double w) {
  const Field2D& u = *b.old;
  const std::size_t I = u.extent_x() - 1;
  const std::size_t J = u.extent_y() - 1;
  const std::size_t row = b.col(i, j);
  s.add_rhs(row, u(i, j));

  const double cx = b.D * b.dt / (b.dx * b.dx);
  const double cy = b.D * b.dt / (b.dy * b.dy);
  detail::axis_diffusion(
      s, row, i, I, cx, w, [&](std::size_t k) { return u(k, j); },
      [&](std::size_t k) { return b.col(k, j); });
  detail::axis_diffusion(
      s, row, j, J, cy, w, [&](std::size_t k) { return u(i, k); },
      [&](std::size_t k) { return b.col(i, k); });

  double known = 0.0;
  if (b.fx) known += detail::axis_convection(i, I, b.dt, b.dx, [&](std::size_t k) { return (*b.fx)(k, j); });
  if (b.fy) known += detail::axis_convection(j, J, b.dt, b.dy, [&](std::size_t k) { return (*b.fy)(i, k); });
  if (b.theta) {
    const Field2D& th = *b.theta;
    known += detail::axis_viscosity(i, I, b.dt, b.dx, [&](std::size_t k) { return th(k, j); });
    known += detail::axis_viscosity(j, J, b.dt, b.dy, [&](std::size_t k) { return th(i, k); });
  }
  if (known != 0.0) s.add_rhs(row, known);

  emit_source(s, row, b.dt, b.source, u.index(i, j), row, u(i, j), w);
}

/// Crank-Nicolson relations at interior nodes i = 1..nx, j = 1..ny.
template <RelationSink S>
inline void cn_step_u_2d(S& s, const ChamberBlock& b, double w = 0.5) {
  const Field2D& u = *b.old;
  for (std::size_t i = 1; i + 1 < u.extent_x(); ++i)
    for (std::size_t j = 1; j + 1 < u.extent_y(); ++j) emit_chamber_node(s, b, i, j, w);
}

/// Corner and edge relations, skipping wall nodes owned by a channel mouth.
template <RelationSink S>
inline void outer_boundary_u_2d(S& s, const ChamberBlock& b, double w = 0.5,
                                BoundaryMode mode = BoundaryMode::MassPreserving) {
  const Field2D& u = *b.old;
  const std::size_t I = u.extent_x() - 1;
  const std::size_t J = u.extent_y() - 1;
  auto node = [&](std::size_t i, std::size_t j) {
    if (b.in_mouth(i, j)) return;
    if (mode == BoundaryMode::MassPreserving) {
      emit_chamber_node(s, b, i, j, w);
      return;
    }
    // copy condition: take the value of the inward (diagonal at corners) neighbour
    const std::size_t ii = i == 0 ? 1 : (i == I ? I - 1 : i);
    const std::size_t jj = j == 0 ? 1 : (j == J ? J - 1 : j);
    s.add(b.col(i, j), b.col(ii, jj), 1.0);
  };
  for (std::size_t i = 0; i <= I; ++i) {
    node(i, 0);
    node(i, J);
  }
  for (std::size_t j = 1; j < J; ++j) {
    node(0, j);
    node(I, j);
  }
}

/// Chemoattractant relations at every node: diffusion plus a u - b phi, no transport.
template <RelationSink S>
inline void cn_step_phi_2d(S& s, const ChamberBlock& b, double w = 0.5) {
  cn_step_u_2d(s, b, w);
  outer_boundary_u_2d(s, b, w, BoundaryMode::MassPreserving);
}

}  // namespace chemochip
