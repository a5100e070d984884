#pragma once

#include <cstddef>
#include <stdexcept>

#include "chemochip/relation.hpp"

namespace chemochip {

enum class AhoMode { Explicit, Implicit };

// Relaxation of v in the implicit variant. Consistent damps v with the (1,2,1)/4 average
// used by the explicit variant; Displayed keeps only the (a - dt/4) second difference.
enum class AhoRelaxation { Consistent, Displayed };

inline AhoMode aho_mode(const TimeWeights& w) {
  return w.hyperbolic == 0.0 ? AhoMode::Explicit : AhoMode::Implicit;
}

namespace detail {
inline double level_weight(AhoMode mode) { return mode == AhoMode::Explicit ? 0.0 : 1.0; }
inline double flux_at(const ChannelBlock& b, std::size_t i) { return b.f ? (*b.f)[i] : 0.0; }
}  // namespace detail

/// AHO relations for (u, v) at interior nodes i = 1..N.
template <RelationSink S>
inline void aho_step(S& s, const ChannelBlock& b, AhoMode mode,
                     AhoRelaxation relax = AhoRelaxation::Consistent) {
  if (!b.v_old || !(b.lambda > 0)) throw std::invalid_argument("hyperbolic block needs v and lambda");
  const Field1D& u = *b.old;
  const Field1D& v = *b.v_old;
  const double w = detail::level_weight(mode);
  const double dt = b.dt, h = b.dx, lam = b.lambda;
  const double a = lam * dt / (2.0 * h);
  const double bv = dt / (2.0 * h) - dt / (4.0 * lam);
  auto F = [&](std::size_t i) { return detail::flux_at(b, i); };

  for (std::size_t i = 1; i < b.last(); ++i) {
    const std::size_t ru = b.col(i);
    s.add_rhs(ru, u[i]);
    emit_mixed(s, ru, b.col(i - 1), a, u[i - 1], w);
    emit_mixed(s, ru, b.col(i), -2.0 * a, u[i], w);
    emit_mixed(s, ru, b.col(i + 1), a, u[i + 1], w);
    emit_mixed(s, ru, b.vcol(i + 1), -bv, v[i + 1], w);
    emit_mixed(s, ru, b.vcol(i - 1), bv, v[i - 1], w);
    const double fu = dt / (4.0 * lam) * (F(i - 1) - F(i + 1));
    if (fu != 0.0) s.add_rhs(ru, fu);
    emit_source(s, ru, dt / 4.0, b.source, i - 1, b.col(i - 1), u[i - 1], w);
    emit_source(s, ru, dt / 2.0, b.source, i, b.col(i), u[i], w);
    emit_source(s, ru, dt / 4.0, b.source, i + 1, b.col(i + 1), u[i + 1], w);

    const std::size_t rv = b.vcol(i);
    s.add_rhs(rv, v[i]);
    const double c = lam * lam * dt / (2.0 * h);
    emit_mixed(s, rv, b.col(i + 1), -c, u[i + 1], w);
    emit_mixed(s, rv, b.col(i - 1), c, u[i - 1], w);
    if (mode == AhoMode::Explicit || relax == AhoRelaxation::Consistent) {
      emit_mixed(s, rv, b.vcol(i - 1), a - dt / 4.0, v[i - 1], w);
      emit_mixed(s, rv, b.vcol(i), -2.0 * a - dt / 2.0, v[i], w);
      emit_mixed(s, rv, b.vcol(i + 1), a - dt / 4.0, v[i + 1], w);
    } else {
      const double e = a - dt / 4.0;
      emit_mixed(s, rv, b.vcol(i - 1), e, v[i - 1], w);
      emit_mixed(s, rv, b.vcol(i), -2.0 * e, v[i], w);
      emit_mixed(s, rv, b.vcol(i + 1), e, v[i + 1], w);
    }
    const double fv = dt / 4.0 * (F(i - 1) + 2.0 * F(i) + F(i + 1));
    if (fv != 0.0) s.add_rhs(rv, fv);
    emit_source(s, rv, lam * dt / 4.0, b.source, i - 1, b.col(i - 1), u[i - 1], w);
    emit_source(s, rv, -lam * dt / 4.0, b.source, i + 1, b.col(i + 1), u[i + 1], w);
  }
}

/// One-sided AHO relation for the density at a channel end, without exchange.
template <RelationSink S>
inline void emit_hyperbolic_end(S& s, const ChannelBlock& b, End end, AhoMode mode,
                                BoundaryMode bmode = BoundaryMode::MassPreserving) {
  const Field1D& u = *b.old;
  const Field1D& v = *b.v_old;
  const std::size_t N1 = b.last();
  const std::size_t e = end == End::Left ? 0 : N1;
  const std::size_t in = end == End::Left ? 1 : N1 - 1;
  const std::size_t row = b.col(e);
  if (bmode == BoundaryMode::NaiveNeumann) {
    s.add(row, b.col(in), 1.0);
    return;
  }
  const double w = detail::level_weight(mode);
  const double dt = b.dt, h = b.dx, lam = b.lambda;
  const double sgn = end == End::Left ? -1.0 : 1.0;
  s.add_rhs(row, u[e]);
  const double c = lam * dt / h;
  emit_mixed(s, row, b.col(in), c, u[in], w);
  emit_mixed(s, row, b.col(e), -c, u[e], w);
  const double k = dt / h - dt / (2.0 * lam);
  emit_mixed(s, row, b.vcol(e), sgn * k, v[e], w);
  emit_mixed(s, row, b.vcol(in), sgn * k, v[in], w);
  const double ff = sgn * dt / (2.0 * lam) * (detail::flux_at(b, e) + detail::flux_at(b, in));
  if (ff != 0.0) s.add_rhs(row, ff);
  emit_source(s, row, dt / 2.0, b.source, e, b.col(e), u[e], w);
  emit_source(s, row, dt / 2.0, b.source, in, b.col(in), u[in], w);
}

/// v at a free end is zero: the row keeps only its identity.
template <RelationSink S>
inline void emit_free_flux(S&, const ChannelBlock&, End) {}

}  // namespace chemochip
