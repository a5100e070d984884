#pragma once

// Every discrete update is written as a relation
//   x_r^{n+1} = sum_c a_rc x_c^{n+1} + b_r
// and streamed into a sink. Sinks either assemble the linear system, evaluate the
// residual of a guess, or compute an explicit update.

#include <concepts>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "chemochip/field.hpp"

namespace chemochip {

template <class S>
concept RelationSink = requires(S& s, std::size_t r, std::size_t c, double v) {
  s.add(r, c, v);
  s.add_rhs(r, v);
};

/// Level weights: fraction of each term taken at t_{n+1}.
struct TimeWeights {
  double parabolic = 0.5;   // diffusion and sources on chambers, parabolic channels, chemicals
  double exchange = 0.5;    // KK terms on both sides of an interface
  double hyperbolic = 1.0;  // AHO channel terms

  static TimeWeights imex() { return {0.5, 0.5, 1.0}; }
  static TimeWeights explicit_euler() { return {0.0, 0.0, 0.0}; }
  bool is_explicit() const { return parabolic == 0.0 && exchange == 0.0 && hyperbolic == 0.0; }
};

/// Adds coef * (w x_c^{n+1} + (1-w) x_c^n).
template <RelationSink S>
inline void emit_mixed(S& s, std::size_t row, std::size_t col, double coef, double old,
                       double w) {
  if (coef == 0.0) return;
  if (w != 0.0) s.add(row, col, w * coef);
  if (w != 1.0) s.add_rhs(row, (1.0 - w) * coef * old);
}

/// R = x - A x - b for a given guess x.
class ResidualSink {
 public:
  explicit ResidualSink(std::span<const double> guess)
      : x_(guess), r_(guess.begin(), guess.end()) {}
  void add(std::size_t row, std::size_t col, double v) { r_[row] -= v * x_[col]; }
  void add_rhs(std::size_t row, double v) { r_[row] -= v; }
  const std::vector<double>& residual() const { return r_; }

 private:
  std::span<const double> x_;
  std::vector<double> r_;
};

/// Computes x^{n+1} = b when no relation touches the new level.
class ExplicitSink {
 public:
  explicit ExplicitSink(std::size_t n) : b_(n, 0.0) {}
  void add(std::size_t, std::size_t, double) {
    throw std::logic_error("explicit evaluation met an implicit coupling");
  }
  void add_rhs(std::size_t row, double v) { b_[row] += v; }
  const std::vector<double>& values() const { return b_; }

 private:
  std::vector<double> b_;
};

struct Entry {
  std::size_t row;
  std::size_t col;
  double value;
};

/// Collects (I - A) as coordinate entries and b.
class MatrixSink {
 public:
  explicit MatrixSink(std::size_t n) : rhs_(n, 0.0) { reset(n); }
  void reset(std::size_t n) {
    rhs_.assign(n, 0.0);
    entries_.clear();
    for (std::size_t r = 0; r < n; ++r) entries_.push_back({r, r, 1.0});
  }
  void add(std::size_t row, std::size_t col, double v) { entries_.push_back({row, col, -v}); }
  void add_rhs(std::size_t row, double v) { rhs_[row] += v; }
  std::vector<Entry>& entries() { return entries_; }
  const std::vector<Entry>& entries() const { return entries_; }
  std::vector<double>& rhs() { return rhs_; }
  const std::vector<double>& rhs() const { return rhs_; }
  std::size_t size() const { return rhs_.size(); }

 private:
  std::vector<double> rhs_;
  std::vector<Entry> entries_;
};


/// g = gain - decay * u sampled at both levels; empty spans read as zero.
struct Source {
  std::span<const double> decay_old, decay_new, gain_old, gain_new;

  static double at(std::span<const double> v, std::size_t k) { return v.empty() ? 0.0 : v[k]; }
};

/// Adds coef * (w g_k^{n+1} + (1-w) g_k^n) where g_k depends on the unknown in column col.
template <RelationSink S>
inline void emit_source(S& s, std::size_t row, double coef, const Source& src, std::size_t k,
                        std::size_t col, double u_old, double w) {
  if (coef == 0.0) return;
  const double d_new = Source::at(src.decay_new, k);
  if (w != 0.0 && d_new != 0.0) s.add(row, col, -w * coef * d_new);
  double known = 0.0;
  if (w != 1.0) known += (1.0 - w) * coef * (Source::at(src.gain_old, k) - Source::at(src.decay_old, k) * u_old);
  if (w != 0.0) known += w * coef * Source::at(src.gain_new, k);
  if (known != 0.0) s.add_rhs(row, known);
}

enum class BoundaryMode { MassPreserving, NaiveNeumann };

/// One species on one chamber: time-n data and where its unknowns live.
struct ChamberBlock {
  std::size_t offset = 0;
  const Field2D* old = nullptr;
  const Field2D* fx = nullptr;     // chemotactic flux, null when absent
  const Field2D* fy = nullptr;
  const Field2D* theta = nullptr;  // viscosity field, null when switched off
  Source source;
  double D = 0.0;
  double dx = 0.0, dy = 0.0, dt = 0.0;
  std::span<const unsigned char> mouth;  // nonzero on wall nodes owned by a channel mouth

  std::size_t col(std::size_t i, std::size_t j) const { return offset + old->index(i, j); }
  bool in_mouth(std::size_t i, std::size_t j) const {
    return !mouth.empty() && mouth[old->index(i, j)] != 0;
  }
};

/// One species on one channel. The hyperbolic model adds the flux unknowns v.
struct ChannelBlock {
  std::size_t offset = 0;
  const Field1D* old = nullptr;
  const Field1D* f = nullptr;
  const Field1D* theta = nullptr;
  Source source;
  double D = 0.0;
  double dx = 0.0, dt = 0.0;
  const Field1D* v_old = nullptr;
  std::size_t v_offset = 0;
  double lambda = 0.0;

  std::size_t last() const { return old->size() - 1; }
  std::size_t col(std::size_t i) const { return offset + i; }
  std::size_t vcol(std::size_t i) const { return v_offset + i; }
};

enum class End { Left, Right };

}  // namespace chemochip
