#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "chemochip/diagnostics.hpp"
#include "chemochip/linear.hpp"
#include "chemochip/model.hpp"
#include "chemochip/transmission.hpp"

namespace chemochip {

enum class ChannelModel { Parabolic, Hyperbolic };
enum class TimeScheme { Imex, Explicit };
enum class SafeguardAction { Warn, Abort };

inline std::string to_string(ChannelModel m) {
  return m == ChannelModel::Parabolic ? "parabolic" : "hyperbolic";
}

struct SolveSettings {
  ChannelModel channel_model = ChannelModel::Hyperbolic;
  TimeScheme scheme = TimeScheme::Imex;
  double tolerance = 1e-10;
  int max_iterations = 50;
  double damping = 1.0;
  bool viscosity = true;
  AhoRelaxation aho_relaxation = AhoRelaxation::Consistent;
  BoundaryMode boundary = BoundaryMode::MassPreserving;
  std::array<Species, 4> order{Species::M, Species::Omega, Species::T, Species::Phi};
  SafeguardAction monotonicity_action = SafeguardAction::Warn;
  SafeguardAction kk_action = SafeguardAction::Warn;
  double kk_threshold = 0.5;
  std::size_t monotonicity_every = 1;  // steps between checks, 0 disables

  TimeWeights weights() const {
    return scheme == TimeScheme::Imex ? TimeWeights::imex() : TimeWeights::explicit_euler();
  }
  bool operator==(const SolveSettings&) const = default;
};

inline double cfl_ratio_1d(double D, double dt, double dx) { return D * dt / (dx * dx); }
inline double cfl_ratio_2d(double D, double dt, double dx, double dy) {
  return D * dt / (dx * dx) + D * dt / (dy * dy);
}

struct CflEntry {
  std::string name;
  double ratio = 0.0;
  double limit = 0.0;
  bool ok = true;
};

struct CflReport {
  std::vector<CflEntry> entries;
  bool ok() const {
    for (const auto& e : entries)
      if (!e.ok) return false;
    return true;
  }
};

inline CflReport cfl_check(const DiscreteLayout& d, const ModelParams& p, ChannelModel model) {
  CflReport r;
  auto add = [&](std::string name, double ratio, double limit) {
    r.entries.push_back({std::move(name), ratio, limit, ratio <= limit});
  };
  double dmax = 0.0;
  for (Species s : all_species) dmax = std::max(dmax, p.diffusivity(s));
  add("chamber diffusion", cfl_ratio_2d(dmax, d.dt, d.dx, d.dy), 0.5);
  for (std::size_t m = 0; m < d.channels.size(); ++m) {
    double dc = std::max(p.D_phi, p.D_omega);
    if (model == ChannelModel::Parabolic) dc = std::max(dmax, dc);
    add(channel_id(m) + " diffusion", cfl_ratio_1d(dc, d.dt, d.channels[m].dx), 0.5);
    if (model == ChannelModel::Hyperbolic) {
      const double lam = std::max(p.wave_speed(Species::T), p.wave_speed(Species::M));
      add(channel_id(m) + " wave", lam * d.dt / d.channels[m].dx, 1.0);
    }
  }
  return r;
}

struct SafeguardEvent {
  std::size_t step = 0;
  double t = 0.0;
  std::string check;
  std::string detail;
  double margin = 0.0;
};

struct SafeguardLog {
  static constexpr std::size_t capacity = 64;
  std::vector<SafeguardEvent> events;
  std::size_t total = 0;
  double worst_margin = 0.0;

  void record(SafeguardEvent e) {
    if (total == 0 || e.margin < worst_margin) worst_margin = e.margin;
    ++total;
    if (events.size() < capacity) events.push_back(std::move(e));
  }
};

struct StepInfo {
  int iterations = 0;
  std::vector<double> residuals;
};

/// Owns the workspace for advancing one chip configuration in time.
class Stepper {
 public:
  Stepper(DiscreteLayout d, ModelParams p, SolveSettings s)
      : d_(std::move(d)), p_(p), s_(s) {
    if (!(s_.tolerance > 0) || s_.max_iterations < 1)
      throw ConfigError("solver tolerance must be positive and iterations at least one");
    build_masks();
    for (Species sp : all_species) build_layout(sp);
    allocate_sources();
    preflight();
  }

  const DiscreteLayout& layout() const { return d_; }
  const ModelParams& params() const { return p_; }
  const SolveSettings& settings() const { return s_; }
  const SafeguardLog& safeguards() const { return log_; }
  std::size_t steps_taken() const { return step_; }

  /// Advances the state by one time step in place.
  StepInfo advance(SystemState& st) {
    check_finite(st);
    if (s_.monotonicity_every > 0 && step_ % s_.monotonicity_every == 0) check_monotonicity(st);

    const SystemState old = st;
    freeze_fluxes(old);
    SystemState& guess = st;
    t_old_ = old.t;
    t_new_ = old.t + d_.dt;

    // Components that share no interface are iterated to convergence on their own,
    // so an uncoupled domain follows the same iterates as a standalone run.
    const std::size_t ncomp = layouts_[0].comp_size.size();
    active_.assign(ncomp, 1);
    StepInfo info;
    for (int it = 1; it <= s_.max_iterations; ++it) {
      for (Species sp : s_.order) solve_species(sp, old, guess);
      std::vector<double> comp_res(ncomp, 0.0);
      for (Species sp : all_species) residual_norm(sp, old, guess, comp_res);
      double res = 0.0;
      for (std::size_t c = 0; c < ncomp; ++c) {
        if (!active_[c]) continue;
        res = std::max(res, comp_res[c]);
        if (!std::isfinite(comp_res[c])) throw InvalidStateError("non-finite residual");
        if (comp_res[c] <= s_.tolerance) active_[c] = 0;
      }
      info.residuals.push_back(res);
      info.iterations = it;
      if (std::none_of(active_.begin(), active_.end(), [](unsigned char a) { return a != 0; })) break;
      if (it == s_.max_iterations)
        throw SolverError("coupled step did not converge", info.residuals);
    }
    guess.t = t_new_;
    check_finite(guess);
    ++step_;
    return info;
  }

  /// Residual infinity norm of all relations for the step old -> guess.
  double coupled_residual(const SystemState& old, const SystemState& guess) {
    freeze_fluxes(old);
    t_old_ = old.t;
    t_new_ = old.t + d_.dt;
    std::vector<double> comp_res(layouts_[0].comp_size.size(), 0.0);
    for (Species sp : all_species) residual_norm(sp, old, guess, comp_res);
    return comp_res.empty() ? 0.0 : *std::max_element(comp_res.begin(), comp_res.end());
  }

  /// Emits every relation of one species into a sink. Exposed for inspection and tests.
  template <RelationSink S>
  void emit(S& sink, Species sp, const SystemState& old, const SystemState& guess) {
    fill_sources(sp, old, guess);
    auto blocks = make_blocks(sp, old);
    emit_blocks(sink, sp, blocks);
  }

  std::size_t unknowns(Species sp) const { return layouts_[idx(sp)].size; }

  void gather(const SystemState& st, Species sp, std::vector<double>& x) const {
    const auto& L = layouts_[idx(sp)];
    x.resize(L.size);
    for (std::size_t c = 0; c < st.chambers.size(); ++c) {
      auto v = st.chambers[c][sp].values();
      std::copy(v.begin(), v.end(), x.begin() + static_cast<std::ptrdiff_t>(L.chamber_off[c]));
    }
    for (std::size_t m = 0; m < st.channels.size(); ++m) {
      auto v = st.channels[m][sp].values();
      std::copy(v.begin(), v.end(), x.begin() + static_cast<std::ptrdiff_t>(L.channel_off[m]));
      if (L.hyperbolic) {
        auto f = st.channels[m].flux(sp).values();
        std::copy(f.begin(), f.end(), x.begin() + static_cast<std::ptrdiff_t>(L.channel_off[m] + v.size()));
      }
    }
  }

  void scatter(const std::vector<double>& x, Species sp, SystemState& st) const {
    const auto& L = layouts_[idx(sp)];
    for (std::size_t c = 0; c < st.chambers.size(); ++c) {
      auto v = st.chambers[c][sp].values();
      std::copy_n(x.begin() + static_cast<std::ptrdiff_t>(L.chamber_off[c]), v.size(), v.begin());
    }
    for (std::size_t m = 0; m < st.channels.size(); ++m) {
      auto v = st.channels[m][sp].values();
      std::copy_n(x.begin() + static_cast<std::ptrdiff_t>(L.channel_off[m]), v.size(), v.begin());
      if (L.hyperbolic) {
        auto f = st.channels[m].flux(sp).values();
        std::copy_n(x.begin() + static_cast<std::ptrdiff_t>(L.channel_off[m] + v.size()), f.size(), f.begin());
      }
    }
  }

 private:
  struct SpeciesLayout {
    bool hyperbolic = false;
    std::vector<std::size_t> chamber_off, channel_off;
    std::size_t size = 0;
    std::vector<int> owner;                // component of each unknown
    std::vector<std::ptrdiff_t> local;     // position within its component
    std::vector<std::size_t> comp_size;
    std::vector<std::unique_ptr<CachedSparseSolver>> solvers;
  };

  struct SourceBuffers {
    std::vector<double> decay_old, decay_new, gain_old, gain_new;
    bool any_decay = false, any_gain = false;
  };

  struct Blocks {
    std::vector<ChamberBlock> chambers;
    std::vector<ChannelBlock> channels;
    std::vector<Coupling> couplings;
  };

  static std::size_t idx(Species s) { return static_cast<std::size_t>(s); }
  std::size_t domain_count() const { return d_.chambers + d_.channels.size(); }
  std::size_t domain_size(std::size_t k) const {
    if (k < d_.chambers) return (d_.nx + 2) * (d_.ny + 2);
    return d_.channels[k - d_.chambers].n + 2;
  }

  void build_masks() {
    masks_.assign(d_.chambers, std::vector<unsigned char>((d_.nx + 2) * (d_.ny + 2), 0));
    for (const auto& im : d_.interfaces)
      for (std::size_t j = im.j_a; j <= im.j_b; ++j) masks_[im.chamber][im.wall_i * (d_.ny + 2) + j] = 1;
  }

  void build_layout(Species sp) {
    SpeciesLayout& L = layouts_[idx(sp)];
    L.hyperbolic = is_cell_species(sp) && s_.channel_model == ChannelModel::Hyperbolic;
    std::vector<std::size_t> begin(domain_count()), size(domain_count());
    std::size_t off = 0;
    for (std::size_t k = 0; k < domain_count(); ++k) {
      size[k] = domain_size(k) * ((k >= d_.chambers && L.hyperbolic) ? 2 : 1);
      begin[k] = off;
      (k < d_.chambers ? L.chamber_off : L.channel_off).push_back(off);
      off += size[k];
    }
    L.size = off;

    // Domains joined by a nonzero permeability share one linear system.
    std::vector<std::size_t> parent(domain_count());
    std::iota(parent.begin(), parent.end(), 0);
    std::function<std::size_t(std::size_t)> root = [&](std::size_t a) {
      return parent[a] == a ? a : parent[a] = root(parent[a]);
    };
    for (const auto& im : d_.interfaces)
      if (im.K != 0.0) parent[root(d_.chambers + im.channel)] = root(im.chamber);
    std::vector<int> comp_of_root(domain_count(), -1);
    int ncomp = 0;
    L.owner.assign(L.size, -1);
    L.local.assign(L.size, 0);
    for (std::size_t k = 0; k < domain_count(); ++k) {
      const std::size_t r = root(k);
      if (comp_of_root[r] < 0) {
        comp_of_root[r] = ncomp++;
        L.comp_size.push_back(0);
      }
      const int c = comp_of_root[r];
      for (std::size_t u = begin[k]; u < begin[k] + size[k]; ++u) {
        L.owner[u] = c;
        L.local[u] = static_cast<std::ptrdiff_t>(L.comp_size[c]++);
      }
    }
    for (int c = 0; c < ncomp; ++c) L.solvers.push_back(std::make_unique<CachedSparseSolver>());
  }

  void allocate_sources() {
    for (auto& per_species : sources_) {
      per_species.resize(domain_count());
      for (std::size_t k = 0; k < domain_count(); ++k) {
        auto& b = per_species[k];
        const std::size_t n = domain_size(k);
        b.decay_old.assign(n, 0.0);
        b.decay_new.assign(n, 0.0);
        b.gain_old.assign(n, 0.0);
        b.gain_new.assign(n, 0.0);
      }
    }
  }

  void preflight() {
    const CflReport cfl = cfl_check(d_, p_, s_.channel_model);
    for (const auto& e : cfl.entries) {
      if (e.ok) continue;
      if (s_.scheme == TimeScheme::Explicit)
        throw SafeguardAbort("explicit step violates the " + e.name + " stability bound");
      log_.record({0, 0.0, "cfl", e.name + " ratio " + std::to_string(e.ratio), e.limit - e.ratio});
    }
    for (std::size_t m = 0; m < d_.channels.size(); ++m) {
      const bool joined = std::any_of(d_.interfaces.begin(), d_.interfaces.end(),
                                      [&](const InterfaceMap& im) { return im.channel == m; });
      if (!joined) continue;
      const KkRatioReport kk = kk_ratio_check(d_, m, s_.kk_threshold);
      if (kk.ok()) continue;
      const double worst = std::max({kk.per_dx.value, kk.wall_sum.value, kk.per_sigma.value});
      const std::string msg = channel_id(m) + " exchange ratio " + std::to_string(worst);
      if (s_.kk_action == SafeguardAction::Abort) throw SafeguardAbort(msg);
      log_.record({0, 0.0, "kk_ratio", msg, s_.kk_threshold - worst});
    }
  }

  void check_monotonicity(const SystemState& st) {
    const MonotonicityReport r = monotonicity_check(st, d_, p_);
    auto note = [&](const ConditionResult& c, const char* name) {
      if (c.ok) return;
      const std::string msg = std::string(name) + " at " + c.where.domain + "(" +
                              std::to_string(c.where.i) + "," + std::to_string(c.where.j) + ")";
      if (s_.monotonicity_action == SafeguardAction::Abort) throw SafeguardAbort(msg);
      log_.record({step_, st.t, "monotonicity", msg, c.margin()});
    };
    note(r.chemotaxis, "chemotaxis bound");
    note(r.killing, "killing bound");
  }

  static void check_finite(const SystemState& st) {
    auto bad = [](std::span<const double> v) {
      for (double x : v)
        if (!std::isfinite(x)) return true;
      return false;
    };
    for (const auto& c : st.chambers)
      for (Species sp : all_species)
        if (bad(c[sp].values())) throw InvalidStateError("non-finite value in " + std::string(species_name(sp)));
    for (const auto& c : st.channels) {
      for (Species sp : all_species)
        if (bad(c[sp].values())) throw InvalidStateError("non-finite value in " + std::string(species_name(sp)));
      if (bad(c.vT.values()) || bad(c.vM.values())) throw InvalidStateError("non-finite channel flux");
    }
  }

  void freeze_fluxes(const SystemState& old) {
    fluxes_frozen_ = p_.k1 != 0.0;
    flux2d_.clear();
    flux1d_.clear();
    if (!fluxes_frozen_) return;
    for (const auto& c : old.chambers)
      flux2d_.push_back(chemotactic_flux_2d(c.M, c.phi, d_.dx, d_.dy, p_));
    for (std::size_t m = 0; m < old.channels.size(); ++m)
      flux1d_.push_back(chemotactic_flux_1d(old.channels[m].M, old.channels[m].phi, d_.channels[m].dx, p_));
  }

  template <class Fn>
  void for_each_domain_field(Species sp, const SystemState& st, Fn&& fn) const {
    for (std::size_t c = 0; c < st.chambers.size(); ++c) fn(c, st.chambers[c][sp].values());
    for (std::size_t m = 0; m < st.channels.size(); ++m) fn(d_.chambers + m, st.channels[m][sp].values());
  }

  void fill_sources(Species sp, const SystemState& old, const SystemState& guess) {
    auto& S = sources_[idx(sp)];
    for (auto& b : S) b.any_decay = b.any_gain = false;
    auto constant_decay = [&](double r_old, double r_new) {
      for (auto& b : S) {
        std::fill(b.decay_old.begin(), b.decay_old.end(), r_old);
        std::fill(b.decay_new.begin(), b.decay_new.end(), r_new);
        b.any_decay = r_old != 0.0 || r_new != 0.0;
      }
    };
    auto gain_from = [&](Species src, double a) {
      if (a == 0.0) return;
      for_each_domain_field(src, old, [&](std::size_t k, std::span<const double> v) {
        for (std::size_t q = 0; q < v.size(); ++q) S[k].gain_old[q] = a * v[q];
        S[k].any_gain = true;
      });
      for_each_domain_field(src, guess, [&](std::size_t k, std::span<const double> v) {
        for (std::size_t q = 0; q < v.size(); ++q) S[k].gain_new[q] = a * v[q];
      });
    };
    switch (sp) {
      case Species::T: {
        const double k_old = drug_rate(t_old_, Species::T, p_);
        const double k_new = drug_rate(t_new_, Species::T, p_);
        constant_decay(k_old, k_new);
        if (p_.k_omega != 0.0) {
          for_each_domain_field(Species::Omega, old, [&](std::size_t k, std::span<const double> v) {
            for (std::size_t q = 0; q < v.size(); ++q) S[k].decay_old[q] = kill_rate(v[q], p_) + k_old;
            S[k].any_decay = true;
          });
          for_each_domain_field(Species::Omega, guess, [&](std::size_t k, std::span<const double> v) {
            for (std::size_t q = 0; q < v.size(); ++q) S[k].decay_new[q] = kill_rate(v[q], p_) + k_new;
          });
        }
        break;
      }
      case Species::M:
        constant_decay(drug_rate(t_old_, Species::M, p_), drug_rate(t_new_, Species::M, p_));
        break;
      case Species::Phi:
        constant_decay(p_.beta_phi, p_.beta_phi);
        gain_from(Species::T, p_.alpha_phi);
        break;
      case Species::Omega:
        constant_decay(p_.beta_omega, p_.beta_omega);
        gain_from(Species::M, p_.alpha_omega);
        break;
    }
  }

  Source source_view(Species sp, std::size_t k) const {
    const auto& b = sources_[idx(sp)][k];
    Source s;
    if (b.any_decay) {
      s.decay_old = b.decay_old;
      s.decay_new = b.decay_new;
    }
    if (b.any_gain) {
      s.gain_old = b.gain_old;
      s.gain_new = b.gain_new;
    }
    return s;
  }

  Blocks make_blocks(Species sp, const SystemState& old) const {
    const SpeciesLayout& L = layouts_[idx(sp)];
    const bool transport = sp == Species::M && fluxes_frozen_;
    Blocks B;
    B.chambers.resize(d_.chambers);
    B.channels.resize(d_.channels.size());
    for (std::size_t c = 0; c < d_.chambers; ++c) {
      ChamberBlock& b = B.chambers[c];
      b.offset = L.chamber_off[c];
      b.old = &old.chambers[c][sp];
      if (transport) {
        b.fx = &flux2d_[c].fx;
        b.fy = &flux2d_[c].fy;
        if (s_.viscosity) b.theta = &flux2d_[c].theta;
      }
      b.source = source_view(sp, c);
      b.D = p_.diffusivity(sp);
      b.dx = d_.dx;
      b.dy = d_.dy;
      b.dt = d_.dt;
      b.mouth = masks_[c];
    }
    for (std::size_t m = 0; m < d_.channels.size(); ++m) {
      ChannelBlock& b = B.channels[m];
      b.offset = L.channel_off[m];
      b.old = &old.channels[m][sp];
      if (transport) {
        b.f = &flux1d_[m].f;
        if (s_.viscosity) b.theta = &flux1d_[m].theta;
      }
      b.source = source_view(sp, d_.chambers + m);
      b.D = p_.diffusivity(sp);
      b.dx = d_.channels[m].dx;
      b.dt = d_.dt;
      if (L.hyperbolic) {
        b.v_old = &old.channels[m].flux(sp);
        b.v_offset = b.offset + b.old->size();
        b.lambda = p_.wave_speed(sp);
      }
    }
    for (const auto& im : d_.interfaces)
      B.couplings.push_back({im, nullptr, nullptr});
    return B;
  }

  template <RelationSink S>
  void emit_blocks(S& sink, Species sp, Blocks& B) const {
    for (auto& cp : B.couplings) {
      cp.chamber = &B.chambers[cp.map.chamber];
      cp.channel = &B.channels[cp.map.channel];
    }
    const TimeWeights w = s_.weights();
    const bool hyper = layouts_[idx(sp)].hyperbolic;
    const AhoMode mode = aho_mode(w);
    for (const auto& b : B.chambers) {
      cn_step_u_2d(sink, b, w.parabolic);
      outer_boundary_u_2d(sink, b, w.parabolic, s_.boundary);
    }
    for (const auto& cp : B.couplings) interface_update_u_2d(sink, cp, w.parabolic, w.exchange);
    for (std::size_t m = 0; m < B.channels.size(); ++m) {
      const ChannelBlock& b = B.channels[m];
      if (hyper)
        aho_step(sink, b, mode, s_.aho_relaxation);
      else
        cn_step_u_1d(sink, b, w.parabolic);
      for (End end : {End::Left, End::Right}) {
        const Coupling* cp = nullptr;
        for (const auto& c : B.couplings)
          if (c.map.channel == m && (c.map.side == Side::Left) == (end == End::Left)) cp = &c;
        if (cp && hyper) {
          hyperbolic_interface_u0(sink, *cp, mode, w.exchange);
          emit_interface_flux(sink, *cp);
        } else if (cp) {
          interface_update_u_1d_parabolic(sink, *cp, w.parabolic, w.exchange);
        } else if (hyper) {
          emit_hyperbolic_end(sink, b, end, mode, s_.boundary);
        } else {
          emit_channel_end(sink, b, end, w.parabolic, s_.boundary);
        }
      }
    }
  }

  void solve_species(Species sp, const SystemState& old, SystemState& guess) {
    SpeciesLayout& L = layouts_[idx(sp)];
    MatrixSink& ms = matrix_[idx(sp)];
    ms.reset(L.size);
    emit(ms, sp, old, guess);

    const std::size_t ncomp = L.solvers.size();
    triplets_.resize(ncomp);
    for (auto& t : triplets_) t.clear();
    for (const Entry& e : ms.entries()) {
      const int c = L.owner[e.row];
      if (!active_[c]) continue;
      triplets_[c].emplace_back(static_cast<int>(L.local[e.row]), static_cast<int>(L.local[e.col]), e.value);
    }
    gather(guess, sp, x_);
    std::vector<double>& x = x_;
    for (std::size_t c = 0; c < ncomp; ++c) {
      if (!active_[c]) continue;
      const int n = static_cast<int>(L.comp_size[c]);
      SparseMatrix A(n, n);
      A.setFromTriplets(triplets_[c].begin(), triplets_[c].end());
      A.makeCompressed();
      Eigen::VectorXd b(n);
      for (std::size_t u = 0; u < L.size; ++u)
        if (L.owner[u] == static_cast<int>(c)) b[L.local[u]] = ms.rhs()[u];
      const Eigen::VectorXd y = L.solvers[c]->solve(A, b);
      for (std::size_t u = 0; u < L.size; ++u)
        if (L.owner[u] == static_cast<int>(c)) x[u] = y[L.local[u]];
    }
    if (s_.damping != 1.0) {
      gather(guess, sp, prev_);
      for (std::size_t u = 0; u < L.size; ++u)
        if (active_[L.owner[u]]) x[u] = (1.0 - s_.damping) * prev_[u] + s_.damping * x[u];
    }
    scatter(x, sp, guess);
  }

  void residual_norm(Species sp, const SystemState& old, const SystemState& guess,
                     std::vector<double>& comp_res) {
    const SpeciesLayout& L = layouts_[idx(sp)];
    gather(guess, sp, prev_);
    ResidualSink rs(prev_);
    emit(rs, sp, old, guess);
    const auto& r = rs.residual();
    for (std::size_t u = 0; u < L.size; ++u) {
      const double a = std::abs(r[u]);
      const auto c = static_cast<std::size_t>(L.owner[u]);
      if (!(a <= comp_res[c])) comp_res[c] = a;  // keeps NaN
    }
  }

  DiscreteLayout d_;
  ModelParams p_;
  SolveSettings s_;
  SafeguardLog log_;
  std::size_t step_ = 0;
  double t_old_ = 0.0, t_new_ = 0.0;
  std::vector<std::vector<unsigned char>> masks_;
  std::array<SpeciesLayout, 4> layouts_;
  std::array<std::vector<SourceBuffers>, 4> sources_;
  std::array<MatrixSink, 4> matrix_{MatrixSink(0), MatrixSink(0), MatrixSink(0), MatrixSink(0)};
  std::vector<std::vector<Eigen::Triplet<double, int>>> triplets_;
  std::vector<ChemotacticFlux2D> flux2d_;
  std::vector<ChemotacticFlux1D> flux1d_;
  std::vector<double> prev_, x_;
  std::vector<unsigned char> active_;
  bool fluxes_frozen_ = false;
};

/// One step with a fresh workspace.
inline SystemState advance_step(const SystemState& st, const DiscreteLayout& d,
                                const ModelParams& p, const SolveSettings& s) {
  Stepper stepper(d, p, s);
  SystemState next = st;
  stepper.advance(next);
  return next;
}

struct RunHooks {
  std::size_t ledger_every = 1;    // steps between ledger entries
  std::size_t snapshot_every = 0;  // steps between snapshots, 0 for first and last only
  std::function<void(const SystemState&, std::size_t)> snapshot;
};

struct PositivityRecord {
  std::array<double, 4> minimum{0.0, 0.0, 0.0, 0.0};
  std::array<NodeRef, 4> where;
  std::array<double, 4> when{};
  bool flagged = false;
};

struct RunResult {
  SystemState final_state;
  MassLedger ledger;
  SafeguardLog safeguards;
  PositivityRecord positivity;
  std::size_t steps = 0;
  int max_iterations = 0;
  double max_residual = 0.0;
};

inline std::size_t step_count(double t_end, double dt) {
  if (!(t_end >= 0)) throw ConfigError("t_end must be nonnegative");
  const double r = t_end / dt;
  const double k = std::round(r);
  if (std::abs(r - k) <= 1e-9 * std::max(1.0, r)) return static_cast<std::size_t>(k);
  return static_cast<std::size_t>(std::ceil(r));
}

inline RunResult run_simulation(SystemState initial, const DiscreteLayout& d,
                                const ModelParams& p, const SolveSettings& s, double t_end,
                                const RunHooks& hooks = {}) {
  Stepper stepper(d, p, s);
  RunResult r;
  const std::size_t n = step_count(t_end, d.dt);
  const double t0 = initial.t;
  SystemState& st = initial;

  auto watch = [&](const SystemState& x) {
    const PositivityReport pr = positivity_monitor(x);
    for (int k = 0; k < 4; ++k)
      if (pr.minimum[k].value < r.positivity.minimum[k]) {
        r.positivity.minimum[k] = pr.minimum[k].value;
        r.positivity.where[k] = pr.minimum[k].where;
        r.positivity.when[k] = x.t;
      }
    r.positivity.flagged = r.positivity.flagged || pr.flagged;
  };
  for (int k = 0; k < 4; ++k) r.positivity.minimum[k] = 0.0;
  watch(st);
  r.ledger.entries.push_back(total_mass(st, d));
  if (hooks.snapshot) hooks.snapshot(st, 0);

  for (std::size_t k = 1; k <= n; ++k) {
    const StepInfo info = stepper.advance(st);
    st.t = t0 + static_cast<double>(k) * d.dt;
    r.max_iterations = std::max(r.max_iterations, info.iterations);
    r.max_residual = std::max(r.max_residual, info.residuals.back());
    watch(st);
    if (k == n || (hooks.ledger_every > 0 && k % hooks.ledger_every == 0))
      r.ledger.entries.push_back(total_mass(st, d));
    if (hooks.snapshot && (k == n || (hooks.snapshot_every > 0 && k % hooks.snapshot_every == 0)))
      hooks.snapshot(st, k);
  }
  r.steps = n;
  r.safeguards = stepper.safeguards();
  r.final_state = std::move(st);
  return r;
}

}  // namespace chemochip
