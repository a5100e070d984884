#pragma once

// CSV snapshots, the mass ledger and a run summary. Column layouts are read by plotkit,
// so change them in both places.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "json.hpp"

#include "chemochip/config.hpp"
#include "chemochip/diagnostics.hpp"
#include "chemochip/solver.hpp"

namespace chemochip {

namespace detail {
inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.15e", v);
  return buf;
}
inline std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  return out;
}
}  // namespace detail

inline std::string snapshot_name(const std::string& domain, std::size_t step) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%s_%08zu.csv", domain.c_str(), step);
  return buf;
}

/// One CSV per domain: chambers as i,j,x,y,T,M,phi,omega; channels as
/// i,x,T,M,phi,omega and vT,vM when the channel is hyperbolic.
inline void write_snapshot(const std::filesystem::path& dir, const SystemState& st, const DiscreteLayout& d,
                           ChannelModel model, std::size_t step) {
  std::filesystem::create_directories(dir);
  const std::string mname = to_string(model);
  for (std::size_t c = 0; c < st.chambers.size(); ++c) {
    auto out = detail::open_out(dir / snapshot_name(chamber_id(c), step));
    out << "# t=" << detail::fmt(st.t) << " domain=" << chamber_id(c) << " model=" << mname << "\n";
    out << "i,j,x,y,T,M,phi,omega\n";
    const auto& ch = st.chambers[c];
    for (std::size_t i = 0; i < ch.T.extent_x(); ++i)
      for (std::size_t j = 0; j < ch.T.extent_y(); ++j) {
        out << i << ',' << j << ',' << detail::fmt(d.chamber_origin(c) + static_cast<double>(i) * d.dx) << ','
            << detail::fmt(static_cast<double>(j) * d.dy);
        for (Species sp : all_species) out << ',' << detail::fmt(ch[sp](i, j));
        out << '\n';
      }
  }
  const bool hyp = model == ChannelModel::Hyperbolic;
  for (std::size_t m = 0; m < st.channels.size(); ++m) {
    auto out = detail::open_out(dir / snapshot_name(channel_id(m), step));
    out << "# t=" << detail::fmt(st.t) << " domain=" << channel_id(m) << " model=" << mname << "\n";
    out << (hyp ? "i,x,T,M,phi,omega,vT,vM\n" : "i,x,T,M,phi,omega\n");
    const auto& c = st.channels[m];
    for (std::size_t i = 0; i < c.T.size(); ++i) {
      out << i << ',' << detail::fmt(d.Lx + static_cast<double>(i) * d.channels[m].dx);
      for (Species sp : all_species) out << ',' << detail::fmt(c[sp][i]);
      if (hyp) out << ',' << detail::fmt(c.vT[i]) << ',' << detail::fmt(c.vM[i]);
      out << '\n';
    }
  }
}

inline void write_ledger(const std::filesystem::path& file, const MassLedger& ledger) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  auto out = detail::open_out(file);
  out << "t,domain,mass_T,mass_M,mass_phi,mass_omega,total_T,total_M,total_phi,total_omega\n";
  for (const auto& e : ledger.entries)
    for (std::size_t k = 0; k < e.domains.size(); ++k) {
      out << detail::fmt(e.t) << ',' << e.domains[k];
      for (double v : e.per_domain[k]) out << ',' << detail::fmt(v);
      for (double v : e.total) out << ',' << detail::fmt(v);
      out << '\n';
    }
}

inline nlohmann::json summarize(const RunConfig& cfg, const RunResult& r) {
  nlohmann::json j;
  j["name"] = cfg.name;
  j["channel_model"] = to_string(cfg.solver.channel_model);
  j["steps"] = r.steps;
  j["t_final"] = r.final_state.t;
  j["max_iterations"] = r.max_iterations;
  j["max_residual"] = r.max_residual;
  nlohmann::json drift, minima;
  for (Species sp : all_species) {
    const auto dr = mass_drift(r.ledger, sp);
    drift[std::string(species_name(sp))] = {{"value", dr.value}, {"absolute", dr.absolute}};
    const int k = static_cast<int>(sp);
    minima[std::string(species_name(sp))] = {{"value", r.positivity.minimum[k]},
                                             {"domain", r.positivity.where[k].domain},
                                             {"i", r.positivity.where[k].i},
                                             {"j", r.positivity.where[k].j},
                                             {"t", r.positivity.when[k]}};
  }
  j["mass_drift"] = drift;
  j["minimum"] = minima;
  j["negativity_flagged"] = r.positivity.flagged;
  nlohmann::json ev = nlohmann::json::array();
  for (const auto& e : r.safeguards.events)
    ev.push_back({{"step", e.step}, {"t", e.t}, {"check", e.check}, {"detail", e.detail}, {"margin", e.margin}});
  j["safeguards"] = {{"total", r.safeguards.total}, {"worst_margin", r.safeguards.worst_margin}, {"events", ev}};
  return j;
}

inline void write_summary(const std::filesystem::path& file, const RunConfig& cfg, const RunResult& r) {
  auto out = detail::open_out(file);
  out << summarize(cfg, r).dump(2) << '\n';
}

}  // namespace chemochip
