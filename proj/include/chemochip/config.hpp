#pragma once

// Run configuration as JSON. Every section is optional except geometry and grid;
// omitted model parameters take the default table values. Unknown keys are errors.

#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "chemochip/errors.hpp"
#include "chemochip/geometry.hpp"
#include "chemochip/model.hpp"
#include "chemochip/solver.hpp"
#include "chemochip/state.hpp"

namespace chemochip {

struct GridSpec {
  double dx = 0.0, dy = 0.0, dt = 0.0, t_end = 0.0;
  std::size_t snapshot_every = 0;
  std::size_t ledger_every = 1;
  bool operator==(const GridSpec&) const = default;
};

/// One additive (or overriding) piece of an initial profile.
struct InitialTerm {
  enum class Kind { Gaussian, Constant, Linear };
  std::string domain = "all";  // left | right | channels | channel:<m> | all
  Kind kind = Kind::Constant;
  double amplitude = 0.0;
  std::array<double, 2> center{0.0, 0.0};
  double width = 1.0;
  double value = 0.0;
  double slope = 0.0;
  std::string axis = "x";
  std::optional<std::array<std::size_t, 2>> i_range, j_range;
  bool set = false;  // overwrite instead of add
  bool operator==(const InitialTerm&) const = default;
};

struct RunConfig {
  std::string name;
  ChipLayout layout;
  GridSpec grid;
  ModelParams params;
  SolveSettings solver;
  std::map<std::string, std::vector<InitialTerm>> initial;  // keyed by species name
  std::string output_dir = "out";
  bool operator==(const RunConfig&) const = default;

  DiscreteLayout discretize() const { return build_grid(layout, grid.dx, grid.dy, grid.dt); }
};

namespace detail {

using nlohmann::json;

inline void only_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!ok.count(it.key())) throw ConfigError(where + ": unknown key '" + it.key() + "'");
}

template <class T>
inline void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + "." + key + ": wrong type");
  }
}

inline double read_number(const json& j, const std::string& where) {
  if (!j.is_number()) throw ConfigError(where + ": expected a number");
  return j.get<double>();
}

template <class E>
inline E read_enum(const json& j, const char* key, E fallback, std::initializer_list<std::pair<const char*, E>> names,
                   const std::string& where) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_string()) throw ConfigError(where + "." + key + ": expected a string");
  const std::string v = j.at(key).get<std::string>();
  for (const auto& [n, e] : names)
    if (v == n) return e;
  throw ConfigError(where + "." + key + ": unknown value '" + v + "'");
}

#define CHEMOCHIP_PARAM_FIELDS(X)                                                             \
  X(D_T) X(D_M) X(D_phi) X(D_omega) X(alpha_phi) X(beta_phi) X(alpha_omega) X(beta_omega)     \
  X(k1) X(k2) X(gamma) X(k_omega) X(K_T) X(K_M) X(alpha_T) X(alpha_M) X(lambda_T_wave)         \
  X(lambda_M_wave)

inline ModelParams parse_params(const json& j) {
  ModelParams p;
#define X(name) #name,
  only_keys(j, {CHEMOCHIP_PARAM_FIELDS(X)}, "params");
#undef X
#define X(name) read(j, #name, p.name, "params");
  CHEMOCHIP_PARAM_FIELDS(X)
#undef X
  for (Species s : all_species)
    if (!(p.diffusivity(s) > 0)) throw ConfigError("params: diffusivities must be positive");
  if (!(p.k2 > 0)) throw ConfigError("params: k2 must be positive");
  if (!(p.gamma >= 0)) throw ConfigError("params: gamma must be nonnegative");
  if (p.lambda_T_wave < 0 || p.lambda_M_wave < 0) throw ConfigError("params: wave speeds must be positive");
  return p;
}

inline json dump_params(const ModelParams& p) {
  json j;
#define X(name) j[#name] = p.name;
  CHEMOCHIP_PARAM_FIELDS(X)
#undef X
  return j;
}

inline std::array<std::size_t, 2> read_range(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_unsigned() || !j[1].is_number_unsigned())
    throw ConfigError(where + ": expected [first, last] node indices");
  return {j[0].get<std::size_t>(), j[1].get<std::size_t>()};
}

inline InitialTerm parse_term(const json& j, const std::string& where) {
  only_keys(j, {"domain", "gaussian", "constant", "linear", "i_range", "j_range", "mode"}, where);
  InitialTerm t;
  read(j, "domain", t.domain, where);
  int kinds = 0;
  if (j.contains("gaussian")) {
    ++kinds;
    const json& g = j.at("gaussian");
    only_keys(g, {"amplitude", "center", "width"}, where + ".gaussian");
    t.kind = InitialTerm::Kind::Gaussian;
    read(g, "amplitude", t.amplitude, where);
    read(g, "width", t.width, where);
    if (g.contains("center")) {
      const json& c = g.at("center");
      if (!c.is_array() || c.size() != 2) throw ConfigError(where + ".center: expected [x, y]");
      t.center = {read_number(c[0], where), read_number(c[1], where)};
    }
    if (!(t.width > 0)) throw ConfigError(where + ": gaussian width must be positive");
  }
  if (j.contains("constant")) {
    ++kinds;
    t.kind = InitialTerm::Kind::Constant;
    t.value = read_number(j.at("constant"), where + ".constant");
  }
  if (j.contains("linear")) {
    ++kinds;
    const json& l = j.at("linear");
    only_keys(l, {"value", "slope", "axis"}, where + ".linear");
    t.kind = InitialTerm::Kind::Linear;
    read(l, "value", t.value, where);
    read(l, "slope", t.slope, where);
    read(l, "axis", t.axis, where);
    if (t.axis != "x" && t.axis != "y") throw ConfigError(where + ": axis must be x or y");
  }
  if (kinds != 1) throw ConfigError(where + ": give exactly one of gaussian, constant, linear");
  if (j.contains("i_range")) t.i_range = read_range(j.at("i_range"), where + ".i_range");
  if (j.contains("j_range")) t.j_range = read_range(j.at("j_range"), where + ".j_range");
  if (j.contains("mode")) {
    const std::string m = j.at("mode").get<std::string>();
    if (m != "add" && m != "set") throw ConfigError(where + ": mode must be add or set");
    t.set = m == "set";
  }
  return t;
}

inline json dump_term(const InitialTerm& t) {
  json j;
  j["domain"] = t.domain;
  switch (t.kind) {
    case InitialTerm::Kind::Gaussian:
      j["gaussian"] = {{"amplitude", t.amplitude}, {"center", {t.center[0], t.center[1]}}, {"width", t.width}};
      break;
    case InitialTerm::Kind::Constant: j["constant"] = t.value; break;
    case InitialTerm::Kind::Linear:
      j["linear"] = {{"value", t.value}, {"slope", t.slope}, {"axis", t.axis}};
      break;
  }
  if (t.i_range) j["i_range"] = {(*t.i_range)[0], (*t.i_range)[1]};
  if (t.j_range) j["j_range"] = {(*t.j_range)[0], (*t.j_range)[1]};
  j["mode"] = t.set ? "set" : "add";
  return j;
}

// Domain selector -> list of (is_chamber, index).
inline std::vector<std::pair<bool, std::size_t>> resolve_domain(const std::string& sel, std::size_t chambers,
                                                                std::size_t channels) {
  std::vector<std::pair<bool, std::size_t>> out;
  if (sel == "left") {
    out.push_back({true, 0});
  } else if (sel == "right") {
    if (chambers < 2) throw ConfigError("initial data refers to a missing right chamber");
    out.push_back({true, 1});
  } else if (sel == "channels" || sel == "all") {
    if (sel == "all")
      for (std::size_t c = 0; c < chambers; ++c) out.push_back({true, c});
    for (std::size_t m = 0; m < channels; ++m) out.push_back({false, m});
  } else if (sel.rfind("channel:", 0) == 0) {
    std::size_t m = 0;
    try {
      m = std::stoul(sel.substr(8));
    } catch (const std::exception&) {
      throw ConfigError("bad channel selector '" + sel + "'");
    }
    if (m >= channels) throw ConfigError("initial data refers to missing " + sel);
    out.push_back({false, m});
  } else {
    throw ConfigError("unknown domain selector '" + sel + "'");
  }
  return out;
}

}  // namespace detail

inline RunConfig parse_config(const std::string& text) {
  using detail::json;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed configuration: ") + e.what());
  }
  detail::only_keys(j, {"name", "geometry", "grid", "params", "channel_model", "solver", "initial", "output"}, "config");
  if (!j.contains("geometry") || !j.contains("grid")) throw ConfigError("config: geometry and grid are required");
  RunConfig c;
  detail::read(j, "name", c.name, "config");

  const json& g = j.at("geometry");
  detail::only_keys(g, {"Lx", "Ly", "L", "K", "channels", "channel_K", "channel_dx", "right_chamber"}, "geometry");
  detail::read(g, "Lx", c.layout.Lx, "geometry");
  detail::read(g, "Ly", c.layout.Ly, "geometry");
  detail::read(g, "L", c.layout.L, "geometry");
  detail::read(g, "K", c.layout.K, "geometry");
  detail::read(g, "channel_K", c.layout.channel_K, "geometry");
  detail::read(g, "channel_dx", c.layout.channel_dx, "geometry");
  detail::read(g, "right_chamber", c.layout.right_chamber, "geometry");
  if (g.contains("channels")) {
    if (!g.at("channels").is_array()) throw ConfigError("geometry.channels: expected a list");
    for (const auto& iv : g.at("channels")) {
      if (!iv.is_array() || iv.size() != 2) throw ConfigError("geometry.channels: expected [a, b] pairs");
      c.layout.channels.push_back({detail::read_number(iv[0], "geometry.channels"),
                                   detail::read_number(iv[1], "geometry.channels")});
    }
  }
  const auto report = validate_layout(c.layout);
  if (!report.ok()) throw ConfigError("geometry:\n" + report.describe());

  const json& gr = j.at("grid");
  detail::only_keys(gr, {"dx", "dy", "dt", "t_end", "snapshot_every", "ledger_every"}, "grid");
  detail::read(gr, "dx", c.grid.dx, "grid");
  c.grid.dy = c.grid.dx;
  detail::read(gr, "dy", c.grid.dy, "grid");
  detail::read(gr, "dt", c.grid.dt, "grid");
  detail::read(gr, "t_end", c.grid.t_end, "grid");
  detail::read(gr, "snapshot_every", c.grid.snapshot_every, "grid");
  detail::read(gr, "ledger_every", c.grid.ledger_every, "grid");
  if (!(c.grid.t_end >= 0)) throw ConfigError("grid.t_end must be nonnegative");

  if (j.contains("params")) c.params = detail::parse_params(j.at("params"));

  c.solver.channel_model = detail::read_enum(j, "channel_model", c.solver.channel_model,
                                             {{"parabolic", ChannelModel::Parabolic},
                                              {"hyperbolic", ChannelModel::Hyperbolic}},
                                             "config");
  if (j.contains("solver")) {
    const json& s = j.at("solver");
    detail::only_keys(s, {"scheme", "tolerance", "max_iterations", "damping", "viscosity", "aho_relaxation", "boundary", "order",
                          "monotonicity", "kk_ratio", "kk_threshold", "monotonicity_every"},
                      "solver");
    auto& S = c.solver;
    S.scheme = detail::read_enum(s, "scheme", S.scheme, {{"imex", TimeScheme::Imex}, {"explicit", TimeScheme::Explicit}}, "solver");
    detail::read(s, "tolerance", S.tolerance, "solver");
    detail::read(s, "max_iterations", S.max_iterations, "solver");
    detail::read(s, "damping", S.damping, "solver");
    detail::read(s, "viscosity", S.viscosity, "solver");
    detail::read(s, "kk_threshold", S.kk_threshold, "solver");
    detail::read(s, "monotonicity_every", S.monotonicity_every, "solver");
    S.aho_relaxation = detail::read_enum(s, "aho_relaxation", S.aho_relaxation,
                                         {{"consistent", AhoRelaxation::Consistent},
                                          {"displayed", AhoRelaxation::Displayed}},
                                         "solver");
    S.boundary = detail::read_enum(s, "boundary", S.boundary,
                                   {{"mass_preserving", BoundaryMode::MassPreserving},
                                    {"naive_neumann", BoundaryMode::NaiveNeumann}},
                                   "solver");
    const std::initializer_list<std::pair<const char*, SafeguardAction>> actions{
        {"warn", SafeguardAction::Warn}, {"abort", SafeguardAction::Abort}};
    S.monotonicity_action = detail::read_enum(s, "monotonicity", S.monotonicity_action, actions, "solver");
    S.kk_action = detail::read_enum(s, "kk_ratio", S.kk_action, actions, "solver");
    if (s.contains("order")) {
      const json& o = s.at("order");
      if (!o.is_array() || o.size() != 4) throw ConfigError("solver.order: list all four species");
      std::set<Species> seen;
      for (std::size_t k = 0; k < 4; ++k) {
        try {
          S.order[k] = species_from_name(o[k].get<std::string>());
        } catch (const std::exception&) {
          throw ConfigError("solver.order: unknown species");
        }
        seen.insert(S.order[k]);
      }
      if (seen.size() != 4) throw ConfigError("solver.order: repeated species");
    }
    if (!(S.tolerance > 0) || S.max_iterations < 1 || !(S.damping > 0 && S.damping <= 1))
      throw ConfigError("solver: tolerance > 0, max_iterations >= 1, 0 < damping <= 1 required");
  }

  if (j.contains("initial")) {
    const json& in = j.at("initial");
    detail::only_keys(in, {"T", "M", "phi", "omega"}, "initial");
    for (auto it = in.begin(); it != in.end(); ++it) {
      if (!it.value().is_array()) throw ConfigError("initial." + it.key() + ": expected a list");
      auto& terms = c.initial[it.key()];
      for (std::size_t k = 0; k < it.value().size(); ++k) {
        const std::string where = "initial." + it.key() + "[" + std::to_string(k) + "]";
        terms.push_back(detail::parse_term(it.value()[k], where));
        detail::resolve_domain(terms.back().domain, c.layout.chamber_count(), c.layout.channels.size());
      }
    }
  }
  if (j.contains("output")) {
    detail::only_keys(j.at("output"), {"directory"}, "output");
    detail::read(j.at("output"), "directory", c.output_dir, "output");
  }
  return c;
}

inline std::string serialize_config(const RunConfig& c) {
  using detail::json;
  json j;
  j["name"] = c.name;
  json g;
  g["Lx"] = c.layout.Lx;
  g["Ly"] = c.layout.Ly;
  g["L"] = c.layout.L;
  g["K"] = c.layout.K;
  g["channels"] = json::array();
  for (const auto& iv : c.layout.channels) g["channels"].push_back({iv.a, iv.b});
  g["channel_K"] = c.layout.channel_K;
  g["channel_dx"] = c.layout.channel_dx;
  g["right_chamber"] = c.layout.right_chamber;
  j["geometry"] = g;
  j["grid"] = {{"dx", c.grid.dx},       {"dy", c.grid.dy},
               {"dt", c.grid.dt},       {"t_end", c.grid.t_end},
               {"snapshot_every", c.grid.snapshot_every}, {"ledger_every", c.grid.ledger_every}};
  j["params"] = detail::dump_params(c.params);
  j["channel_model"] = to_string(c.solver.channel_model);
  const auto& S = c.solver;
  json order = json::array();
  for (Species s : S.order) order.push_back(std::string(species_name(s)));
  j["solver"] = {{"scheme", S.scheme == TimeScheme::Imex ? "imex" : "explicit"},
                 {"tolerance", S.tolerance},
                 {"max_iterations", S.max_iterations},
                 {"damping", S.damping},
                 {"viscosity", S.viscosity},
                 {"aho_relaxation", S.aho_relaxation == AhoRelaxation::Consistent ? "consistent" : "displayed"},
                 {"boundary", S.boundary == BoundaryMode::MassPreserving ? "mass_preserving" : "naive_neumann"},
                 {"order", order},
                 {"monotonicity", S.monotonicity_action == SafeguardAction::Warn ? "warn" : "abort"},
                 {"kk_ratio", S.kk_action == SafeguardAction::Warn ? "warn" : "abort"},
                 {"kk_threshold", S.kk_threshold},
                 {"monotonicity_every", S.monotonicity_every}};
  json in = json::object();
  for (const auto& [sp, terms] : c.initial) {
    in[sp] = json::array();
    for (const auto& t : terms) in[sp].push_back(detail::dump_term(t));
  }
  j["initial"] = in;
  j["output"] = {{"directory", c.output_dir}};
  return j.dump(2);
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

namespace detail {
inline double term_value(const InitialTerm& t, double gx, double gy, double lx, double ly) {
  switch (t.kind) {
    case InitialTerm::Kind::Gaussian: {
      const double rx = gx - t.center[0], ry = gy - t.center[1];
      return t.amplitude * std::exp(-(rx * rx + ry * ry) / (2.0 * t.width * t.width));
    }
    case InitialTerm::Kind::Constant: return t.value;
    case InitialTerm::Kind::Linear: return t.value + t.slope * (t.axis == "x" ? lx : ly);
  }
  return 0.0;
}
inline bool in_range(const std::optional<std::array<std::size_t, 2>>& r, std::size_t k) {
  return !r || ((*r)[0] <= k && k <= (*r)[1]);
}
}  // namespace detail

/// Evaluates the configured initial profiles on the grid. Gaussians use chip
/// coordinates (channels at their mid-height); linear ramps use domain-local ones.
inline SystemState initial_state(const RunConfig& c, const DiscreteLayout& d) {
  SystemState st = SystemState::zeros(d);
  for (const auto& [name, terms] : c.initial) {
    const Species sp = species_from_name(name);
    for (const auto& t : terms) {
      for (auto [chamber, k] : detail::resolve_domain(t.domain, d.chambers, d.channels.size())) {
        if (chamber) {
          Field2D& f = st.chambers[k][sp];
          for (std::size_t i = 0; i < f.extent_x(); ++i)
            for (std::size_t j = 0; j < f.extent_y(); ++j) {
              if (!detail::in_range(t.i_range, i) || !detail::in_range(t.j_range, j)) continue;
              const double lx = static_cast<double>(i) * d.dx, ly = static_cast<double>(j) * d.dy;
              const double v = detail::term_value(t, d.chamber_origin(k) + lx, ly, lx, ly);
              f(i, j) = t.set ? v : f(i, j) + v;
            }
        } else {
          Field1D& f = st.channels[k][sp];
          const auto& cg = d.channels[k];
          for (std::size_t i = 0; i < f.size(); ++i) {
            if (!detail::in_range(t.i_range, i)) continue;
            const double lx = static_cast<double>(i) * cg.dx;
            const double v = detail::term_value(t, d.Lx + lx, cg.y_mid, lx, 0.0);
            f[i] = t.set ? v : f[i] + v;
          }
        }
      }
    }
  }
  return st;
}

}  // namespace chemochip
