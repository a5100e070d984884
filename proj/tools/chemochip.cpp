// chemochip command line: simulate, converge, mass-audit.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"

#include "chemochip/chemochip.hpp"

namespace fs = std::filesystem;
using namespace chemochip;

namespace {

enum Exit { Ok = 0, ConfigFailure = 2, SolverFailure = 3, SafeguardFailure = 4 };

fs::path output_root(const RunConfig& c, const std::string& out) {
  if (!out.empty()) return out;
  if (const char* root = std::getenv("CHEMOCHIP_OUTPUT_ROOT"))
    return fs::path(root) / (c.name.empty() ? "run" : c.name);
  return c.output_dir;
}

void print_masses(const RunResult& r) {
  const auto& last = r.ledger.entries.back();
  std::printf("%-8s %22s %22s %12s\n", "species", "final mass", "relative drift", "minimum");
  for (Species sp : all_species) {
    const auto dr = mass_drift(r.ledger, sp);
    const int k = static_cast<int>(sp);
    std::printf("%-8s %22.15e %22.15e%s %12.4e\n", std::string(species_name(sp)).c_str(), last.total[k], dr.value,
                dr.absolute ? "*" : " ", r.positivity.minimum[k]);
  }
  if (r.safeguards.total > 0)
    std::printf("safeguard warnings: %zu (worst margin %.4e)\n", r.safeguards.total, r.safeguards.worst_margin);
}

int simulate(const std::string& path, const std::string& out, const std::string& model, bool no_viscosity) {
  RunConfig c = load_config(path);
  if (model == "parabolic") c.solver.channel_model = ChannelModel::Parabolic;
  if (model == "hyperbolic") c.solver.channel_model = ChannelModel::Hyperbolic;
  if (no_viscosity) c.solver.viscosity = false;
  const DiscreteLayout d = c.discretize();
  const fs::path dir = output_root(c, out);
  fs::create_directories(dir);
  {
    std::ofstream cfg(dir / "config.json");
    cfg << serialize_config(c) << '\n';
  }
  RunHooks hooks;
  hooks.ledger_every = c.grid.ledger_every;
  hooks.snapshot_every = c.grid.snapshot_every;
  hooks.snapshot = [&](const SystemState& st, std::size_t step) {
    write_snapshot(dir / "snapshots", st, d, c.solver.channel_model, step);
  };
  const RunResult r = run_simulation(initial_state(c, d), d, c.params, c.solver, c.grid.t_end, hooks);
  write_ledger(dir / "ledger.csv", r.ledger);
  write_summary(dir / "summary.json", c, r);
  std::printf("%zu steps to t=%.6g, %s channels, output in %s\n", r.steps, r.final_state.t,
              to_string(c.solver.channel_model).c_str(), dir.string().c_str());
  print_masses(r);
  return Ok;
}

int converge(const std::string& path, std::size_t levels, const std::string& mode, std::size_t ref_factor,
             const std::string& out) {
  const RunConfig c = load_config(path);
  const LadderMode m = mode == "time" ? LadderMode::Time : LadderMode::Space;
  const ConvergenceReport rep = convergence_study(c, levels, m, ref_factor);
  std::printf("%s ladder, reference step %.6e\n", mode.c_str(), rep.reference_step);
  std::printf("%14s %22s\n", mode == "time" ? "dt" : "dx", "L1 error");
  for (const auto& row : rep.rows) std::printf("%14.6e %22.15e\n", row.step, row.error);
  if (!out.empty()) {
    fs::create_directories(out);
    std::ofstream csv(fs::path(out) / ("convergence_" + mode + ".csv"));
    csv << "step,error\n";
    for (const auto& row : rep.rows) csv << detail::fmt(row.step) << ',' << detail::fmt(row.error) << '\n';
    nlohmann::json j{{"mode", mode}, {"reference_step", rep.reference_step}, {"slope", rep.slope},
                     {"complete", rep.complete}, {"failure", rep.failure}};
    std::ofstream(fs::path(out) / ("convergence_" + mode + ".json")) << j.dump(2) << '\n';
  }
  if (!rep.complete) {
    std::fprintf(stderr, "study aborted: %s\n", rep.failure.c_str());
    return SolverFailure;
  }
  std::printf("fitted slope %.4f\n", rep.slope);
  return Ok;
}

int mass_audit(const std::string& path, const std::string& out) {
  RunConfig c = load_config(path);
  auto& p = c.params;
  p.alpha_phi = p.alpha_omega = p.k_omega = p.K_T = p.K_M = 0.0;
  p.beta_phi = p.beta_omega = 0.0;
  const DiscreteLayout d = c.discretize();
  RunHooks hooks;
  hooks.ledger_every = 1;
  const RunResult r = run_simulation(initial_state(c, d), d, c.params, c.solver, c.grid.t_end, hooks);
  print_masses(r);
  if (!out.empty()) {
    fs::create_directories(out);
    write_ledger(fs::path(out) / "ledger.csv", r.ledger);
    write_summary(fs::path(out) / "summary.json", c, r);
  }
  constexpr double limit = 1e-12;
  bool ok = true;
  for (Species sp : all_species) ok = ok && mass_drift(r.ledger, sp).value <= limit;
  std::printf("mass audit %s (limit %.0e)\n", ok ? "passed" : "FAILED", limit);
  return ok ? Ok : SolverFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chemotaxis simulation on a two-chamber microfluidic chip"};
  app.require_subcommand(1);

  std::string config, out, model, mode = "space";
  bool no_viscosity = false;
  std::size_t levels = 3, ref_factor = 4;

  auto* sim = app.add_subcommand("simulate", "run a configuration and write snapshots, ledger and summary");
  sim->add_option("--config", config)->required()->check(CLI::ExistingFile);
  sim->add_option("--out", out, "output directory (default: $CHEMOCHIP_OUTPUT_ROOT/<name> or output.directory)");
  sim->add_option("--channel-model", model)->check(CLI::IsMember({"parabolic", "hyperbolic"}));
  sim->add_flag("--no-viscosity", no_viscosity);

  auto* conv = app.add_subcommand("converge", "refinement ladder against a fine reference");
  conv->add_option("--config", config)->required()->check(CLI::ExistingFile);
  conv->add_option("--levels", levels)->check(CLI::Range(3, 8));
  conv->add_option("--mode", mode)->check(CLI::IsMember({"space", "time"}));
  conv->add_option("--reference-factor", ref_factor, "reference refinement beyond the finest level");
  conv->add_option("--out", out);

  auto* audit = app.add_subcommand("mass-audit", "run with all sources off and check the mass ledger");
  audit->add_option("--config", config)->required()->check(CLI::ExistingFile);
  audit->add_option("--out", out);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) return simulate(config, out, model, no_viscosity);
    if (*conv) return converge(config, levels, mode, ref_factor, out);
    if (*audit) return mass_audit(config, out);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return ConfigFailure;
  } catch (const SafeguardAbort& e) {
    std::fprintf(stderr, "safeguard abort: %s\n", e.what());
    return SafeguardFailure;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "solver failure: %s\n", e.what());
    return SolverFailure;
  }
  return Ok;
}
