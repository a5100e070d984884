#pragma once

// Refinement ladders against a fine reference run. Errors are L1 on the coarse grid,
// with the reference restricted by injection onto coarse nodes.

#include <cmath>
#include <future>
#include <string>
#include <vector>

#include "chemochip/config.hpp"
#include "chemochip/solver.hpp"

namespace chemochip {

enum class LadderMode { Space, Time };

struct LadderRow {
  double step = 0.0;  // dx for space ladders, dt for time ladders
  double error = 0.0;
};

struct ConvergenceReport {
  LadderMode mode = LadderMode::Space;
  double reference_step = 0.0;
  std::vector<LadderRow> rows;
  double slope = 0.0;
  bool complete = false;
  std::string failure;
};

/// Least-squares slope of log(error) against log(step).
inline double fit_slope(const std::vector<LadderRow>& rows) {
  const double n = static_cast<double>(rows.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& r : rows) {
    const double x = std::log(r.step), y = std::log(r.error);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

/// L1 distance over every domain and species between a coarse state and a finer one
/// whose node spacing divides the coarse spacing by `ratio`.
inline double restricted_l1(const SystemState& coarse, const DiscreteLayout& dc, const SystemState& fine,
                            std::size_t ratio) {
  double err = 0.0;
  for (std::size_t c = 0; c < coarse.chambers.size(); ++c)
    for (Species sp : all_species) {
      const Field2D& a = coarse.chambers[c][sp];
      const Field2D& b = fine.chambers[c][sp];
      Field2D diff(a.nx(), a.ny());
      for (std::size_t i = 0; i < a.extent_x(); ++i)
        for (std::size_t j = 0; j < a.extent_y(); ++j) diff(i, j) = std::abs(a(i, j) - b(i * ratio, j * ratio));
      err += trap_2d(diff, dc.dx, dc.dy);
    }
  for (std::size_t m = 0; m < coarse.channels.size(); ++m)
    for (Species sp : all_species) {
      const Field1D& a = coarse.channels[m][sp];
      const Field1D& b = fine.channels[m][sp];
      Field1D diff(a.size() - 2);
      for (std::size_t i = 0; i < a.size(); ++i) diff[i] = std::abs(a[i] - b[i * ratio]);
      err += trap_1d(diff, dc.channels[m].dx);
    }
  return err;
}

namespace detail {
inline RunConfig refine(RunConfig c, LadderMode mode, std::size_t factor) {
  const double f = static_cast<double>(factor);
  if (mode == LadderMode::Space) {
    c.grid.dx /= f;
    c.grid.dy /= f;
    for (double& h : c.layout.channel_dx) h /= f;
  } else {
    c.grid.dt /= f;
  }
  return c;
}
inline SystemState run_final(const RunConfig& c) {
  const DiscreteLayout d = c.discretize();
  return run_simulation(initial_state(c, d), d, c.params, c.solver, c.grid.t_end).final_state;
}
}  // namespace detail

/// Runs the base configuration refined by 1, 2, ..., 2^(levels-1) and a reference
/// refined by 2^(levels-1) * reference_factor. Ladder members run concurrently.
inline ConvergenceReport convergence_study(const RunConfig& base, std::size_t levels, LadderMode mode,
                                           std::size_t reference_factor = 4) {
  if (levels < 3) throw ConfigError("a convergence study needs at least three levels");
  if (reference_factor < 2) throw ConfigError("the reference must be finer than the finest level");
  ConvergenceReport rep;
  rep.mode = mode;
  const std::size_t ref_scale = (std::size_t{1} << (levels - 1)) * reference_factor;
  const RunConfig ref_cfg = detail::refine(base, mode, ref_scale);
  rep.reference_step = mode == LadderMode::Space ? ref_cfg.grid.dx : ref_cfg.grid.dt;

  std::future<SystemState> ref = std::async(std::launch::async, detail::run_final, ref_cfg);
  std::vector<std::future<SystemState>> runs;
  std::vector<RunConfig> cfgs;
  for (std::size_t k = 0; k < levels; ++k) {
    cfgs.push_back(detail::refine(base, mode, std::size_t{1} << k));
    runs.push_back(std::async(std::launch::async, detail::run_final, cfgs.back()));
  }

  SystemState reference;
  try {
    reference = ref.get();
  } catch (const std::exception& e) {
    rep.failure = std::string("reference run failed: ") + e.what();
    for (auto& r : runs) r.wait();
    return rep;
  }
  for (std::size_t k = 0; k < levels; ++k) {
    SystemState s;
    try {
      s = runs[k].get();
    } catch (const std::exception& e) {
      rep.failure = "level " + std::to_string(k) + " failed: " + e.what();
      for (std::size_t q = k + 1; q < levels; ++q) runs[q].wait();
      return rep;
    }
    const DiscreteLayout d = cfgs[k].discretize();
    const std::size_t ratio = mode == LadderMode::Space ? ref_scale >> k : 1;
    rep.rows.push_back({mode == LadderMode::Space ? cfgs[k].grid.dx : cfgs[k].grid.dt,
                        restricted_l1(s, d, reference, ratio)});
  }
  rep.slope = fit_slope(rep.rows);
  rep.complete = true;
  return rep;
}

}  // namespace chemochip
