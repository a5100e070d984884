#pragma once

#include <cmath>
#include <limits>

#include "chemochip/errors.hpp"
#include "chemochip/state.hpp"

namespace chemochip {

/// Coefficients of the tumor/immune chemotaxis model.
struct ModelParams {
  double D_T = 56.0;
  double D_M = 900.0;
  double D_phi = 200.0;
  double D_omega = 200.0;
  double alpha_phi = 0.1;
  double beta_phi = 1e-4;
  double alpha_omega = 0.1;
  double beta_omega = 1e-4;
  double k1 = 3.9e-9;
  double k2 = 5e-6;
  double gamma = 2.0;
  double k_omega = 1.0;
  double K_T = 0.0;
  double K_M = 0.0;
  double alpha_T = 0.0;
  double alpha_M = 0.0;
  double lambda_T_wave = 0.0;  // 0 selects sqrt(D_T)
  double lambda_M_wave = 0.0;  // 0 selects sqrt(D_M)

  double diffusivity(Species s) const {
    switch (s) {
      case Species::T: return D_T;
      case Species::M: return D_M;
      case Species::Phi: return D_phi;
      default: return D_omega;
    }
  }

  double wave_speed(Species s) const {
    if (s == Species::T) return lambda_T_wave > 0 ? lambda_T_wave : std::sqrt(D_T);
    return lambda_M_wave > 0 ? lambda_M_wave : std::sqrt(D_M);
  }

  bool operator==(const ModelParams&) const = default;
};

/// chi(M, phi) = k1 M / (k2 + phi)^gamma
inline double chemotactic_sensitivity(double M, double phi, const ModelParams& p) {
  const double base = p.k2 + phi;
  if (!(base > 0)) throw InvalidStateError("chemoattractant below -k2, sensitivity undefined");
  if (M == 0.0) return 0.0;
  if (p.gamma == 2.0) return p.k1 * M / (base * base);
  return p.k1 * M / std::pow(base, p.gamma);
}

/// lambda_T(omega) = k_omega omega / (1 + omega)
inline double kill_rate(double omega, const ModelParams& p) {
  if (omega == -1.0 || !std::isfinite(omega))
    throw InvalidStateError("kill rate evaluated at its pole");
  return p.k_omega * omega / (1.0 + omega);
}

/// Drug-induced decay K_s exp(-alpha_s t) for T or M; zero for chemicals.
inline double drug_rate(double t, Species s, const ModelParams& p) {
  if (s == Species::T) return p.K_T == 0.0 ? 0.0 : p.K_T * std::exp(-p.alpha_T * t);
  if (s == Species::M) return p.K_M == 0.0 ? 0.0 : p.K_M * std::exp(-p.alpha_M * t);
  return 0.0;
}

struct ConditionResult {
  bool ok = true;
  double worst = 0.0;  // largest left-hand side seen
  double bound = 0.0;
  NodeRef where;
  double margin() const { return bound - worst; }
};

struct MonotonicityReport {
  ConditionResult chemotaxis;  // k1/(k2+phi)^gamma |grad phi| <= sqrt(D_M)
  ConditionResult killing;     // lambda_T(omega) T <= 1
  bool ok() const { return chemotaxis.ok && killing.ok; }
};

inline MonotonicityReport monotonicity_check(const SystemState& s, const DiscreteLayout& d,
                                             const ModelParams& p) {
  MonotonicityReport r;
  r.chemotaxis.bound = std::sqrt(p.D_M);
  r.killing.bound = 1.0;
  auto visit = [&](double phi, double grad, double omega, double T, const std::string& dom,
                   std::size_t i, std::size_t j) {
    const double base = p.k2 + phi;
    const double a = base > 0 ? p.k1 / std::pow(base, p.gamma) * std::abs(grad)
                              : std::numeric_limits<double>::infinity();
    if (a > r.chemotaxis.worst || (a == r.chemotaxis.worst && r.chemotaxis.where.domain.empty())) {
      r.chemotaxis.worst = a;
      r.chemotaxis.where = {dom, i, j};
    }
    const double b = omega > -1.0 ? p.k_omega * omega / (1.0 + omega) * T
                                  : std::numeric_limits<double>::infinity();
    if (b > r.killing.worst || (b == r.killing.worst && r.killing.where.domain.empty())) {
      r.killing.worst = b;
      r.killing.where = {dom, i, j};
    }
  };
  for (std::size_t c = 0; c < s.chambers.size(); ++c) {
    const auto& ch = s.chambers[c];
    const std::string dom = chamber_id(c);
    for (std::size_t i = 0; i < ch.phi.extent_x(); ++i)
      for (std::size_t j = 0; j < ch.phi.extent_y(); ++j) {
        const double gx = diff_x(ch.phi, i, j, d.dx);
        const double gy = diff_y(ch.phi, i, j, d.dy);
        visit(ch.phi(i, j), std::hypot(gx, gy), ch.omega(i, j), ch.T(i, j), dom, i, j);
      }
  }
  for (std::size_t m = 0; m < s.channels.size(); ++m) {
    const auto& ch = s.channels[m];
    const std::string dom = channel_id(m);
    for (std::size_t i = 0; i < ch.phi.size(); ++i)
      visit(ch.phi[i], diff_1d(ch.phi, i, d.channels[m].dx), ch.omega[i], ch.T[i], dom, i, 0);
  }
  r.chemotaxis.ok = r.chemotaxis.worst <= r.chemotaxis.bound;
  r.killing.ok = r.killing.worst <= r.killing.bound;
  return r;
}

}  // namespace chemochip
