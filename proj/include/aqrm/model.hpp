#pragma once

#include <cmath>
#include <numbers>
#include <optional>

namespace aqrm {

/// Laboratory couplings of the anisotropic Rabi Hamiltonian
///   H = omega a^dag a + (Omega/2) sigma_z + lambda1 (a sigma_+ + a^dag sigma_-)
///       + lambda2 (a sigma_- + a^dag sigma_+).
struct ModelParams {
  double omega = 1.0;    ///< field frequency
  double Omega = 100.0;  ///< qubit frequency
  double lambda1 = 0.0;  ///< rotating-wave coupling
  double lambda2 = 0.0;  ///< counter-rotating coupling
};

/// Dimensionless quantities every closed-form expression is written in.
struct DerivedParams {
  double g = 0.0;        ///< (lambda1 + lambda2) / sqrt(omega Omega)
  double gamma = 0.0;    ///< (lambda1 - lambda2) / (lambda1 + lambda2)
  double eta = 0.0;      ///< Omega / omega
  double xi = 0.0;       ///< gamma^2 - 1
  double mu = 0.0;       ///< 1 - gamma^2 g^2
  double delta_g = 0.0;  ///< 4 (1 - g^2)(1 - gamma^2 g^2)
  std::optional<double> eps_np;  ///< omega sqrt(delta_g) / 2, only when delta_g >= 0
  double e_np = 0.0;     ///< normal-phase ground energy (NaN when eps_np is undefined)
};

void validate(const ModelParams& p);

DerivedParams derive(const ModelParams& p);

/// Inverse of `derive` on (g, gamma, eta) at fixed omega.
ModelParams from_g_gamma(double g, double gamma, double omega, double eta);

/// derive(from_g_gamma(g, gamma, omega, eta)).
DerivedParams derive_g_gamma(double g, double gamma, double omega = 1.0, double eta = 1e6);

/// Strictly g < 1.
bool is_normal_phase(const DerivedParams& d);

/// Throws DomainError naming `where` unless delta_g > 0.
void require_normal_phase(const DerivedParams& d, const char* where);

/// Pure quantities of (g, gamma) used throughout.
inline double delta_g(double g, double gamma) {
  return 4.0 * (1.0 - g * g) * (1.0 - gamma * gamma * g * g);
}

/// Anisotropy for a coupling ratio lambda1/lambda2 = r.
inline double gamma_from_ratio(double ratio) { return (ratio - 1.0) / (ratio + 1.0); }
inline double ratio_from_gamma(double gamma) { return (1.0 + gamma) / (1.0 - gamma); }

/// tau_k = 2 k pi / (sqrt(delta_g) omega): the k-th return time of the
/// normal-phase oscillation.
inline double tau_k(double delta_g, double omega, int k = 1) {
  return 2.0 * k * std::numbers::pi / (std::sqrt(delta_g) * omega);
}

}  // namespace aqrm
