#include "aqrm/model.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "aqrm/error.hpp"

namespace aqrm {

void validate(const ModelParams& p) {
  if (!(p.omega > 0.0) || !std::isfinite(p.omega))
    throw DomainError("omega must be positive and finite, got " + std::to_string(p.omega));
  if (!(p.Omega > 0.0) || !std::isfinite(p.Omega))
    throw DomainError("Omega must be positive and finite, got " + std::to_string(p.Omega));
  if (!(p.lambda1 >= 0.0) || !std::isfinite(p.lambda1))
    throw DomainError("lambda1 must be finite and non-negative, got " + std::to_string(p.lambda1));
  if (!(p.lambda2 >= 0.0) || !std::isfinite(p.lambda2))
    throw DomainError("lambda2 must be finite and non-negative, got " + std::to_string(p.lambda2));
}

DerivedParams derive(const ModelParams& p) {
  validate(p);
  const double sum = p.lambda1 + p.lambda2;
  if (sum == 0.0) throw DegenerateCouplingError("lambda1 = lambda2 = 0: anisotropy undefined");

  DerivedParams d;
  d.g = sum / std::sqrt(p.omega * p.Omega);
  d.gamma = (p.lambda1 - p.lambda2) / sum;
  d.eta = p.Omega / p.omega;
  d.xi = d.gamma * d.gamma - 1.0;
  d.mu = 1.0 - d.gamma * d.gamma * d.g * d.g;
  d.delta_g = 4.0 * (1.0 - d.g * d.g) * d.mu;
  if (d.delta_g >= 0.0) {
    const double eps = p.omega * std::sqrt(d.delta_g) / 2.0;
    d.eps_np = eps;
    d.e_np = 0.5 * (eps - p.omega + (p.lambda1 * p.lambda1 - p.lambda2 * p.lambda2) / p.Omega -
                    p.Omega);
  } else {
    d.e_np = std::numeric_limits<double>::quiet_NaN();
  }
  return d;
}

ModelParams from_g_gamma(double g, double gamma, double omega, double eta) {
  if (!(g >= 0.0) || !std::isfinite(g)) throw DomainError("g must be non-negative");
  if (!(std::abs(gamma) <= 1.0)) throw DomainError("|gamma| > 1 requires a negative coupling");
  if (!(omega > 0.0)) throw DomainError("omega must be positive");
  if (!(eta > 0.0)) throw DomainError("eta must be positive");

  ModelParams p;
  p.omega = omega;
  p.Omega = eta * omega;
  const double scale = g * std::sqrt(omega * p.Omega) / 2.0;
  p.lambda1 = scale * (1.0 + gamma);
  p.lambda2 = scale * (1.0 - gamma);
  return p;
}

DerivedParams derive_g_gamma(double g, double gamma, double omega, double eta) {
  return derive(from_g_gamma(g, gamma, omega, eta));
}

bool is_normal_phase(const DerivedParams& d) { return d.g < 1.0; }

void require_normal_phase(const DerivedParams& d, const char* where) {
  if (!(d.delta_g > 0.0))
    throw DomainError(std::string(where) + ": Delta_g <= 0 (g = " + std::to_string(d.g) +
                      ", gamma = " + std::to_string(d.gamma) + "), outside the normal phase");
}

}  // namespace aqrm
