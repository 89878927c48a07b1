#pragma once

#include <vector>

#include "aqrm/fock.hpp"
#include "aqrm/model.hpp"
#include "aqrm/scan.hpp"

namespace aqrm {

/// I_lab(tau) ~ c0 + c1 gamma + c2 gamma^2 at finite eta.
struct FiniteFreqSeries {
  double c0 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double e_poly = 0.0;  ///< the polynomial E(g, eta) inside c2
  double g = 0.0;
  double eta = 0.0;
};

/// c0 = g^2 pi^2 / (2 (1 - g^2)^3), c1 = g^2 pi^2 (2 + g^4) / ((1 - g^2)^4 eta),
/// c2 = g^2 pi^2 E / (4 (1 - g^2)^6 eta^2) with
/// E = 4g^10 + 4(2 + eta^2) + 2g^8(3eta^2 - 8) - 2g^2(9eta^2 + 4) - 2g^6(11eta^2 + 10)
///     + g^4(30eta^2 + 32 - pi^2).
FiniteFreqSeries series_coefficients(double g, double eta);

double series_inverted_variance(double g, double eta, double gamma);

/// chi^2 / (Delta X)^2 under the finite-frequency Hamiltonian for
/// (|0> + i|1>)/sqrt(2) at each time, at cutoff n. chi is a central difference
/// in g (step dg_rel g) at fixed gamma, eta and t.
std::vector<double> lab_inverted_variance(const ModelParams& p, const std::vector<double>& times, int n,
                                          double dg_rel = 1e-5);

struct LabValue {
  double value = 0.0;
  int n_used = 0;
  bool converged = false;
};

LabValue numeric_inverted_variance_lab(const ModelParams& p, double t, const Truncation& tr);

/// Numeric dI_lab/dgamma at gamma = 0, each side evaluated at its own
/// tau = 2 pi / (sqrt(Delta_g) omega); central difference with step h.
LabValue lab_gamma_slope(double g, double eta, double omega, double h, const Truncation& tr);

struct OptimalRatioConfig {
  std::vector<double> gamma;  ///< default: 81 points on [-0.5, 0.5]
  double t_lo = 0.9;          ///< window in units of tau(gamma)
  double t_hi = 1.0;
  int t_samples = 21;
  double omega = 1.0;
  Truncation truncation;

  OptimalRatioConfig();
};

struct OptimalRatio {
  double g = 0.0;
  double eta = 0.0;
  double gamma_star = 0.0;  ///< quadratic refinement through the best three grid points
  double ratio_star = 1.0;
  double t_star_over_tau = 0.0;
  double inv_var_max = 0.0;
  std::vector<double> profile;  ///< max over the t window, per gamma
  int n_used = 0;
  bool converged = false;
  bool at_edge = false;
};

OptimalRatio optimal_ratio(double g, double eta, const OptimalRatioConfig& cfg);

/// Columns: g, eta, gamma_star, ratio_star, t_star_over_tau, inv_var_max.
std::vector<ScanRow> optimal_ratio_scan(const std::vector<double>& g_grid,
                                        const std::vector<double>& eta_grid,
                                        const OptimalRatioConfig& cfg, int workers = 1);

}  // namespace aqrm
