#pragma once

#include <functional>
#include <string>
#include <vector>

#include "aqrm/fock.hpp"
#include "aqrm/model.hpp"
#include "aqrm/scan.hpp"

namespace aqrm {

// Closed forms for the initial state (|0> + i|1>)/sqrt(2) under H_np^down,
// with phase theta = sqrt(Delta_g) omega t / 2.

/// <X>_t = sqrt(2) Delta_g^{-1/2} mu sin(theta).
double mean_x_analytic(const DerivedParams& d, double omega, double t);

/// `appendix` is the oracle-consistent variance; `main_text` is kept as the
/// legacy form 1 - 2 g^2 xi^2 mu^2 Delta^{-1} [1 - cos 2theta].
enum class VarianceForm { appendix, main_text };

const char* to_string(VarianceForm f);
VarianceForm variance_form_from_string(const std::string& s);

double var_x_analytic(const DerivedParams& d, double omega, double t,
                      VarianceForm form = VarianceForm::appendix);

/// chi_g(t) = d<X>/dg =
///   -(1/sqrt 2)(4 mu^2/Delta + gamma^2) g omega t cos(theta) - 4 sqrt(2) mu g xi Delta^{-3/2} sin(theta).
double susceptibility_analytic(const DerivedParams& d, double omega, double t);

/// chi^2 / (Delta X)^2.
double inverted_variance(const DerivedParams& d, double omega, double t,
                         VarianceForm form = VarianceForm::appendix);

/// Peak value 32 pi^2 g^2 mu^4 Delta_g^{-3} k^2.
double inverted_variance_at_tau_k(const DerivedParams& d, double omega, int k);

/// Envelope 8 g^2 omega^2 mu^4 Delta_g^{-2} t^2 through the peaks.
double inverted_variance_envelope(const DerivedParams& d, double omega, double t);

enum class TraceSource { analytic, numeric };

struct QuadratureTrace {
  std::vector<double> times;
  std::vector<double> mean_x;
  std::vector<double> var_x;
  std::vector<double> chi_g;
  std::vector<double> inv_var;
  TraceSource source = TraceSource::analytic;
  int n_used = 0;
  bool converged = true;
};

/// `points_per_period` samples per period 2 pi / (sqrt(Delta_g) omega), from 0
/// through `periods` periods inclusive.
std::vector<double> time_grid(const DerivedParams& d, double omega, double periods,
                              int points_per_period = 400);

QuadratureTrace analytic_trace(const DerivedParams& d, double omega, const std::vector<double>& times,
                               VarianceForm form = VarianceForm::appendix);

/// Exact evolution of `psi0` (defaults to (|0> + i|1>)/sqrt(2)) under H_np^down at
/// cutoff n. chi_g is a central difference of <X> in g with step `dg_rel` g.
QuadratureTrace numeric_trace(const DerivedParams& d, double omega, const std::vector<double>& times,
                              int n, double dg_rel = 1e-6);
QuadratureTrace numeric_trace(const DerivedParams& d, double omega, const std::vector<double>& times,
                              const std::function<Ket(int)>& psi0, int n, double dg_rel = 1e-6);

/// Doubles the cutoff until mean and variance agree to tr.rel_tol and chi to
/// fd_tolerance(tr).
QuadratureTrace numeric_trace_converged(const DerivedParams& d, double omega,
                                        const std::vector<double>& times, const Truncation& tr);

/// Indices of strict three-point local maxima.
std::vector<std::size_t> local_maxima(const std::vector<double>& values);

struct Reconciliation {
  double residual_appendix = 0.0;  ///< max relative deviation from the numeric variance
  double residual_main_text = 0.0;
  VarianceForm selected = VarianceForm::appendix;
};

/// Compares both variance forms against exact evolution over one period at each
/// (g, gamma) point. Exactly one form must match within `tol`; otherwise
/// VerificationError.
Reconciliation reconcile_variance_forms(const std::vector<DerivedParams>& points, double omega,
                                        const Truncation& tr, double tol = 1e-6);

struct HomodyneScanConfig {
  std::vector<double> g;
  std::vector<double> ratio;  ///< lambda1 / lambda2
  double omega = 1.0;
  Truncation truncation;
};

/// One row per (g_w, ratio) at t = 2 pi / (sqrt(Delta_{g_w}) omega).
/// Columns: g, gamma, ratio_l1_l2, omega_t, mean_x_analytic, mean_x_numeric,
/// var_x, chi_analytic, chi_numeric, inv_var, qfi.
ScanRow homodyne_row(double g, double ratio, const HomodyneScanConfig& cfg);

std::vector<ScanRow> scan_fig1(const HomodyneScanConfig& cfg, int workers = 1);

}  // namespace aqrm
