#pragma once

#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "aqrm/fock.hpp"
#include "aqrm/model.hpp"
#include "aqrm/scan.hpp"

namespace aqrm {

struct QubitSuperposition {
  Complex c_up{1.0 / std::numbers::sqrt2, 0.0};
  Complex c_down{1.0 / std::numbers::sqrt2, 0.0};
};

void validate(const QubitSuperposition& q);

/// Field state of the probe, buildable at any cutoff.
struct ProbeState {
  enum class Kind { vacuum, plus, coherent };
  Kind kind = Kind::vacuum;
  Complex alpha{1.0, 0.0};  ///< coherent amplitude

  /// "vacuum", "plus" ((|0> + |1>)/sqrt 2) or "coherent:<alpha>".
  static ProbeState parse(const std::string& tag);
  std::string tag() const;
  Ket at(int n) const;
};

struct SqueezeParams {
  double r_down = 0.0;
  double r_up = 0.0;
};

/// Bogoliubov angles that diagonalize H_np^down and H_np^up:
///   r_down = -ln[1 - 4 l1 l2 / (omega Omega - (l1 - l2)^2)] / 4
///   r_up   = -ln[1 + 4 l1 l2 / (omega Omega + (l1 - l2)^2)] / 4
SqueezeParams squeeze_parameters(const ModelParams& p);

/// G(g, t) = <phi| u_up^dag u_down |phi>. Both branches evolve under their
/// symmetric-ordered forms, i.e. the a^dag a Hamiltonians plus their zero-point
/// shifts; all other constants are dropped.
Complex loschmidt_amplitude(const ModelParams& p, const Ket& phi, double t);

struct SigmaStats {
  double mean = 0.0;
  double variance = 0.0;
};

/// <sigma_x> = 2 Re[c_up^* c_down G]; Var = 1 - <sigma_x>^2 since sigma_x^2 = 1.
SigmaStats sigma_x_statistics(const QubitSuperposition& q, const ModelParams& p, const Ket& phi,
                              double t);

/// L(g) = sqrt[(1 + g^2)(1 + gamma^2 g^2) / ((1 - g^2)(1 - gamma^2 g^2))].
double loschmidt_l(double g, double gamma);
/// L - floor(L).
double loschmidt_frac(double g, double gamma);

struct WorkingPoint {
  double g_w = 0.0;
  int branch = 0;   ///< m in L(g_w) = m + 1/2
  double tau = 0.0;  ///< 4 pi / (sqrt(Delta_{g_w}) omega)
};

/// Solutions of L(g) = m + 1/2 in (g_lo, g_hi), in increasing g, at most `count`.
std::vector<WorkingPoint> find_working_points(double gamma, double g_lo, double g_hi, int count = 1000,
                                              double omega = 1.0);

struct SigmaInversion {
  double mean_sigma_x = 0.0;
  double variance = 0.0;
  std::optional<double> inv_var_fd;  ///< empty when Var[sigma_x] < 1e-12
  double inv_var_appendix_c = 0.0;   ///< 64 pi^2 g^2 xi^2 mu^2 Delta^{-3} upsilon^2
  double upsilon = 0.0;              ///< Im <phi| u_up^dag u_down P^2 |phi>
  double qfi = 0.0;                  ///< QFI in g of the joint qubit-field state
  int n_used = 0;
  bool converged = false;
  std::vector<std::string> warnings;
};

/// Inverted variance (d<sigma_x>/dg)^2 / Var[sigma_x] at a working point, with
/// the evolution time frozen at wp.tau. Gamma, omega and eta are taken from p;
/// its coupling is replaced by g_w.
SigmaInversion inverted_variance_sigma(const QubitSuperposition& q, const ModelParams& p,
                                       const ProbeState& phi, const WorkingPoint& wp,
                                       const Truncation& tr);

/// |<m| S(r_up)^dag |phi>|^2 for m < count: weights of phi on the H_np^up eigenbasis.
std::vector<double> upper_branch_weights(const ModelParams& p, const Ket& phi, int count);

struct QubitProbeScanConfig {
  std::vector<double> ratio{1.0, 2.0, 4.0};
  double g_min = 0.3;
  double g_max = 0.99;
  int max_points = 1000;
  std::vector<ProbeState> states{ProbeState{}};
  QubitSuperposition qubit;
  double omega = 1.0;
  double eta = 1e6;
  double sigma_x_threshold = 0.05;
  Truncation truncation;
};

/// Columns: ratio_l1_l2, branch, g_w, delta_g, tau_omega, mean_sigma_x,
/// inv_var_fd, inv_var_appendix_c, upsilon, initial_state_tag, qfi.
std::vector<ScanRow> scan_fig2(const QubitProbeScanConfig& cfg, int workers = 1);

}  // namespace aqrm
