#pragma once

#include <functional>

#include "aqrm/fock.hpp"
#include "aqrm/model.hpp"

namespace aqrm {

/// Generator algebra of the quadrature realization H_alpha = H0 + alpha H1 with
/// alpha = -g^2, H0 = omega (X^2 + P^2)/2 and H1 = omega (X^2 + gamma^2 P^2)/2.
struct GeneratorSet {
  Operator h0;
  Operator h1;
  Operator a_op;  ///< -i [H0, H1]
  Operator b_op;  ///< -[H_alpha, [H0, H1]]
  double delta = 0.0;
  double alpha = 0.0;
  double omega = 1.0;

  Operator hamiltonian() const { return h0 + alpha * h1; }
};

/// Closed-form A and B on an n-level basis. Verifies both commutator
/// identities on the interior block; VerificationError when either fails.
GeneratorSet build_generators(const DerivedParams& d, double omega, int n);

/// max |[H_alpha, Gamma] - sqrt(Delta) Gamma| over the interior block, relative
/// to max(1, max |Gamma|), with Gamma = i sqrt(Delta) A - B.
double eigen_operator_residual(const GeneratorSet& gs);

/// h_alpha(t) = H1 t + (cos(sqrt(D) t) - 1)/D A - (sin(sqrt(D) t) - sqrt(D) t)/D^{3/2} B.
Operator local_generator_exact(const GeneratorSet& gs, double t);

enum class QfiMethod { analytic_eq7, exact_generator, finite_difference };

const char* to_string(QfiMethod m);

struct QfiResult {
  double value = 0.0;
  double t = 0.0;
  QfiMethod method = QfiMethod::exact_generator;
  int n_used = 0;
  bool richardson_applied = false;
};

/// F_g(t) ~ 16 g^2 xi^2 mu^2 [sin(sqrt(D_g) omega t) - sqrt(D_g) omega t]^2 / D_g^3 Var[P^2].
QfiResult qfi_analytic(const DerivedParams& d, double omega, double t, double var_p2);

/// 4 Var[h_alpha] for the exact generator. Fisher information for alpha.
QfiResult qfi_exact_generator(const GeneratorSet& gs, double t, const Ket& psi);

/// Pure-state QFI 4(<d psi|d psi> - |<psi|d psi>|^2) of a one-parameter state
/// family, by central differences with a Richardson check over {step, step/2}.
/// When the two estimates disagree by more than 1e-7 relative, the extrapolated
/// value is returned; beyond 1e-3 the difference is dominated by cancellation
/// and NumericalError is thrown.
QfiResult qfi_state(const std::function<Ket(double)>& psi_of, double x, double step);

/// QFI of U(alpha) = exp(-i H(alpha) t) acting on psi. The state derivative is
/// [U(alpha + step) - U(alpha - step)] psi / (2 step), which equals
/// -i U(alpha) h psi.
QfiResult qfi_finite_difference(const std::function<Operator(double)>& h_of_alpha, double alpha,
                                double t, const Ket& psi, double step);

/// Relative step 1e-5 |alpha| (floored at 1e-8).
double default_step(double alpha);

/// H_np^down in quadrature form as a function of alpha = -g^2.
std::function<Operator(double)> quadrature_family(double gamma, double omega, int n);

/// Reparameterization between alpha = -g^2 and g: F_g = 4 g^2 F_alpha.
inline double fisher_g_from_alpha(double f_alpha, double g) { return 4.0 * g * g * f_alpha; }
inline double fisher_alpha_from_g(double f_g, double g) { return f_g / (4.0 * g * g); }

/// Var[P^2] of a field state.
double var_p2(const Ket& psi);

}  // namespace aqrm
