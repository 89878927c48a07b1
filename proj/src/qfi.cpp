#include "aqrm/qfi.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace aqrm {

namespace {

constexpr Complex kI{0.0, 1.0};

double interior_max(const Eigen::MatrixXcd& m) { return interior(m).cwiseAbs().maxCoeff(); }

}  // namespace

const char* to_string(QfiMethod m) {
  switch (m) {
    case QfiMethod::analytic_eq7: return "analytic_eq7";
    case QfiMethod::exact_generator: return "exact_generator";
    case QfiMethod::finite_difference: return "finite_difference";
  }
  return "?";
}

GeneratorSet build_generators(const DerivedParams& d, double omega, int n) {
  if (n < 8) throw DomainError("build_generators: cutoff must be >= 8");
  const double g2 = d.g * d.g;
  const double gm2 = d.gamma * d.gamma;
  const Operator x2 = quad_x2(n);
  const Operator p2 = quad_p2(n);
  const Operator xp = quad_xp_sym(n);

  GeneratorSet gs{
      (omega / 2.0) * (x2 + p2),
      (omega / 2.0) * (x2 + gm2 * p2),
      (omega * omega / 2.0) * d.xi * xp,
      omega * omega * omega * d.xi * ((1.0 - g2) * x2 - d.mu * p2),
  };
  gs.delta = omega * omega * d.delta_g;
  gs.alpha = -g2;
  gs.omega = omega;

  const Operator c = commutator(gs.h0, gs.h1);
  const Operator a_check = Complex(0.0, -1.0) * c;
  const Operator b_check = Complex(-1.0) * commutator(gs.hamiltonian(), c);
  const double scale_a = std::max(1.0, interior_max(gs.a_op.matrix()));
  const double scale_b = std::max(1.0, interior_max(gs.b_op.matrix()));
  const double res_a = interior_max(gs.a_op.matrix() - a_check.matrix()) / scale_a;
  const double res_b = interior_max(gs.b_op.matrix() - b_check.matrix()) / scale_b;
  if (res_a > 1e-10 || res_b > 1e-10)
    throw VerificationError("generator algebra broken at g=" + std::to_string(d.g) +
                            ", gamma=" + std::to_string(d.gamma) + ": A residual " +
                            std::to_string(res_a) + ", B residual " + std::to_string(res_b));
  return gs;
}

double eigen_operator_residual(const GeneratorSet& gs) {
  const double sd = std::sqrt(gs.delta);
  const Operator gamma_op = (kI * sd) * gs.a_op - gs.b_op;
  const Operator lhs = commutator(gs.hamiltonian(), gamma_op);
  const Eigen::MatrixXcd diff = lhs.matrix() - sd * gamma_op.matrix();
  const double scale = std::max(1.0, interior_max(gamma_op.matrix()));
  return interior_max(diff) / scale;
}

Operator local_generator_exact(const GeneratorSet& gs, double t) {
  if (!(gs.delta > 0.0))
    throw DomainError("local_generator_exact: Delta_g <= 0, the generator is not oscillatory");
  const double D = gs.delta;
  const double sd = std::sqrt(D);
  const double ca = (std::cos(sd * t) - 1.0) / D;
  const double cb = (std::sin(sd * t) - sd * t) / (D * sd);
  return t * gs.h1 + ca * gs.a_op - cb * gs.b_op;
}

QfiResult qfi_analytic(const DerivedParams& d, double omega, double t, double var_p2) {
  require_normal_phase(d, "qfi_analytic");
  if (!(var_p2 >= 0.0)) throw DomainError("qfi_analytic: Var[P^2] must be non-negative");
  const double s = std::sqrt(d.delta_g) * omega * t;
  const double osc = std::sin(s) - s;
  QfiResult r;
  r.value = 16.0 * d.g * d.g * d.xi * d.xi * d.mu * d.mu * osc * osc /
            (d.delta_g * d.delta_g * d.delta_g) * var_p2;
  r.t = t;
  r.method = QfiMethod::analytic_eq7;
  return r;
}

QfiResult qfi_exact_generator(const GeneratorSet& gs, double t, const Ket& psi) {
  const Operator h = local_generator_exact(gs, t);
  QfiResult r;
  r.value = std::max(0.0, 4.0 * variance(h, psi));
  r.t = t;
  r.method = QfiMethod::exact_generator;
  r.n_used = static_cast<int>(h.cutoff());
  return r;
}

namespace {

double state_qfi_once(const std::function<Ket(double)>& psi_of, double x, double step) {
  const Ket plus = psi_of(x + step);
  const Ket minus = psi_of(x - step);
  const Ket mid = psi_of(x);
  const Eigen::VectorXcd dpsi = (plus.amplitudes() - minus.amplitudes()) / (2.0 * step);
  const Complex proj = mid.amplitudes().dot(dpsi);
  return 4.0 * (dpsi.squaredNorm() - std::norm(proj));
}

}  // namespace

QfiResult qfi_state(const std::function<Ket(double)>& psi_of, double x, double step) {
  if (!(step > 0.0)) throw DomainError("qfi_state: step must be positive");
  const double f1 = state_qfi_once(psi_of, x, step);
  const double f2 = state_qfi_once(psi_of, x, step / 2.0);
  const double scale = std::max(std::abs(f2), 1e-12);
  const double disagreement = std::abs(f1 - f2) / scale;

  QfiResult r;
  r.method = QfiMethod::finite_difference;
  r.value = f2;
  if (disagreement > 1e-3)
    throw NumericalError("finite-difference QFI: estimates at step " + std::to_string(step) +
                         " and step/2 disagree by " + std::to_string(disagreement) +
                         " (cancellation)");
  if (disagreement > 1e-7) {
    r.value = (4.0 * f2 - f1) / 3.0;
    r.richardson_applied = true;
  }
  r.value = std::max(0.0, r.value);
  return r;
}

QfiResult qfi_finite_difference(const std::function<Operator(double)>& h_of_alpha, double alpha,
                                double t, const Ket& psi, double step) {
  auto evolved = [&](double a) {
    const Operator h = h_of_alpha(a);
    return Propagator(h, "alpha=" + std::to_string(a)).evolve(psi, t);
  };
  QfiResult r = qfi_state(evolved, alpha, step);
  r.t = t;
  r.n_used = static_cast<int>(psi.cutoff());
  return r;
}

double default_step(double alpha) { return std::max(1e-5 * std::abs(alpha), 1e-8); }

std::function<Operator(double)> quadrature_family(double gamma, double omega, int n) {
  const Operator x2 = quad_x2(n);
  const Operator p2 = quad_p2(n);
  const Operator h0 = (omega / 2.0) * (x2 + p2);
  const Operator h1 = (omega / 2.0) * (x2 + gamma * gamma * p2);
  return [h0, h1](double alpha) { return h0 + alpha * h1; };
}

double var_p2(const Ket& psi) { return variance(quad_p2(static_cast<int>(psi.dim())), psi); }

}  // namespace aqrm
