#include "aqrm/validate.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <ostream>

#include "aqrm/fock.hpp"
#include "aqrm/homodyne.hpp"
#include "aqrm/qfi.hpp"
#include "aqrm/qubitprobe.hpp"

namespace aqrm {

namespace {

CheckResult check(std::string name, double tol, const std::function<double()>& residual) {
  CheckResult r;
  r.name = std::move(name);
  r.tolerance = tol;
  try {
    r.residual = residual();
    r.passed = std::isfinite(r.residual) && r.residual <= tol;
  } catch (const std::exception& e) {
    r.residual = std::numeric_limits<double>::infinity();
    r.detail = e.what();
  }
  return r;
}

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

std::vector<CheckResult> run_validation(bool quick) {
  std::vector<CheckResult> out;
  const Truncation tr{32, 256, 1e-10};

  out.push_back(check("ccr [a, a^dag] = 1 (interior)", 1e-12, [] {
    const int n = 40;
    const Operator c = commutator(annihilation(n), creation(n));
    return max_abs(interior(c.matrix() - Eigen::MatrixXcd::Identity(n, n), 1));
  }));

  out.push_back(check("unitarity of exp(-iHt), full model", 1e-10, [] {
    const ModelParams p = from_g_gamma(0.7, 0.3, 1.0, 20.0);
    const Operator u = evolution_operator(hamiltonian_full(p, 24), 3.7);
    return max_abs(u.matrix() * u.matrix().adjoint() - Eigen::MatrixXcd::Identity(u.dim(), u.dim()));
  }));

  out.push_back(check("squeezed vacuum photon number = sinh^2 r", 1e-10, [] {
    const double r = 0.8;
    const int n = 96;
    const Operator s = squeeze(r, n);
    const Ket psi(s.matrix().col(0), Basis::field_only);
    return rel(expectation(number_op(n), psi).real(), std::sinh(r) * std::sinh(r));
  }));

  out.push_back(check("generator eigen-operator residual", 1e-10, [] {
    double worst = 0.0;
    for (double g : {0.5, 0.9})
      for (double gamma : {0.0, 1.0 / 3.0, -0.6})
        worst = std::max(worst, eigen_operator_residual(build_generators(derive_g_gamma(g, gamma), 1.0, 48)));
    return worst;
  }));

  out.push_back(check("exact-generator QFI vs finite-difference QFI", 1e-6, [] {
    const double g = 0.8, gamma = 1.0 / 3.0, omega = 1.0;
    const DerivedParams d = derive_g_gamma(g, gamma, omega);
    const double t = tau_k(d.delta_g, omega, 1);
    const int n = 96;
    const Ket psi = homodyne_initial_state(n);
    const double exact = qfi_exact_generator(build_generators(d, omega, n), t, psi).value;
    const double alpha = -g * g;
    const double fd =
        qfi_finite_difference(quadrature_family(gamma, omega, n), alpha, t, psi, default_step(alpha)).value;
    return rel(fd, exact);
  }));

  out.push_back(check("finite-frequency operator vs quadrature form", 1e-9, [] {
    double worst = 0.0;
    for (double eta : {50.0, 1e3})
      for (double gamma : {-0.4, 0.0, 0.3}) {
        const ModelParams p = from_g_gamma(0.9, gamma, 1.0, eta);
        const Eigen::MatrixXcd a = hamiltonian_np_finite_operator_form(p, 40).matrix();
        const Eigen::MatrixXcd b = hamiltonian_np_finite_quadrature_form(p, 40).matrix();
        worst = std::max(worst, max_abs(a - b) / std::max(1.0, max_abs(a)));
      }
    return worst;
  }));

  {
    CheckResult r;
    r.name = "variance form reconciliation selects appendix";
    r.tolerance = 1e-6;
    try {
      const Reconciliation rec = reconcile_variance_forms(
          {derive_g_gamma(0.8, 1.0 / 3.0), derive_g_gamma(0.9, -0.5)}, 1.0, tr, r.tolerance);
      r.residual = rec.residual_appendix;
      r.passed = rec.selected == VarianceForm::appendix;
      r.detail = "main_text residual " + format_double(rec.residual_main_text);
    } catch (const std::exception& e) {
      r.residual = std::numeric_limits<double>::infinity();
      r.detail = e.what();
    }
    out.push_back(r);
  }

  if (quick) return out;

  out.push_back(check("full vs effective first gap at eta = 1e4", 1e-3, [] {
    const double g = 0.6, gamma = 0.2, omega = 1.0, eta = 1e4;
    const ModelParams p = from_g_gamma(g, gamma, omega, eta);
    const Propagator full(hamiltonian_full(p, 48));
    const Eigen::VectorXd& e = full.eigenvalues();
    const double gap = e(1) - e(0);
    return rel(gap, std::sqrt(delta_g(g, gamma)) * omega / 2.0);
  }));

  out.push_back(check("susceptibility: numeric d<X>/dg vs closed form", 1e-6, [] {
    double worst = 0.0;
    for (double gamma : {0.0, 1.0 / 3.0, 0.6}) {
      const DerivedParams d = derive_g_gamma(0.85, gamma);
      const std::vector<double> times = time_grid(d, 1.0, 2.0, 25);
      const QuadratureTrace num = numeric_trace_converged(d, 1.0, times, Truncation{32, 256, 1e-10});
      double scale = 0.0;
      for (double c : num.chi_g) scale = std::max(scale, std::abs(c));
      for (std::size_t i = 0; i < times.size(); ++i)
        worst = std::max(worst, std::abs(num.chi_g[i] - susceptibility_analytic(d, 1.0, times[i])) / scale);
    }
    return worst;
  }));

  out.push_back(check("working points solve L(g) = m + 1/2", 1e-10, [] {
    double worst = 0.0;
    for (double gamma : {0.0, 1.0 / 3.0, 0.6})
      for (const WorkingPoint& wp : find_working_points(gamma, 0.3, 0.99))
        worst = std::max(worst, std::abs(loschmidt_l(wp.g_w, gamma) - (wp.branch + 0.5)) / (wp.branch + 0.5));
    return worst;
  }));

  return out;
}

int validate_main(bool quick, std::ostream& out) {
  const std::vector<CheckResult> results = run_validation(quick);
  bool ok = true;
  for (const CheckResult& r : results) {
    ok = ok && r.passed;
    out << (r.passed ? "PASS " : "FAIL ") << r.name << "  residual=" << std::setprecision(3) << r.residual
        << " tol=" << r.tolerance;
    if (!r.detail.empty()) out << "  (" << r.detail << ")";
    out << '\n';
  }
  return ok ? 0 : 2;
}

}  // namespace aqrm
