#include "aqrm/homodyne.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "aqrm/qfi.hpp"

namespace aqrm {

namespace {

double theta(const DerivedParams& d, double omega, double t) {
  return std::sqrt(d.delta_g) * omega * t / 2.0;
}

Ket default_initial(int n) { return homodyne_initial_state(n); }

}  // namespace

double mean_x_analytic(const DerivedParams& d, double omega, double t) {
  require_normal_phase(d, "mean_x_analytic");
  return std::numbers::sqrt2 * d.mu * std::sin(theta(d, omega, t)) / std::sqrt(d.delta_g);
}

const char* to_string(VarianceForm f) {
  return f == VarianceForm::appendix ? "appendix" : "main_text";
}

VarianceForm variance_form_from_string(const std::string& s) {
  if (s == "appendix") return VarianceForm::appendix;
  if (s == "main_text") return VarianceForm::main_text;
  throw DomainError("unknown variance form '" + s + "' (expected appendix or main_text)");
}

double var_x_analytic(const DerivedParams& d, double omega, double t, VarianceForm form) {
  require_normal_phase(d, "var_x_analytic");
  const double one_minus_cos = 1.0 - std::cos(2.0 * theta(d, omega, t));
  const double g2 = d.g * d.g;
  if (form == VarianceForm::main_text)
    return 1.0 - 2.0 * g2 * d.xi * d.xi * d.mu * d.mu / d.delta_g * one_minus_cos;
  return 1.0 - d.mu * (2.0 * g2 * d.xi + d.mu) / d.delta_g * one_minus_cos;
}

double susceptibility_analytic(const DerivedParams& d, double omega, double t) {
  require_normal_phase(d, "susceptibility_analytic");
  const double th = theta(d, omega, t);
  const double D = d.delta_g;
  const double cos_term = -(4.0 * d.mu * d.mu / D + d.gamma * d.gamma) * d.g * omega * t *
                          std::cos(th) / std::numbers::sqrt2;
  const double sin_term = -4.0 * std::numbers::sqrt2 * d.mu * d.g * d.xi * std::sin(th) /
                          (D * std::sqrt(D));
  return cos_term + sin_term;
}

double inverted_variance(const DerivedParams& d, double omega, double t, VarianceForm form) {
  const double chi = susceptibility_analytic(d, omega, t);
  return chi * chi / var_x_analytic(d, omega, t, form);
}

double inverted_variance_at_tau_k(const DerivedParams& d, double omega, int k) {
  require_normal_phase(d, "inverted_variance_at_tau_k");
  if (k < 1) throw DomainError("inverted_variance_at_tau_k: k must be >= 1");
  (void)omega;
  const double D = d.delta_g;
  const double mu2 = d.mu * d.mu;
  return 32.0 * std::numbers::pi * std::numbers::pi * d.g * d.g * mu2 * mu2 * k * k / (D * D * D);
}

double inverted_variance_envelope(const DerivedParams& d, double omega, double t) {
  require_normal_phase(d, "inverted_variance_envelope");
  const double mu2 = d.mu * d.mu;
  return 8.0 * d.g * d.g * omega * omega * mu2 * mu2 * t * t / (d.delta_g * d.delta_g);
}

std::vector<double> time_grid(const DerivedParams& d, double omega, double periods,
                              int points_per_period) {
  require_normal_phase(d, "time_grid");
  if (points_per_period < 2 || !(periods > 0.0)) throw DomainError("time_grid: empty grid");
  const double period = tau_k(d.delta_g, omega, 1);
  const int count = static_cast<int>(std::lround(periods * points_per_period));
  std::vector<double> t(count + 1);
  for (int i = 0; i <= count; ++i) t[i] = period * i / points_per_period;
  return t;
}

QuadratureTrace analytic_trace(const DerivedParams& d, double omega, const std::vector<double>& times,
                               VarianceForm form) {
  QuadratureTrace tr;
  tr.times = times;
  tr.source = TraceSource::analytic;
  for (double t : times) {
    tr.mean_x.push_back(mean_x_analytic(d, omega, t));
    tr.var_x.push_back(var_x_analytic(d, omega, t, form));
    tr.chi_g.push_back(susceptibility_analytic(d, omega, t));
    tr.inv_var.push_back(tr.chi_g.back() * tr.chi_g.back() / tr.var_x.back());
  }
  return tr;
}

namespace {

struct Moments {
  std::vector<double> mean;
  std::vector<double> var;
};

Moments evolve_moments(double g, double gamma, double omega, const std::vector<double>& times,
                       const Ket& psi0, bool with_variance) {
  const int n = static_cast<int>(psi0.dim());
  const Propagator prop(hamiltonian_np_down_quadrature(g, gamma, omega, n), "homodyne g=" + std::to_string(g));
  const Operator x = quad_x(n);
  Moments m;
  for (double t : times) {
    const Ket psi = prop.evolve(psi0, t);
    m.mean.push_back(expectation(x, psi).real());
    if (with_variance) m.var.push_back(variance(x, psi));
  }
  return m;
}

}  // namespace

QuadratureTrace numeric_trace(const DerivedParams& d, double omega, const std::vector<double>& times,
                              const std::function<Ket(int)>& psi0, int n, double dg_rel) {
  require_normal_phase(d, "numeric_trace");
  const Ket start = psi0(n);
  const double dg = dg_rel * d.g;
  const Moments mid = evolve_moments(d.g, d.gamma, omega, times, start, true);
  const Moments up = evolve_moments(d.g + dg, d.gamma, omega, times, start, false);
  const Moments down = evolve_moments(d.g - dg, d.gamma, omega, times, start, false);

  QuadratureTrace tr;
  tr.times = times;
  tr.source = TraceSource::numeric;
  tr.n_used = n;
  tr.mean_x = mid.mean;
  tr.var_x = mid.var;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double chi = (up.mean[i] - down.mean[i]) / (2.0 * dg);
    tr.chi_g.push_back(chi);
    tr.inv_var.push_back(chi * chi / mid.var[i]);
  }
  return tr;
}

QuadratureTrace numeric_trace(const DerivedParams& d, double omega, const std::vector<double>& times,
                              int n, double dg_rel) {
  return numeric_trace(d, omega, times, default_initial, n, dg_rel);
}

QuadratureTrace numeric_trace_converged(const DerivedParams& d, double omega,
                                        const std::vector<double>& times, const Truncation& tr) {
  QuadratureTrace last;
  // <X> and Var X share a block: <X> vanishes at tau and only the variance sets its scale.
  const ConvergeVectorOutcome out = try_converge_blocks(tr, {tr.rel_tol, fd_tolerance(tr)}, [&](int n) {
    last = numeric_trace(d, omega, times, n);
    std::vector<double> moments = last.mean_x;
    moments.insert(moments.end(), last.var_x.begin(), last.var_x.end());
    return std::vector<std::vector<double>>{moments, last.chi_g};
  });
  last.n_used = out.n_used;
  last.converged = out.converged;
  return last;
}

std::vector<std::size_t> local_maxima(const std::vector<double>& values) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 1; i + 1 < values.size(); ++i)
    if (values[i] > values[i - 1] && values[i] > values[i + 1]) idx.push_back(i);
  return idx;
}

Reconciliation reconcile_variance_forms(const std::vector<DerivedParams>& points, double omega,
                                        const Truncation& tr, double tol) {
  Reconciliation rec;
  for (const DerivedParams& d : points) {
    const std::vector<double> times = time_grid(d, omega, 1.0, 50);
    const QuadratureTrace num = numeric_trace_converged(d, omega, times, tr);
    for (std::size_t i = 0; i < times.size(); ++i) {
      const double ref = std::max(std::abs(num.var_x[i]), 1e-12);
      rec.residual_appendix =
          std::max(rec.residual_appendix,
                   std::abs(var_x_analytic(d, omega, times[i], VarianceForm::appendix) - num.var_x[i]) / ref);
      rec.residual_main_text =
          std::max(rec.residual_main_text,
                   std::abs(var_x_analytic(d, omega, times[i], VarianceForm::main_text) - num.var_x[i]) / ref);
    }
  }
  const bool app = rec.residual_appendix <= tol;
  const bool main = rec.residual_main_text <= tol;
  if (app == main)
    throw VerificationError("variance reconciliation is ambiguous: appendix residual " +
                            std::to_string(rec.residual_appendix) + ", main-text residual " +
                            std::to_string(rec.residual_main_text));
  rec.selected = app ? VarianceForm::appendix : VarianceForm::main_text;
  return rec;
}

ScanRow homodyne_row(double g, double ratio, const HomodyneScanConfig& cfg) {
  const double gamma = gamma_from_ratio(ratio);
  const DerivedParams d = derive_g_gamma(g, gamma, cfg.omega);
  require_normal_phase(d, "homodyne");
  const double t = tau_k(d.delta_g, cfg.omega, 1);

  ScanRow row;
  row.input("g", g);
  row.input("gamma", gamma);
  row.input("ratio_l1_l2", ratio);
  row.input("omega_t", cfg.omega * t);

  const QuadratureTrace num = numeric_trace_converged(d, cfg.omega, {t}, cfg.truncation);
  const ConvergeOutcome qfi = try_converge(cfg.truncation, [&](int n) {
    const GeneratorSet gs = build_generators(d, cfg.omega, n);
    return fisher_g_from_alpha(qfi_exact_generator(gs, t, homodyne_initial_state(n)).value, g);
  });

  row.output("mean_x_analytic", mean_x_analytic(d, cfg.omega, t));
  row.output("mean_x_numeric", num.mean_x[0]);
  row.output("var_x", num.var_x[0]);
  row.output("chi_analytic", susceptibility_analytic(d, cfg.omega, t));
  row.output("chi_numeric", num.chi_g[0]);
  if (num.var_x[0] > 1e-12)
    row.output("inv_var", num.inv_var[0]);
  else
    row.output("inv_var", std::nullopt, "variance below 1e-12");
  row.output("qfi", qfi.value);

  row.n_used = std::max(num.n_used, qfi.n_used);
  row.converged = num.converged && qfi.converged;
  if (!num.converged) row.warn("quadrature moments not converged at n_max");
  if (!qfi.converged) row.warn("qfi not converged at n_max");
  return row;
}

std::vector<ScanRow> scan_fig1(const HomodyneScanConfig& cfg, int workers) {
  std::vector<std::pair<double, double>> cells;
  for (double r : cfg.ratio)
    for (double g : cfg.g) cells.emplace_back(g, r);
  return parallel_map<ScanRow>(cells.size(), workers, [&](std::size_t i) {
    const auto [g, r] = cells[i];
    return with_context("homodyne cell g=" + format_double(g) + ", ratio=" + format_double(r),
                        [&] { return homodyne_row(g, r, cfg); });
  });
}

}  // namespace aqrm
