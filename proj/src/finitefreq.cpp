#include "aqrm/finitefreq.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace aqrm {

namespace {

constexpr double kPi2 = std::numbers::pi * std::numbers::pi;

void require_unit_interval(double g, const char* where) {
  if (!(g > 0.0 && g < 1.0)) throw DomainError(std::string(where) + ": g must lie in (0, 1)");
}

}  // namespace

FiniteFreqSeries series_coefficients(double g, double eta) {
  require_unit_interval(g, "series_coefficients");
  if (!(eta > 0.0)) throw DomainError("series_coefficients: eta must be positive");
  const double g2 = g * g;
  const double g4 = g2 * g2;
  const double g6 = g4 * g2;
  const double g8 = g4 * g4;
  const double g10 = g8 * g2;
  const double e2 = eta * eta;
  const double u = 1.0 - g2;

  FiniteFreqSeries s;
  s.g = g;
  s.eta = eta;
  s.e_poly = 4.0 * g10 + 4.0 * (2.0 + e2) + 2.0 * g8 * (3.0 * e2 - 8.0) - 2.0 * g2 * (9.0 * e2 + 4.0) -
             2.0 * g6 * (11.0 * e2 + 10.0) + g4 * (30.0 * e2 + 32.0 - kPi2);
  s.c0 = g2 * kPi2 / (2.0 * u * u * u);
  s.c1 = g2 * kPi2 * (2.0 + g4) / (u * u * u * u * eta);
  s.c2 = g2 * kPi2 * s.e_poly / (4.0 * std::pow(u, 6) * e2);
  return s;
}

double series_inverted_variance(double g, double eta, double gamma) {
  const FiniteFreqSeries s = series_coefficients(g, eta);
  return s.c0 + s.c1 * gamma + s.c2 * gamma * gamma;
}

namespace {

struct LabMoments {
  std::vector<double> mean;
  std::vector<double> var;
};

LabMoments lab_moments(double g, double gamma, double omega, double eta,
                       const std::vector<double>& times, int n, bool with_variance) {
  const ModelParams p = from_g_gamma(g, gamma, omega, eta);
  const EffectiveHamiltonian h = hamiltonian_np_finite(p, n);
  const Propagator prop(h.op, "finite-frequency g=" + std::to_string(g) +
                                  ", gamma=" + std::to_string(gamma) + ", eta=" + std::to_string(eta));
  const Ket psi0 = homodyne_initial_state(n);
  const Operator x = quad_x(n);
  LabMoments m;
  for (double t : times) {
    const Ket psi = prop.evolve(psi0, t);
    m.mean.push_back(expectation(x, psi).real());
    if (with_variance) m.var.push_back(variance(x, psi));
  }
  return m;
}

}  // namespace

std::vector<double> lab_inverted_variance(const ModelParams& p, const std::vector<double>& times, int n,
                                          double dg_rel) {
  const DerivedParams d = derive(p);
  require_normal_phase(d, "lab_inverted_variance");
  const double dg = dg_rel * d.g;
  const LabMoments mid = lab_moments(d.g, d.gamma, p.omega, d.eta, times, n, true);
  const LabMoments up = lab_moments(d.g + dg, d.gamma, p.omega, d.eta, times, n, false);
  const LabMoments down = lab_moments(d.g - dg, d.gamma, p.omega, d.eta, times, n, false);
  std::vector<double> out;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double chi = (up.mean[i] - down.mean[i]) / (2.0 * dg);
    out.push_back(chi * chi / mid.var[i]);
  }
  return out;
}

LabValue numeric_inverted_variance_lab(const ModelParams& p, double t, const Truncation& tr) {
  Truncation loose = tr;
  loose.rel_tol = fd_tolerance(tr);
  const ConvergeOutcome o =
      try_converge(loose, [&](int n) { return lab_inverted_variance(p, {t}, n).front(); });
  return {o.value, o.n_used, o.converged};
}

LabValue lab_gamma_slope(double g, double eta, double omega, double h, const Truncation& tr) {
  if (!(h > 0.0 && h < 1.0)) throw DomainError("lab_gamma_slope: step must lie in (0, 1)");
  auto at = [&](double gamma, int n) {
    const ModelParams p = from_g_gamma(g, gamma, omega, eta);
    const double t = tau_k(delta_g(g, gamma), omega, 1);
    return lab_inverted_variance(p, {t}, n).front();
  };
  Truncation loose = tr;
  loose.rel_tol = fd_tolerance(tr);
  const ConvergeOutcome o =
      try_converge(loose, [&](int n) { return (at(h, n) - at(-h, n)) / (2.0 * h); });
  return {o.value, o.n_used, o.converged};
}

OptimalRatioConfig::OptimalRatioConfig() {
  for (int i = 0; i <= 80; ++i) gamma.push_back(-0.5 + i / 80.0);
}

OptimalRatio optimal_ratio(double g, double eta, const OptimalRatioConfig& cfg) {
  require_unit_interval(g, "optimal_ratio");
  if (cfg.gamma.size() < 3) throw DomainError("optimal_ratio: gamma grid needs at least 3 points");
  if (cfg.t_samples < 1 || !(cfg.t_hi >= cfg.t_lo)) throw DomainError("optimal_ratio: empty t window");

  const std::size_t ng = cfg.gamma.size();
  const int nt = cfg.t_samples;
  auto window = [&](double gamma) {
    const double tau = tau_k(delta_g(g, gamma), cfg.omega, 1);
    std::vector<double> ts;
    for (int j = 0; j < nt; ++j) {
      const double f = nt == 1 ? cfg.t_hi : cfg.t_lo + (cfg.t_hi - cfg.t_lo) * j / (nt - 1);
      ts.push_back(f * tau);
    }
    return ts;
  };

  Truncation loose = cfg.truncation;
  loose.rel_tol = fd_tolerance(cfg.truncation);
  const ConvergeVectorOutcome out = try_converge_values(loose, [&](int n) {
    std::vector<double> all;
    all.reserve(ng * nt);
    for (double gamma : cfg.gamma) {
      const std::vector<double> v =
          lab_inverted_variance(from_g_gamma(g, gamma, cfg.omega, eta), window(gamma), n);
      all.insert(all.end(), v.begin(), v.end());
    }
    return all;
  });

  OptimalRatio r;
  r.g = g;
  r.eta = eta;
  r.n_used = out.n_used;
  r.converged = out.converged;
  std::vector<int> best_t(ng);
  for (std::size_t i = 0; i < ng; ++i) {
    const auto first = out.values.begin() + static_cast<std::ptrdiff_t>(i * nt);
    const auto it = std::max_element(first, first + nt);
    r.profile.push_back(*it);
    best_t[i] = static_cast<int>(it - first);
  }
  const std::size_t k =
      static_cast<std::size_t>(std::max_element(r.profile.begin(), r.profile.end()) - r.profile.begin());
  r.inv_var_max = r.profile[k];
  r.gamma_star = cfg.gamma[k];
  r.at_edge = k == 0 || k + 1 == ng;
  if (!r.at_edge) {
    const double ym = r.profile[k - 1], y0 = r.profile[k], yp = r.profile[k + 1];
    const double curv = ym - 2.0 * y0 + yp;
    const double h = 0.5 * (cfg.gamma[k + 1] - cfg.gamma[k - 1]);
    if (curv < 0.0) r.gamma_star += h * 0.5 * (ym - yp) / curv;
  }
  r.ratio_star = ratio_from_gamma(r.gamma_star);
  r.t_star_over_tau = window(cfg.gamma[k])[best_t[k]] / tau_k(delta_g(g, cfg.gamma[k]), cfg.omega, 1);
  return r;
}

std::vector<ScanRow> optimal_ratio_scan(const std::vector<double>& g_grid,
                                        const std::vector<double>& eta_grid,
                                        const OptimalRatioConfig& cfg, int workers) {
  std::vector<std::pair<double, double>> cells;
  for (double eta : eta_grid)
    for (double g : g_grid) cells.emplace_back(g, eta);
  return parallel_map<ScanRow>(cells.size(), workers, [&](std::size_t i) {
    const auto [g, eta] = cells[i];
    const OptimalRatio r =
        with_context("finite-freq cell g=" + format_double(g) + ", eta=" + format_double(eta),
                     [&] { return optimal_ratio(g, eta, cfg); });
    ScanRow row;
    row.input("g", r.g);
    row.input("eta", r.eta);
    row.output("gamma_star", r.gamma_star);
    row.output("ratio_star", r.ratio_star);
    row.output("t_star_over_tau", r.t_star_over_tau);
    row.output("inv_var_max", r.inv_var_max);
    row.n_used = r.n_used;
    row.converged = r.converged;
    if (!r.converged) row.warn("inverted variance not converged at n_max");
    if (r.at_edge) row.warn("gamma_star at the edge of the gamma grid");
    return row;
  });
}

}  // namespace aqrm
