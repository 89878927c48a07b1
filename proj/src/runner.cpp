#include "aqrm/runner.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <fstream>
#include <iostream>

#include "aqrm/finitefreq.hpp"
#include "aqrm/homodyne.hpp"
#include "aqrm/qfi.hpp"
#include "aqrm/qubitprobe.hpp"
#include "aqrm/ramsey.hpp"
#include "aqrm/validate.hpp"

namespace aqrm {

using json = nlohmann::ordered_json;

namespace {

struct Coupling {
  double g;
  double gamma;
};

bool has(const RunConfig& cfg, const std::string& grid_key) {
  return cfg.tree.contains("grid") && cfg.tree["grid"].contains(grid_key);
}

std::optional<ModelParams> lab_model(const RunConfig& cfg) {
  const json& m = cfg.tree["model"];
  if (!(m.contains("lambda1") || m.contains("lambda2") || m.contains("Omega"))) return std::nullopt;
  ModelParams p;
  p.omega = number_at(cfg, "model.omega");
  p.Omega = number_at(cfg, "model.Omega");
  p.lambda1 = number_at(cfg, "model.lambda1");
  p.lambda2 = number_at(cfg, "model.lambda2");
  return p;
}

std::vector<double> gammas(const RunConfig& cfg) {
  if (has(cfg, "gamma") && has(cfg, "ratio")) throw ConfigError("give grid.gamma or grid.ratio, not both");
  if (has(cfg, "ratio")) {
    std::vector<double> out;
    for (double r : grid(cfg, "ratio")) {
      if (!(r > 0.0)) throw ConfigError("grid.ratio must be positive");
      out.push_back(gamma_from_ratio(r));
    }
    return out;
  }
  return grid(cfg, "gamma");
}

std::vector<double> ratios(const RunConfig& cfg) {
  if (has(cfg, "gamma") && has(cfg, "ratio")) throw ConfigError("give grid.gamma or grid.ratio, not both");
  if (has(cfg, "gamma")) {
    std::vector<double> out;
    for (double gm : grid(cfg, "gamma")) {
      if (!(std::abs(gm) < 1.0)) throw ConfigError("grid.gamma must lie in (-1, 1) for a finite ratio");
      out.push_back(ratio_from_gamma(gm));
    }
    return out;
  }
  return grid(cfg, "ratio");
}

void check_normal_phase(double g, double gamma) {
  if (std::abs(gamma) > 1.0)
    throw DomainError("cell g=" + format_double(g) + ", gamma=" + format_double(gamma) + ": |gamma| > 1");
  const double dg = delta_g(g, gamma);
  if (!(dg > 0.0) || !(g > 0.0))
    throw DomainError("cell g=" + format_double(g) + ", gamma=" + format_double(gamma) +
                      ": Delta_g <= 0 (normal-phase formulas need 0 < g < 1)");
}

}  // namespace

std::vector<ScanRow> scan_qfi(const std::vector<double>& g, const std::vector<double>& gamma,
                              const std::vector<double>& tau_k_list, const std::vector<double>& omega_t,
                              double omega, const Truncation& tr, int workers) {
  struct Cell {
    double g, gamma, t;
  };
  std::vector<Cell> cells;
  for (double gm : gamma)
    for (double gv : g) {
      check_normal_phase(gv, gm);
      const double period = tau_k(delta_g(gv, gm), omega, 1);
      for (double k : tau_k_list) cells.push_back({gv, gm, k * period});
      for (double wt : omega_t) cells.push_back({gv, gm, wt / omega});
    }
  return parallel_map<ScanRow>(cells.size(), workers, [&](std::size_t i) {
    const Cell c = cells[i];
    return with_context("qfi cell g=" + format_double(c.g) + ", gamma=" + format_double(c.gamma) +
                            ", omega_t=" + format_double(omega * c.t),
                        [&] {
                          const DerivedParams d = derive_g_gamma(c.g, c.gamma, omega);
                          const double alpha = -c.g * c.g;
                          const ConvergeVectorOutcome out = try_converge_values(tr, [&](int n) {
                            const Ket psi = homodyne_initial_state(n);
                            const GeneratorSet gs = build_generators(d, omega, n);
                            return std::vector<double>{var_p2(psi),
                                                       fisher_g_from_alpha(qfi_exact_generator(gs, c.t, psi).value, c.g)};
                          });
                          Truncation fd_tr = tr;
                          fd_tr.rel_tol = fd_tolerance(tr);
                          const ConvergeOutcome fd_out = try_converge(fd_tr, [&](int n) {
                            return fisher_g_from_alpha(
                                qfi_finite_difference(quadrature_family(c.gamma, omega, n), alpha, c.t,
                                                      homodyne_initial_state(n), default_step(alpha))
                                    .value,
                                c.g);
                          });
                          const double fd = fd_out.value;
                          const double analytic = qfi_analytic(d, omega, c.t, out.values[0]).value;
                          ScanRow row;
                          row.input("g", c.g);
                          row.input("gamma", c.gamma);
                          row.input("omega_t", omega * c.t);
                          row.output("var_p2", out.values[0]);
                          row.output("qfi_analytic", analytic);
                          row.output("qfi_exact", out.values[1]);
                          row.output("qfi_fd", fd);
                          row.output("eq7_ratio", analytic / fd);
                          row.n_used = std::max(out.n_used, fd_out.n_used);
                          row.converged = out.converged && fd_out.converged;
                          if (!out.converged) row.warn("exact-generator qfi not converged at n_max");
                          if (!fd_out.converged) row.warn("finite-difference qfi not converged at n_max");
                          return row;
                        });
  });
}

std::vector<ScanRow> run_scan(const RunConfig& cfg) {
  const double omega = number_at(cfg, "model.omega");
  const auto lab = lab_model(cfg);
  const std::string& cmd = cfg.command;

  if (cmd == "qfi" || cmd == "homodyne") {
    std::vector<double> g, gm;
    if (lab) {
      const DerivedParams d = derive(*lab);
      g = {d.g};
      gm = {d.gamma};
    } else {
      g = grid(cfg, "g");
      gm = gammas(cfg);
    }
    for (double gamma : gm)
      for (double gv : g) check_normal_phase(gv, gamma);
    if (cmd == "qfi") {
      if (has(cfg, "tau_k") && has(cfg, "omega_t"))
        throw ConfigError("give grid.tau_k or grid.omega_t, not both");
      std::vector<double> tk, wt;
      if (has(cfg, "omega_t"))
        wt = grid(cfg, "omega_t");
      else
        tk = grid(cfg, "tau_k");
      return scan_qfi(g, gm, tk, wt, omega, cfg.truncation, cfg.workers);
    }
    HomodyneScanConfig h;
    h.g = g;
    if (!lab && has(cfg, "ratio"))
      h.ratio = grid(cfg, "ratio");
    else
      for (double gamma : gm) {
        if (!(std::abs(gamma) < 1.0)) throw ConfigError("homodyne needs |gamma| < 1 for a finite ratio");
        h.ratio.push_back(ratio_from_gamma(gamma));
      }
    h.omega = omega;
    h.truncation = cfg.truncation;
    return scan_fig1(h, cfg.workers);
  }

  if (cmd == "qubit-probe") {
    if (lab) throw ConfigError("qubit-probe scans working points; give grid.ratio instead of couplings");
    QubitProbeScanConfig q;
    q.ratio = ratios(cfg);
    q.g_min = number_at(cfg, "qubit_probe.g_min");
    q.g_max = number_at(cfg, "qubit_probe.g_max");
    q.max_points = static_cast<int>(number_at(cfg, "qubit_probe.max_points"));
    q.sigma_x_threshold = number_at(cfg, "qubit_probe.sigma_x_threshold");
    q.states.clear();
    const json& states = cfg.tree["qubit_probe"]["states"];
    if (!states.is_array() || states.empty()) throw ConfigError("qubit_probe.states must be a non-empty list");
    for (const auto& s : states) {
      if (!s.is_string()) throw ConfigError("qubit_probe.states entries must be strings");
      q.states.push_back(ProbeState::parse(s.get<std::string>()));
    }
    q.omega = omega;
    q.eta = number_at(cfg, "model.eta");
    q.truncation = cfg.truncation;
    if (!(q.g_min > 0.0 && q.g_max < 1.0 && q.g_min < q.g_max))
      throw ConfigError("qubit_probe.g_min/g_max must satisfy 0 < g_min < g_max < 1");
    return scan_fig2(q, cfg.workers);
  }

  if (cmd == "finite-freq") {
    std::vector<double> g, eta;
    if (lab) {
      const DerivedParams d = derive(*lab);
      g = {d.g};
      eta = {d.eta};
    } else {
      g = grid(cfg, "g");
      eta = grid(cfg, "eta");
    }
    for (double gv : g)
      if (!(gv > 0.0 && gv < 1.0)) throw DomainError("finite-freq cell g=" + format_double(gv) + ": Delta_g <= 0");
    for (double e : eta)
      if (!(e > 0.0)) throw ConfigError("grid.eta must be positive");
    OptimalRatioConfig o;
    o.gamma = grid(cfg, "gamma");
    const json& win = cfg.tree["finite_freq"]["t_window"];
    if (!win.is_array() || win.size() != 2) throw ConfigError("finite_freq.t_window must be [lo, hi]");
    o.t_lo = win[0].get<double>();
    o.t_hi = win[1].get<double>();
    o.t_samples = static_cast<int>(number_at(cfg, "finite_freq.t_samples"));
    o.omega = omega;
    o.truncation = cfg.truncation;
    return optimal_ratio_scan(g, eta, o, cfg.workers);
  }

  if (cmd == "ramsey") return ramsey_scan(grid(cfg, "theta"));

  throw ConfigError("command '" + cmd + "' does not produce scan rows");
}

namespace {

json sidecar(const RunConfig& cfg, const std::vector<ScanRow>& rows) {
  json meta;
  meta["command"] = cfg.command;
  meta["config"] = cfg.tree;
  meta["versions"] = {{"aqrm", kVersion},
                      {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                                    "." + std::to_string(EIGEN_MINOR_VERSION)},
                      {"compiler", __VERSION__}};
  meta["rows"] = rows.size();
  json unconverged = json::array();
  json warnings = json::array();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].has_truncation && !rows[i].converged) unconverged.push_back(i);
    if (!rows[i].warnings.empty()) warnings.push_back({{"row", i}, {"messages", rows[i].warnings}});
  }
  meta["unconverged_rows"] = unconverged;
  meta["warnings"] = warnings;
  return meta;
}

}  // namespace

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.command == "validate") {
    const bool quick = cfg.tree.contains("validate") && cfg.tree["validate"].value("quick", false);
    return validate_main(quick, out);
  }
  std::vector<ScanRow> rows;
  try {
    rows = run_scan(cfg);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const DomainError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const Error& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  }

  auto emit = [&](std::ostream& os) {
    if (cfg.format == OutputFormat::csv)
      write_csv(os, rows);
    else
      write_jsonl(os, rows);
  };
  if (cfg.out_path.empty() || cfg.out_path == "-") {
    emit(out);
  } else {
    std::ofstream file(cfg.out_path, std::ios::binary);
    if (!file) {
      err << "config error: cannot write " << cfg.out_path << '\n';
      return kConfigError;
    }
    emit(file);
    std::ofstream meta(cfg.out_path + ".meta.json", std::ios::binary);
    meta << sidecar(cfg, rows).dump(2) << '\n';
  }

  std::size_t unconverged = 0;
  for (const auto& r : rows)
    if (r.has_truncation && !r.converged) ++unconverged;
  if (unconverged > 0) {
    err << unconverged << " of " << rows.size() << " rows did not converge (data written)\n";
    return kUnconverged;
  }
  return kOk;
}

}  // namespace aqrm
