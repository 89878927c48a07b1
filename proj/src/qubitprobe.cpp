#include "aqrm/qubitprobe.hpp"

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <map>
#include <numbers>

#include "aqrm/qfi.hpp"

namespace aqrm {

namespace {

constexpr Complex kI{0.0, 1.0};

DerivedParams effective_params(const ModelParams& p) {
  validate(p);
  if (p.lambda1 + p.lambda2 == 0.0) {
    DerivedParams d;
    d.eta = p.Omega / p.omega;
    d.xi = -1.0;
    d.mu = 1.0;
    d.delta_g = 4.0;
    return d;
  }
  return derive(p);
}

// Both branches of the probe after time t, zero-point phases included.
struct Branches {
  Eigen::VectorXcd up;
  Eigen::VectorXcd down;
  Eigen::VectorXcd down_p2;  // u_down P^2 phi, filled on request
};

Branches evolve_branches(const DerivedParams& d, double omega, const Ket& phi, double t,
                         bool with_p2) {
  const int n = static_cast<int>(phi.dim());
  const EffectiveHamiltonian hd = hamiltonian_np_down(d, omega, n);
  const EffectiveHamiltonian hu = hamiltonian_np_up(d, omega, n);
  const std::string ctx = "qubit probe g=" + std::to_string(d.g);
  const Propagator pd(hd.op, ctx);
  const Propagator pu(hu.op, ctx);
  const Complex phase_d = std::exp(-kI * (hd.zero_point_shift * t));
  const Complex phase_u = std::exp(-kI * (hu.zero_point_shift * t));
  Branches b;
  b.down = phase_d * pd.evolve(phi, t).amplitudes();
  b.up = phase_u * pu.evolve(phi, t).amplitudes();
  if (with_p2) {
    const Eigen::VectorXcd p2phi = quad_p2(n).matrix() * phi.amplitudes();
    const double nrm = p2phi.norm();
    if (nrm > 0.0) {
      const Ket unit(p2phi / nrm, Basis::field_only);
      b.down_p2 = phase_d * nrm * pd.evolve(unit, t).amplitudes();
    } else {
      b.down_p2 = Eigen::VectorXcd::Zero(n);
    }
  }
  return b;
}

}  // namespace

void validate(const QubitSuperposition& q) {
  if (std::abs(std::norm(q.c_up) + std::norm(q.c_down) - 1.0) > 1e-12)
    throw DomainError("qubit superposition is not normalized");
}

ProbeState ProbeState::parse(const std::string& tag) {
  ProbeState s;
  if (tag == "vacuum") {
    s.kind = Kind::vacuum;
  } else if (tag == "plus") {
    s.kind = Kind::plus;
  } else if (tag == "coherent") {
    s.kind = Kind::coherent;
  } else if (tag.rfind("coherent:", 0) == 0) {
    s.kind = Kind::coherent;
    try {
      s.alpha = std::stod(tag.substr(9));
    } catch (const std::exception&) {
      throw DomainError("bad coherent amplitude in probe state '" + tag + "'");
    }
  } else {
    throw DomainError("unknown probe state '" + tag + "' (vacuum, plus, coherent[:alpha])");
  }
  return s;
}

std::string ProbeState::tag() const {
  switch (kind) {
    case Kind::vacuum: return "vacuum";
    case Kind::plus: return "plus";
    case Kind::coherent: return "coherent:" + format_double(alpha.real());
  }
  return "?";
}

Ket ProbeState::at(int n) const {
  switch (kind) {
    case Kind::vacuum: return fock_ket(0, n);
    case Kind::plus: {
      Eigen::VectorXcd v = Eigen::VectorXcd::Zero(n);
      v(0) = 1.0;
      v(1) = 1.0;
      return Ket::normalized(v, Basis::field_only);
    }
    case Kind::coherent: return coherent_ket(alpha, n);
  }
  throw DomainError("unknown probe state");
}

SqueezeParams squeeze_parameters(const ModelParams& p) {
  validate(p);
  const double wW = p.omega * p.Omega;
  const double diff2 = (p.lambda1 - p.lambda2) * (p.lambda1 - p.lambda2);
  const double prod4 = 4.0 * p.lambda1 * p.lambda2;
  const double arg_down = 1.0 - prod4 / (wW - diff2);
  const double arg_up = 1.0 + prod4 / (wW + diff2);
  if (!(wW - diff2 > 0.0) || !(arg_down > 0.0))
    throw DomainError("squeeze_parameters: log argument <= 0, outside the normal phase");
  return {-0.25 * std::log(arg_down), -0.25 * std::log(arg_up)};
}

Complex loschmidt_amplitude(const ModelParams& p, const Ket& phi, double t) {
  if (phi.basis() != Basis::field_only) throw BasisMismatchError("loschmidt_amplitude expects a field ket");
  const DerivedParams d = effective_params(p);
  const Branches b = evolve_branches(d, p.omega, phi, t, false);
  return b.up.dot(b.down);
}

SigmaStats sigma_x_statistics(const QubitSuperposition& q, const ModelParams& p, const Ket& phi,
                              double t) {
  validate(q);
  const Complex G = loschmidt_amplitude(p, phi, t);
  SigmaStats s;
  s.mean = 2.0 * (std::conj(q.c_up) * q.c_down * G).real();
  s.variance = 1.0 - s.mean * s.mean;
  return s;
}

double loschmidt_l(double g, double gamma) {
  const double g2 = g * g;
  const double gm2g2 = gamma * gamma * g2;
  return std::sqrt((1.0 + g2) * (1.0 + gm2g2) / ((1.0 - g2) * (1.0 - gm2g2)));
}

double loschmidt_frac(double g, double gamma) {
  const double l = loschmidt_l(g, gamma);
  return l - std::floor(l);
}

std::vector<WorkingPoint> find_working_points(double gamma, double g_lo, double g_hi, int count,
                                              double omega) {
  if (!(g_lo > 0.0) || !(g_hi < 1.0) || !(g_lo < g_hi))
    throw DomainError("find_working_points: range must lie inside (0, 1)");
  if (std::abs(gamma) > 1.0) throw DomainError("find_working_points: |gamma| > 1");
  std::vector<WorkingPoint> out;
  int m = static_cast<int>(std::floor(loschmidt_l(g_lo, gamma) - 0.5)) + 1;
  while (static_cast<int>(out.size()) < count && loschmidt_l(g_hi, gamma) > m + 0.5) {
    const double target = m + 0.5;
    auto f = [&](double g) { return loschmidt_l(g, gamma) - target; };
    std::uintmax_t iters = 200;
    const auto [a, b] = boost::math::tools::toms748_solve(
        f, g_lo, g_hi, boost::math::tools::eps_tolerance<double>(), iters);
    // Keep the endpoint whose L is nearer the half-integer.
    const double g_w = std::abs(f(a)) <= std::abs(f(b)) ? a : b;
    WorkingPoint wp;
    wp.g_w = g_w;
    wp.branch = m;
    wp.tau = 2.0 * tau_k(delta_g(g_w, gamma), omega, 1);
    out.push_back(wp);
    ++m;
  }
  return out;
}

SigmaInversion inverted_variance_sigma(const QubitSuperposition& q, const ModelParams& p,
                                       const ProbeState& phi, const WorkingPoint& wp,
                                       const Truncation& tr) {
  validate(q);
  const DerivedParams base = derive(p);
  const double gamma = base.gamma;
  const double omega = p.omega;
  const double eta = base.eta;
  const double g_w = wp.g_w;
  const double t = wp.tau;
  // The state varies on a g scale of about Delta^{3/2}.
  const double step = 1e-5 * g_w * std::min(1.0, std::pow(delta_g(g_w, gamma), 1.5));
  const Complex weight = std::conj(q.c_up) * q.c_down;

  SigmaInversion res;
  auto evaluate = [&](int n) {
    const Ket start = phi.at(n);
    std::map<double, Branches> memo;
    auto branches = [&](double g) -> const Branches& {
      auto it = memo.find(g);
      if (it == memo.end())
        it = memo.emplace(g, evolve_branches(derive_g_gamma(g, gamma, omega, eta), omega, start, t,
                                             g == g_w))
                 .first;
      return it->second;
    };
    auto mean_at = [&](double g) {
      const Branches& b = branches(g);
      return 2.0 * (weight * b.up.dot(b.down)).real();
    };
    auto joint = [&](double g) {
      const Branches& b = branches(g);
      Eigen::VectorXcd v(2 * n);
      v.head(n) = q.c_up * b.up;
      v.tail(n) = q.c_down * b.down;
      return Ket::normalized(v, Basis::qubit_field);
    };

    const double d1 = (mean_at(g_w + step) - mean_at(g_w - step)) / (2.0 * step);
    const double d2 = (mean_at(g_w + step / 2) - mean_at(g_w - step / 2)) / step;
    double slope = d2;
    if (std::abs(d1 - d2) > 1e-7 * std::max(std::abs(d2), 1e-12)) slope = (4.0 * d2 - d1) / 3.0;

    const Branches& mid = branches(g_w);
    const Complex G = mid.up.dot(mid.down);
    const double upsilon = mid.up.dot(mid.down_p2).imag();
    const double qfi = qfi_state(joint, g_w, step).value;
    return std::vector<std::vector<double>>{{G.real(), G.imag(), upsilon}, {slope}, {qfi}};
  };

  const double fd_tol = fd_tolerance(tr);
  const ConvergeVectorOutcome out = try_converge_blocks(tr, {tr.rel_tol, fd_tol, fd_tol}, evaluate);
  const auto& v = out.values;
  const Complex G(v[0], v[1]);
  res.mean_sigma_x = 2.0 * (weight * G).real();
  res.variance = 1.0 - res.mean_sigma_x * res.mean_sigma_x;
  res.upsilon = v[2];
  res.qfi = v[4];
  res.n_used = out.n_used;
  res.converged = out.converged;
  if (!out.converged) res.warnings.push_back("qubit-probe observables not converged at n_max");
  if (res.variance >= 1e-12)
    res.inv_var_fd = v[3] * v[3] / res.variance;
  else
    res.warnings.push_back("Var[sigma_x] below 1e-12");

  const DerivedParams d = derive_g_gamma(g_w, gamma, omega, eta);
  const double D = d.delta_g;
  res.inv_var_appendix_c = 64.0 * std::numbers::pi * std::numbers::pi * g_w * g_w * d.xi * d.xi *
                           d.mu * d.mu * res.upsilon * res.upsilon / (D * D * D);
  if (d.xi == 0.0) res.warnings.push_back("outside_approximation: xi = 0 at |gamma| = 1");
  return res;
}

std::vector<double> upper_branch_weights(const ModelParams& p, const Ket& phi, int count) {
  const SqueezeParams r = squeeze_parameters(p);
  const int n = static_cast<int>(phi.dim());
  if (count > n) throw DomainError("upper_branch_weights: count exceeds the cutoff");
  const Eigen::VectorXcd c = squeeze(r.r_up, n).matrix().adjoint() * phi.amplitudes();
  std::vector<double> w(count);
  for (int m = 0; m < count; ++m) w[m] = std::norm(c(m));
  return w;
}

std::vector<ScanRow> scan_fig2(const QubitProbeScanConfig& cfg, int workers) {
  validate(cfg.qubit);
  struct Cell {
    double ratio;
    WorkingPoint wp;
    ProbeState state;
  };
  std::vector<Cell> cells;
  for (double ratio : cfg.ratio) {
    const double gamma = gamma_from_ratio(ratio);
    for (const WorkingPoint& wp : find_working_points(gamma, cfg.g_min, cfg.g_max, cfg.max_points, cfg.omega))
      for (const ProbeState& s : cfg.states) cells.push_back({ratio, wp, s});
  }
  return parallel_map<ScanRow>(cells.size(), workers, [&](std::size_t i) {
    const Cell& c = cells[i];
    const double gamma = gamma_from_ratio(c.ratio);
    const ModelParams p = from_g_gamma(c.wp.g_w, gamma, cfg.omega, cfg.eta);
    const SigmaInversion r = with_context(
        "qubit-probe cell ratio=" + format_double(c.ratio) + ", g_w=" + format_double(c.wp.g_w) +
            ", state=" + c.state.tag(),
        [&] { return inverted_variance_sigma(cfg.qubit, p, c.state, c.wp, cfg.truncation); });

    ScanRow row;
    row.input("ratio_l1_l2", c.ratio);
    row.input("branch", c.wp.branch);
    row.input("g_w", c.wp.g_w);
    row.input("delta_g", delta_g(c.wp.g_w, gamma));
    row.input("tau_omega", c.wp.tau * cfg.omega);
    row.output("mean_sigma_x", r.mean_sigma_x);
    row.output("inv_var_fd", r.inv_var_fd, "Var[sigma_x] below 1e-12");
    row.output("inv_var_appendix_c", r.inv_var_appendix_c);
    row.output("upsilon", r.upsilon);
    row.output_text("initial_state_tag", c.state.tag());
    row.output("qfi", r.qfi);
    row.n_used = r.n_used;
    row.converged = r.converged;
    for (const auto& w : r.warnings)
      if (w.rfind("Var[sigma_x]", 0) != 0) row.warn(w);
    if (std::abs(r.mean_sigma_x) >= cfg.sigma_x_threshold)
      row.warn("|<sigma_x>| = " + format_double(std::abs(r.mean_sigma_x)) + " exceeds threshold " +
               format_double(cfg.sigma_x_threshold));
    return row;
  });
}

}  // namespace aqrm
