#include "aqrm/fock.hpp"

#include <algorithm>
#include <cmath>

namespace aqrm {

namespace {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;

constexpr Complex kI{0.0, 1.0};

MatrixXcd ladder_down(int m) {
  MatrixXcd a = MatrixXcd::Zero(m, m);
  for (int k = 1; k < m; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
  return a;
}

MatrixXcd kron(const MatrixXcd& q, const MatrixXcd& f) {
  MatrixXcd out(q.rows() * f.rows(), q.cols() * f.cols());
  for (Eigen::Index i = 0; i < q.rows(); ++i)
    for (Eigen::Index j = 0; j < q.cols(); ++j)
      out.block(i * f.rows(), j * f.cols(), f.rows(), f.cols()) = q(i, j) * f;
  return out;
}

void require_cutoff(int n, int min, const char* what) {
  if (n < min)
    throw DomainError(std::string(what) + ": cutoff " + std::to_string(n) + " below minimum " +
                      std::to_string(min));
}

double upper_population(const MatrixXcd& padded, int n, int guard) {
  const Eigen::Index from = std::max(0, n - guard);
  return padded.col(0).segment(from, padded.rows() - from).squaredNorm();
}

}  // namespace

const char* to_string(Basis b) {
  return b == Basis::field_only ? "field_only" : "qubit_field";
}

void validate(const Truncation& tr) {
  if (tr.n_start < 4) throw DomainError("truncation n_start must be >= 4");
  if (tr.n_max < tr.n_start) throw DomainError("truncation n_max must be >= n_start");
  if (!(tr.rel_tol > 0.0)) throw DomainError("truncation rel_tol must be positive");
}

// ---------------------------------------------------------------------------

Operator annihilation(int n) {
  require_cutoff(n, 2, "annihilation");
  return Operator(ladder_down(n), Basis::field_only);
}

Operator creation(int n) {
  require_cutoff(n, 2, "creation");
  return Operator(ladder_down(n).adjoint(), Basis::field_only);
}

Operator number_op(int n) {
  require_cutoff(n, 2, "number_op");
  MatrixXcd m = MatrixXcd::Zero(n, n);
  for (int k = 0; k < n; ++k) m(k, k) = static_cast<double>(k);
  return Operator(m, Basis::field_only);
}

Operator quad_x(int n) {
  const MatrixXcd a = ladder_down(n);
  return Operator((a + a.adjoint()) / std::sqrt(2.0), Basis::field_only);
}

Operator quad_p(int n) {
  const MatrixXcd a = ladder_down(n);
  return Operator(kI * (a.adjoint() - a) / std::sqrt(2.0), Basis::field_only);
}

Operator field_identity(int n) { return Operator::identity(n, Basis::field_only); }

Operator project_polynomial(int n, int pad,
                            const std::function<MatrixXcd(const MatrixXcd&, const MatrixXcd&)>& build) {
  require_cutoff(n, 2, "project_polynomial");
  const int m = n + pad;
  const MatrixXcd a = ladder_down(m);
  const MatrixXcd ad = a.adjoint();
  const MatrixXcd full = build(a, ad);
  return Operator(full.topLeftCorner(n, n), Basis::field_only);
}

Operator quad_x2(int n) {
  return project_polynomial(n, 2, [](const MatrixXcd& a, const MatrixXcd& ad) -> MatrixXcd {
    const MatrixXcd x = (a + ad) / std::sqrt(2.0);
    return x * x;
  });
}

Operator quad_p2(int n) {
  return project_polynomial(n, 2, [](const MatrixXcd& a, const MatrixXcd& ad) -> MatrixXcd {
    const MatrixXcd p = kI * (ad - a) / std::sqrt(2.0);
    return p * p;
  });
}

Operator quad_xp_sym(int n) {
  return project_polynomial(n, 2, [](const MatrixXcd& a, const MatrixXcd& ad) -> MatrixXcd {
    const MatrixXcd x = (a + ad) / std::sqrt(2.0);
    const MatrixXcd p = kI * (ad - a) / std::sqrt(2.0);
    return x * p + p * x;
  });
}

Operator squeeze(double r, int n, double leak_tol) {
  require_cutoff(n, 2, "squeeze");
  if (std::abs(r) > 3.0) throw DomainError("squeeze: |r| > 3 is outside the supported range");
  const int m = 2 * n + 8;
  const MatrixXcd a = ladder_down(m);
  const MatrixXcd ad = a.adjoint();
  const MatrixXcd gen = (r / 2.0) * (ad * ad - a * a);
  const Operator hermitian(kI * gen, Basis::field_only);
  const MatrixXcd full = Propagator(hermitian, "squeeze").evolution_operator(1.0).matrix();
  const double leak = upper_population(full, n, 4);
  if (leak > leak_tol)
    throw TruncationError("squeeze(r=" + std::to_string(r) + "): population " +
                          std::to_string(leak) + " above level n-4 for n=" + std::to_string(n));
  return Operator(full.topLeftCorner(n, n), Basis::field_only);
}

Operator displacement(Complex alpha, int n, double leak_tol) {
  require_cutoff(n, 2, "displacement");
  const int m = 2 * n + 8;
  const MatrixXcd a = ladder_down(m);
  const MatrixXcd gen = alpha * a.adjoint() - std::conj(alpha) * a;
  const Operator hermitian(kI * gen, Basis::field_only);
  const MatrixXcd full = Propagator(hermitian, "displacement").evolution_operator(1.0).matrix();
  const double leak = upper_population(full, n, 4);
  if (leak > leak_tol)
    throw TruncationError("displacement: population " + std::to_string(leak) +
                          " above level n-4 for n=" + std::to_string(n));
  return Operator(full.topLeftCorner(n, n), Basis::field_only);
}

Operator embed_field(const Operator& field) {
  if (field.basis() != Basis::field_only) throw BasisMismatchError("embed_field expects a field operator");
  return Operator(kron(MatrixXcd::Identity(2, 2), field.matrix()), Basis::qubit_field);
}

namespace {
Operator qubit_op(const Eigen::Matrix2cd& q, int n) {
  return Operator(kron(q, MatrixXcd::Identity(n, n)), Basis::qubit_field);
}
}  // namespace

Operator sigma_z(int n) {
  Eigen::Matrix2cd q;
  q << 1, 0, 0, -1;
  return qubit_op(q, n);
}
Operator sigma_x(int n) {
  Eigen::Matrix2cd q;
  q << 0, 1, 1, 0;
  return qubit_op(q, n);
}
Operator sigma_plus(int n) {
  Eigen::Matrix2cd q;
  q << 0, 1, 0, 0;
  return qubit_op(q, n);
}
Operator sigma_minus(int n) {
  Eigen::Matrix2cd q;
  q << 0, 0, 1, 0;
  return qubit_op(q, n);
}

// ---------------------------------------------------------------------------

Ket fock_ket(int m, int n) {
  if (m < 0 || m >= n) throw DomainError("fock_ket: level outside the cutoff");
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(n);
  v(m) = 1.0;
  return Ket(v, Basis::field_only);
}

Ket homodyne_initial_state(int n) {
  require_cutoff(n, 2, "homodyne_initial_state");
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(n);
  v(0) = 1.0;
  v(1) = kI;
  return Ket::normalized(v, Basis::field_only);
}

Ket coherent_ket(Complex alpha, int n) {
  const Operator d = displacement(alpha, n);
  return Ket::normalized(d.matrix().col(0), Basis::field_only);
}

Ket product_state(Complex c_up, Complex c_down, const Ket& field) {
  if (field.basis() != Basis::field_only) throw BasisMismatchError("product_state expects a field ket");
  const Eigen::Index n = field.dim();
  Eigen::VectorXcd v(2 * n);
  v.head(n) = c_up * field.amplitudes();
  v.tail(n) = c_down * field.amplitudes();
  return Ket::normalized(v, Basis::qubit_field);
}

// ---------------------------------------------------------------------------

Operator hamiltonian_full(const ModelParams& p, int n) {
  validate(p);
  require_cutoff(n, 2, "hamiltonian_full");
  const MatrixXcd a = ladder_down(n);
  const MatrixXcd ad = a.adjoint();
  MatrixXcd num = MatrixXcd::Zero(n, n);
  for (int k = 0; k < n; ++k) num(k, k) = static_cast<double>(k);

  Eigen::Matrix2cd sz, sp, sm;
  sz << 1, 0, 0, -1;
  sp << 0, 1, 0, 0;
  sm << 0, 0, 1, 0;
  const MatrixXcd id2 = MatrixXcd::Identity(2, 2);
  const MatrixXcd idn = MatrixXcd::Identity(n, n);

  MatrixXcd h = p.omega * kron(id2, num) + (p.Omega / 2.0) * kron(sz, idn) +
                p.lambda1 * (kron(sp, a) + kron(sm, ad)) + p.lambda2 * (kron(sm, a) + kron(sp, ad));
  return Operator(h, Basis::qubit_field);
}

EffectiveHamiltonian hamiltonian_np_down(const DerivedParams& d, double omega, int n) {
  require_cutoff(n, 4, "hamiltonian_np_down");
  const double g2 = d.g * d.g;
  const double gm2 = d.gamma * d.gamma;
  // (l1^2 + l2^2)/Omega and l1 l2/Omega in terms of (g, gamma).
  const double sum_sq = g2 * omega * (1.0 + gm2) / 2.0;
  const double cross = g2 * omega * (1.0 - gm2) / 4.0;
  Operator op = project_polynomial(n, 2, [&](const MatrixXcd& a, const MatrixXcd& ad) -> MatrixXcd {
    return (omega - sum_sq) * (ad * a) - cross * (ad * ad + a * a);
  });
  EffectiveHamiltonian h{std::move(op)};
  const double l2_sq_over_Omega = g2 * omega * (1.0 - d.gamma) * (1.0 - d.gamma) / 4.0;
  h.constant = -l2_sq_over_Omega - d.eta * omega / 2.0;
  h.zero_point_shift = omega / 2.0 - sum_sq / 2.0;
  return h;
}

EffectiveHamiltonian hamiltonian_np_up(const DerivedParams& d, double omega, int n) {
  require_cutoff(n, 4, "hamiltonian_np_up");
  const double g2 = d.g * d.g;
  const double gm2 = d.gamma * d.gamma;
  const double sum_sq = g2 * omega * (1.0 + gm2) / 2.0;
  const double cross = g2 * omega * (1.0 - gm2) / 4.0;
  Operator op = project_polynomial(n, 2, [&](const MatrixXcd& a, const MatrixXcd& ad) -> MatrixXcd {
    return (omega + sum_sq) * (ad * a) + cross * (ad * ad + a * a);
  });
  EffectiveHamiltonian h{std::move(op)};
  // lambda1^2/Omega + Omega/2: the upper-branch mirror of the down constant.
  const double l1_sq_over_Omega = g2 * omega * (1.0 + d.gamma) * (1.0 + d.gamma) / 4.0;
  h.constant = l1_sq_over_Omega + d.eta * omega / 2.0;
  h.zero_point_shift = omega / 2.0 + sum_sq / 2.0;
  return h;
}

Operator hamiltonian_np_down_quadrature(double g, double gamma, double omega, int n) {
  require_cutoff(n, 4, "hamiltonian_np_down_quadrature");
  const double g2 = g * g;
  const double gm2 = gamma * gamma;
  return project_polynomial(n, 2, [&](const MatrixXcd& a, const MatrixXcd& ad) -> MatrixXcd {
    const MatrixXcd x = (a + ad) / std::sqrt(2.0);
    const MatrixXcd p = kI * (ad - a) / std::sqrt(2.0);
    const MatrixXcd x2 = x * x;
    const MatrixXcd p2 = p * p;
    return (omega / 2.0) * ((x2 + p2) - g2 * (x2 + gm2 * p2));
  });
}

namespace {

// The finite-frequency forms are real polynomials in (a, a^dag); build them in
// real arithmetic on a padded basis and crop.
Operator crop_real(const MatrixXd& full, int n) {
  return Operator(full.topLeftCorner(n, n).cast<Complex>(), Basis::field_only);
}

MatrixXd ladder_down_real(int m) {
  MatrixXd a = MatrixXd::Zero(m, m);
  for (int k = 1; k < m; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
  return a;
}

}  // namespace

Operator hamiltonian_np_finite_operator_form(const ModelParams& p, int n) {
  (void)derive(p);
  require_cutoff(n, 8, "hamiltonian_np_finite");
  const double l1 = p.lambda1;
  const double l2 = p.lambda2;
  const double W = p.Omega;
  const double w = p.omega;
  const MatrixXd a = ladder_down_real(n + 4);
  const MatrixXd ad = a.transpose();
  const MatrixXd num = ad * a;
  const MatrixXd down = (w - (l1 * l1 + l2 * l2) / W) * num - (l1 * l2 / W) * (ad * ad + a * a);
  const MatrixXd c = l1 * a + l2 * ad;
  const MatrixXd dd = l2 * a + l1 * ad;
  const MatrixXd dc = dd * c;
  const MatrixXd h = down + (dc * dc) / (W * W * W) - (w / (W * W)) * (l1 * l1 * num - l2 * l2 * (a * ad));
  return crop_real(h, n);
}

Operator hamiltonian_np_finite_quadrature_form(const ModelParams& p, int n) {
  const DerivedParams d = derive(p);
  require_cutoff(n, 8, "hamiltonian_np_finite");
  const double g2 = d.g * d.g;
  const double gm = d.gamma;
  const double w = p.omega;
  const double eta = d.eta;
  const double l1 = p.lambda1;
  const double l2 = p.lambda2;
  const double W = p.Omega;
  const MatrixXd a = ladder_down_real(n + 4);
  const MatrixXd ad = a.transpose();
  const MatrixXd x = (a + ad) / std::sqrt(2.0);
  const MatrixXd y = (ad - a) / std::sqrt(2.0);  // P = i y
  const MatrixXd x2 = x * x;
  const MatrixXd p2 = -(y * y);
  const MatrixXd id = MatrixXd::Identity(a.rows(), a.cols());
  const MatrixXd down = (w - (l1 * l1 + l2 * l2) / W) * (ad * a) - (l1 * l2 / W) * (ad * ad + a * a);
  const MatrixXd q = x2 + gm * gm * p2 - gm * id;
  const MatrixXd h = down + (g2 * g2 * w / (4.0 * eta)) * (q * q) - (g2 * w / (2.0 * eta)) * gm * (x2 + p2) +
                     (g2 * w * (1.0 + gm * gm) / (4.0 * eta)) * id;
  return crop_real(h, n);
}

EffectiveHamiltonian hamiltonian_np_finite(const ModelParams& p, int n) {
  Operator op = hamiltonian_np_finite_operator_form(p, n);
  const Operator quad = hamiltonian_np_finite_quadrature_form(p, n);
  const double scale = std::max(1.0, op.matrix().cwiseAbs().maxCoeff());
  const double diff = (op.matrix() - quad.matrix()).cwiseAbs().maxCoeff();
  if (diff > 1e-9 * scale)
    throw VerificationError("finite-frequency Hamiltonian: operator and quadrature forms differ by " +
                            std::to_string(diff));
  const DerivedParams d = derive(p);
  EffectiveHamiltonian h{std::move(op)};
  h.constant = -p.lambda2 * p.lambda2 / p.Omega - p.Omega / 2.0;
  h.zero_point_shift = p.omega / 2.0 - d.g * d.g * p.omega * (1.0 + d.gamma * d.gamma) / 4.0;
  return h;
}

// ---------------------------------------------------------------------------

Propagator::Propagator(const Operator& h, const std::string& context) : basis_(h.basis()) {
  if (h.hermiticity_residual() > 1e-10)
    throw NumericalError("Propagator: Hamiltonian is not Hermitian (residual " +
                         std::to_string(h.hermiticity_residual()) + ")" +
                         (context.empty() ? "" : " [" + context + "]"));
  if (h.is_real()) {
    const MatrixXd re = h.matrix().real();
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(re);
    if (es.info() != Eigen::Success)
      throw NumericalError("eigendecomposition failed" + (context.empty() ? "" : " [" + context + "]"));
    energies_ = es.eigenvalues();
    vectors_ = es.eigenvectors().cast<Complex>();
  } else {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(h.matrix());
    if (es.info() != Eigen::Success)
      throw NumericalError("eigendecomposition failed" + (context.empty() ? "" : " [" + context + "]"));
    energies_ = es.eigenvalues();
    vectors_ = es.eigenvectors();
  }
}

Ket Propagator::evolve(const Ket& psi, double t) const {
  if (psi.basis() != basis_ || psi.dim() != dim())
    throw BasisMismatchError("Propagator::evolve: ket does not match the Hamiltonian basis");
  Eigen::VectorXcd c = vectors_.adjoint() * psi.amplitudes();
  for (Eigen::Index k = 0; k < c.size(); ++k) c(k) *= std::exp(-kI * (energies_(k) * t));
  return Ket(vectors_ * c, basis_);
}

Operator Propagator::evolution_operator(double t) const {
  Eigen::VectorXcd phases(dim());
  for (Eigen::Index k = 0; k < dim(); ++k) phases(k) = std::exp(-kI * (energies_(k) * t));
  return Operator(vectors_ * phases.asDiagonal() * vectors_.adjoint(), basis_);
}

Ket evolve(const Operator& h, double t, const Ket& psi) { return Propagator(h).evolve(psi, t); }

Operator evolution_operator(const Operator& h, double t) {
  return Propagator(h).evolution_operator(t);
}

Complex expectation(const Operator& op, const Ket& psi) {
  if (op.basis() != psi.basis() || op.dim() != psi.dim())
    throw BasisMismatchError("expectation: operator and ket bases differ");
  return psi.amplitudes().dot(op.matrix() * psi.amplitudes());
}

double variance(const Operator& op, const Ket& psi) {
  if (op.basis() != psi.basis() || op.dim() != psi.dim())
    throw BasisMismatchError("variance: operator and ket bases differ");
  const Eigen::VectorXcd v = op.matrix() * psi.amplitudes();
  const Complex mean = psi.amplitudes().dot(v);
  // <op^2> = ||op psi||^2 for Hermitian op.
  return v.squaredNorm() - std::norm(mean);
}

Complex overlap(const Ket& bra, const Ket& ket) {
  if (bra.basis() != ket.basis() || bra.dim() != ket.dim())
    throw BasisMismatchError("overlap: kets live on different bases");
  return bra.amplitudes().dot(ket.amplitudes());
}

MatrixXcd interior(const MatrixXcd& m, Eigen::Index guard) {
  const Eigen::Index k = std::max<Eigen::Index>(0, m.rows() - guard);
  return m.topLeftCorner(k, k);
}

// ---------------------------------------------------------------------------

namespace {
bool agree(double v, double prev, double rel_tol) {
  const double diff = std::abs(v - prev);
  if (std::abs(v) < 1e-8) return diff <= 1e-12;
  return diff <= rel_tol * std::abs(v);
}
}  // namespace

ConvergeOutcome try_converge(const Truncation& tr, const std::function<double(int)>& f) {
  validate(tr);
  ConvergeOutcome out;
  int n = tr.n_start;
  double prev = f(n);
  out.value = prev;
  out.previous = prev;
  out.n_used = n;
  while (true) {
    const int next = std::min(2 * n, tr.n_max);
    if (next == n) return out;
    const double v = f(next);
    out.previous = prev;
    out.value = v;
    out.n_used = next;
    if (agree(v, prev, tr.rel_tol)) {
      out.converged = true;
      return out;
    }
    prev = v;
    n = next;
  }
}

Converged converge(const Truncation& tr, const std::function<double(int)>& f) {
  const ConvergeOutcome o = try_converge(tr, f);
  if (!o.converged)
    throw ConvergenceError("cutoff ceiling " + std::to_string(tr.n_max) +
                               " reached without convergence (last " + std::to_string(o.value) +
                               ", previous " + std::to_string(o.previous) + ")",
                           o.value, o.previous, o.n_used);
  return {o.value, o.n_used};
}

ConvergeVectorOutcome try_converge_blocks(
    const Truncation& tr, const std::vector<double>& rel_tols,
    const std::function<std::vector<std::vector<double>>(int)>& f) {
  validate(tr);
  auto flatten = [](const std::vector<std::vector<double>>& blocks) {
    std::vector<double> flat;
    for (const auto& b : blocks) flat.insert(flat.end(), b.begin(), b.end());
    return flat;
  };
  auto agree = [&](const std::vector<std::vector<double>>& prev, const std::vector<std::vector<double>>& v) {
    if (v.size() != prev.size() || v.size() != rel_tols.size()) return false;
    for (std::size_t b = 0; b < v.size(); ++b) {
      if (v[b].size() != prev[b].size()) return false;
      double scale = 0.0;
      double diff = 0.0;
      for (std::size_t k = 0; k < v[b].size(); ++k) {
        scale = std::max(scale, std::abs(v[b][k]));
        diff = std::max(diff, std::abs(v[b][k] - prev[b][k]));
      }
      if (!(scale < 1e-8 ? diff <= 1e-12 : diff <= rel_tols[b] * scale)) return false;
    }
    return true;
  };
  ConvergeVectorOutcome out;
  int n = tr.n_start;
  std::vector<std::vector<double>> prev = f(n);
  out.values = flatten(prev);
  out.n_used = n;
  while (true) {
    const int next = std::min(2 * n, tr.n_max);
    if (next == n) return out;
    std::vector<std::vector<double>> v = f(next);
    out.values = flatten(v);
    out.n_used = next;
    if (agree(prev, v)) {
      out.converged = true;
      return out;
    }
    prev = std::move(v);
    n = next;
  }
}

ConvergeVectorOutcome try_converge_values(const Truncation& tr,
                                          const std::function<std::vector<double>(int)>& f) {
  return try_converge_blocks(tr, {tr.rel_tol}, [&](int n) { return std::vector<std::vector<double>>{f(n)}; });
}

}  // namespace aqrm
