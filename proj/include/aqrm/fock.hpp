#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "aqrm/error.hpp"
#include "aqrm/model.hpp"

namespace aqrm {

enum class Basis { field_only, qubit_field };

const char* to_string(Basis b);

template <typename Scalar>
using CMatrix = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using CVector = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;

/// Dense square matrix on a truncated Fock (or qubit x Fock) basis.
///
/// Qubit-field operators use qubit-major ordering: index = q * n + m with
/// q = 0 for |up> and q = 1 for |down>.
template <typename Scalar>
class BasicOperator {
 public:
  using Complex = std::complex<Scalar>;
  using Matrix = CMatrix<Scalar>;

  BasicOperator(Matrix m, Basis basis) : m_(std::move(m)), basis_(basis) {
    if (m_.rows() != m_.cols()) throw BasisMismatchError("operator matrix must be square");
    if (basis_ == Basis::qubit_field && m_.rows() % 2 != 0)
      throw BasisMismatchError("qubit-field operator needs an even dimension");
  }

  static BasicOperator zero(Eigen::Index dim, Basis basis) {
    return BasicOperator(Matrix::Zero(dim, dim), basis);
  }
  static BasicOperator identity(Eigen::Index dim, Basis basis) {
    return BasicOperator(Matrix::Identity(dim, dim), basis);
  }

  Eigen::Index dim() const { return m_.rows(); }
  /// Fock cutoff n of the field factor.
  Eigen::Index cutoff() const { return basis_ == Basis::qubit_field ? dim() / 2 : dim(); }
  Basis basis() const { return basis_; }
  const Matrix& matrix() const { return m_; }
  Complex operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

  BasicOperator adjoint() const { return BasicOperator(m_.adjoint(), basis_); }

  /// max |M - M^dag| relative to max(1, max |M|).
  Scalar hermiticity_residual() const {
    const Scalar scale = std::max<Scalar>(Scalar(1), m_.cwiseAbs().maxCoeff());
    return (m_ - m_.adjoint()).cwiseAbs().maxCoeff() / scale;
  }
  bool is_real() const { return m_.imag().cwiseAbs().maxCoeff() == Scalar(0); }

  BasicOperator& operator+=(const BasicOperator& o) {
    check_same(o);
    m_ += o.m_;
    return *this;
  }
  BasicOperator& operator-=(const BasicOperator& o) {
    check_same(o);
    m_ -= o.m_;
    return *this;
  }
  BasicOperator& operator*=(Complex s) {
    m_ *= s;
    return *this;
  }

  void check_same(const BasicOperator& o) const {
    if (basis_ != o.basis_ || dim() != o.dim())
      throw BasisMismatchError(std::string("operator mismatch: ") + to_string(basis_) + "/" +
                               std::to_string(dim()) + " vs " + to_string(o.basis_) + "/" +
                               std::to_string(o.dim()));
  }

 private:
  Matrix m_;
  Basis basis_;
};

template <typename S>
BasicOperator<S> operator+(BasicOperator<S> a, const BasicOperator<S>& b) {
  return a += b;
}
template <typename S>
BasicOperator<S> operator-(BasicOperator<S> a, const BasicOperator<S>& b) {
  return a -= b;
}
template <typename S>
BasicOperator<S> operator*(const BasicOperator<S>& a, const BasicOperator<S>& b) {
  a.check_same(b);
  return BasicOperator<S>(a.matrix() * b.matrix(), a.basis());
}
template <typename S>
BasicOperator<S> operator*(std::complex<S> s, BasicOperator<S> a) {
  return a *= s;
}
template <typename S>
BasicOperator<S> operator*(S s, BasicOperator<S> a) {
  return a *= std::complex<S>(s);
}

template <typename S>
BasicOperator<S> commutator(const BasicOperator<S>& a, const BasicOperator<S>& b) {
  return a * b - b * a;
}
template <typename S>
BasicOperator<S> anticommutator(const BasicOperator<S>& a, const BasicOperator<S>& b) {
  return a * b + b * a;
}

/// Normalized state vector on the same bases as BasicOperator.
template <typename Scalar>
class BasicKet {
 public:
  using Vector = CVector<Scalar>;

  /// Normalizes `v`; throws if it is (numerically) zero.
  static BasicKet normalized(Vector v, Basis basis) {
    const Scalar nrm = v.norm();
    if (!(nrm > Scalar(0))) throw DomainError("cannot normalize a zero vector");
    v /= nrm;
    return BasicKet(std::move(v), basis);
  }

  /// `v` must already have unit norm within 1e-10.
  BasicKet(Vector v, Basis basis) : v_(std::move(v)), basis_(basis) {
    if (std::abs(v_.norm() - Scalar(1)) > Scalar(1e-10))
      throw DomainError("ket norm deviates from 1 by " + std::to_string(double(v_.norm() - 1)));
  }

  Eigen::Index dim() const { return v_.size(); }
  Eigen::Index cutoff() const { return basis_ == Basis::qubit_field ? dim() / 2 : dim(); }
  Basis basis() const { return basis_; }
  const Vector& amplitudes() const { return v_; }

  /// Total population in the last `guard` Fock levels (of each qubit block).
  Scalar guard_population(Eigen::Index guard = 4) const {
    const Eigen::Index n = cutoff();
    const Eigen::Index g = std::min(guard, n);
    Scalar p = v_.segment(n - g, g).squaredNorm();
    if (basis_ == Basis::qubit_field) p += v_.segment(2 * n - g, g).squaredNorm();
    return p;
  }

 private:
  Vector v_;
  Basis basis_;
};

using Operator = BasicOperator<double>;
using Ket = BasicKet<double>;
using Complex = std::complex<double>;

/// Doubling-loop controls for cutoff convergence.
struct Truncation {
  int n_start = 32;
  int n_max = 512;
  double rel_tol = 1e-9;
};

void validate(const Truncation& tr);

// ---------------------------------------------------------------------------
// Single-mode operators. Polynomial operators are exact projections of the
// infinite-dimensional operator onto the leading n levels (computed on a padded
// basis and cropped), so e.g. X^2 agrees with (a^2 + a^dag^2 + 2 a^dag a + 1)/2
// entry by entry.

Operator annihilation(int n);
Operator creation(int n);
Operator number_op(int n);
Operator quad_x(int n);
Operator quad_p(int n);
Operator field_identity(int n);

/// Exact projection of a polynomial in (a, a^dag). `build` receives padded
/// annihilation/creation matrices of dimension n + pad and returns the padded
/// result; `pad` must be at least the polynomial degree.
Operator project_polynomial(int n, int pad,
                            const std::function<Eigen::MatrixXcd(const Eigen::MatrixXcd& a,
                                                                 const Eigen::MatrixXcd& ad)>& build);

Operator quad_x2(int n);
Operator quad_p2(int n);
/// XP + PX.
Operator quad_xp_sym(int n);

/// Single-mode squeeze S(r) = exp[(r/2)(a^dag^2 - a^2)], |r| <= 3.
/// Throws TruncationError when S(r)|0> puts more than `leak_tol` into the last
/// four levels.
Operator squeeze(double r, int n, double leak_tol = 1e-10);

/// Displacement D(alpha) = exp(alpha a^dag - alpha^* a).
Operator displacement(Complex alpha, int n, double leak_tol = 1e-10);

// Qubit-field embedding (qubit-major).
Operator embed_field(const Operator& field);
Operator sigma_z(int n);
Operator sigma_x(int n);
Operator sigma_plus(int n);
Operator sigma_minus(int n);

// ---------------------------------------------------------------------------
// States.

Ket fock_ket(int m, int n);
/// (|0> + i|1>)/sqrt(2), the homodyne-scheme initial state.
Ket homodyne_initial_state(int n);
/// Coherent state D(alpha)|0>.
Ket coherent_ket(Complex alpha, int n);
/// (c_up |up> + c_down |down>) (x) |phi>.
Ket product_state(Complex c_up, Complex c_down, const Ket& field);

// ---------------------------------------------------------------------------
// Hamiltonians.

/// Full AQRM on qubit (x) field, dimension 2n.
Operator hamiltonian_full(const ModelParams& p, int n);

/// Effective single-mode Hamiltonian: `op` is the operator part, `constant` the
/// c-number the model adds to it, and `zero_point_shift` the c-number that turns
/// `op` into its symmetric-ordered (quadrature) form. The latter fixes the
/// relative phase between the two qubit branches.
struct EffectiveHamiltonian {
  Operator op;
  double constant = 0.0;
  double zero_point_shift = 0.0;

  Operator with_constant() const {
    return op + constant * Operator::identity(op.dim(), op.basis());
  }
};

/// (omega - (l1^2 + l2^2)/Omega) a^dag a - (l1 l2/Omega)(a^dag^2 + a^2),
/// constant -l2^2/Omega - Omega/2.
EffectiveHamiltonian hamiltonian_np_down(const DerivedParams& d, double omega, int n);

/// (omega + (l1^2 + l2^2)/Omega) a^dag a + (l1 l2/Omega)(a^dag^2 + a^2).
EffectiveHamiltonian hamiltonian_np_up(const DerivedParams& d, double omega, int n);

/// Quadrature-form H_np^down = (omega/2)[(X^2 + P^2) - g^2 (X^2 + gamma^2 P^2)].
Operator hamiltonian_np_down_quadrature(double g, double gamma, double omega, int n);

/// Finite-frequency effective Hamiltonian
///   H_np^down + (DC)^2/Omega^3 - (omega/Omega^2)(l1^2 a^dag a - l2^2 a a^dag)
/// with C = l1 a + l2 a^dag and D = l2 a + l1 a^dag.
Operator hamiltonian_np_finite_operator_form(const ModelParams& p, int n);

/// The same Hamiltonian assembled from quadratures:
///   H_np^down + (g^4 omega / 4 eta)(X^2 + gamma^2 P^2 - gamma)^2
///   - (g^2 omega / 2 eta) gamma (X^2 + P^2) + g^2 omega (1 + gamma^2) / (4 eta).
Operator hamiltonian_np_finite_quadrature_form(const ModelParams& p, int n);

/// Operator form, verified entrywise against the quadrature form
/// (VerificationError on disagreement above 1e-9 relative to the largest entry).
EffectiveHamiltonian hamiltonian_np_finite(const ModelParams& p, int n);

// ---------------------------------------------------------------------------
// Evolution.

/// Cached Hermitian eigendecomposition H = V diag(E) V^dag; evolves by
/// exp(-iHt) for any number of times without refactorizing.
class Propagator {
 public:
  explicit Propagator(const Operator& h, const std::string& context = {});

  Ket evolve(const Ket& psi, double t) const;
  Operator evolution_operator(double t) const;

  const Eigen::VectorXd& eigenvalues() const { return energies_; }
  const Eigen::MatrixXcd& eigenvectors() const { return vectors_; }
  Basis basis() const { return basis_; }
  Eigen::Index dim() const { return energies_.size(); }

 private:
  Eigen::VectorXd energies_;
  Eigen::MatrixXcd vectors_;
  Basis basis_;
};

Ket evolve(const Operator& h, double t, const Ket& psi);
Operator evolution_operator(const Operator& h, double t);

Complex expectation(const Operator& op, const Ket& psi);
double variance(const Operator& op, const Ket& psi);
Complex overlap(const Ket& bra, const Ket& ket);

/// Leading (dim - guard) block, where truncation artifacts are absent.
Eigen::MatrixXcd interior(const Eigen::MatrixXcd& m, Eigen::Index guard = 4);

// ---------------------------------------------------------------------------
// Cutoff convergence.

struct ConvergeOutcome {
  double value = 0.0;
  int n_used = 0;
  bool converged = false;
  double previous = 0.0;
};

/// Doubles the cutoff from n_start until two successive values agree to
/// rel_tol (absolute 1e-12 below 1e-8); never exceeds n_max. Does not throw on
/// non-convergence.
ConvergeOutcome try_converge(const Truncation& tr, const std::function<double(int)>& f);

struct Converged {
  double value;
  int n_used;
};

/// As try_converge, but throws ConvergenceError carrying the last two values.
Converged converge(const Truncation& tr, const std::function<double(int)>& f);

struct ConvergeVectorOutcome {
  std::vector<double> values;
  int n_used = 0;
  bool converged = false;
};

/// Vector version: successive vectors agree when max |diff| <= rel_tol * max |v|
/// (absolute 1e-12 when max |v| < 1e-8).
ConvergeVectorOutcome try_converge_values(const Truncation& tr,
                                          const std::function<std::vector<double>(int)>& f);

/// Finite-difference derivatives carry step noise near 1e-8; cutoff loops hold
/// them to this tolerance instead of rel_tol when rel_tol is tighter.
inline constexpr double kFiniteDifferenceTol = 1e-6;

inline double fd_tolerance(const Truncation& tr) { return std::max(tr.rel_tol, kFiniteDifferenceTol); }

/// As try_converge_values, with each block of the result judged on its own
/// scale against its own relative tolerance. Values come back flattened.
ConvergeVectorOutcome try_converge_blocks(const Truncation& tr, const std::vector<double>& rel_tols,
                                          const std::function<std::vector<std::vector<double>>(int)>& f);

}  // namespace aqrm
