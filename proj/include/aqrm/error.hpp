#pragma once

#include <stdexcept>
#include <string>

namespace aqrm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter lies outside the domain of a formula (non-positive frequency,
/// |gamma| > 1, Delta_g <= 0 for a normal-phase formula, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// lambda1 = lambda2 = 0: the anisotropy is undefined.
class DegenerateCouplingError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Operands live on different bases or have different dimensions.
class BasisMismatchError : public Error {
 public:
  using Error::Error;
};

/// Population leaked into the truncation guard band.
class TruncationError : public Error {
 public:
  using Error::Error;
};

/// The cutoff-doubling loop hit its ceiling before two successive values agreed.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double last, double previous, int cutoff)
      : Error(what), last_(last), previous_(previous), cutoff_(cutoff) {}

  double last() const { return last_; }
  double previous() const { return previous_; }
  int cutoff() const { return cutoff_; }

 private:
  double last_;
  double previous_;
  int cutoff_;
};

/// Eigendecomposition failure or a finite-difference estimate dominated by
/// cancellation.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// An internal algebraic identity did not hold (commutator relations, the two
/// constructions of the finite-frequency Hamiltonian, ...).
class VerificationError : public Error {
 public:
  using Error::Error;
};

}  // namespace aqrm

namespace aqrm {

/// Runs fn(); an aqrm::Error escaping it is rethrown as the same type with
/// `where` prefixed to its message.
template <typename F>
auto with_context(const std::string& where, F&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const DegenerateCouplingError& e) {
    throw DegenerateCouplingError(where + ": " + e.what());
  } catch (const DomainError& e) {
    throw DomainError(where + ": " + e.what());
  } catch (const BasisMismatchError& e) {
    throw BasisMismatchError(where + ": " + e.what());
  } catch (const TruncationError& e) {
    throw TruncationError(where + ": " + e.what());
  } catch (const ConvergenceError& e) {
    throw ConvergenceError(where + ": " + e.what(), e.last(), e.previous(), e.cutoff());
  } catch (const NumericalError& e) {
    throw NumericalError(where + ": " + e.what());
  } catch (const VerificationError& e) {
    throw VerificationError(where + ": " + e.what());
  }
}

}  // namespace aqrm
