#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "aqrm/qfi.hpp"

using namespace aqrm;

namespace {

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// 4 Var[h] for the exact generator and the finite-difference oracle, both in alpha.
std::pair<double, double> both_qfi(double g, double gamma, double t, int n = 96) {
  const DerivedParams d = derive_g_gamma(g, gamma);
  const Ket psi = homodyne_initial_state(n);
  const double exact = qfi_exact_generator(build_generators(d, 1.0, n), t, psi).value;
  const double alpha = -g * g;
  const double fd = qfi_finite_difference(quadrature_family(gamma, 1.0, n), alpha, t, psi, default_step(alpha)).value;
  return {exact, fd};
}

}  // namespace

TEST_CASE("generator algebra") {
  SUBCASE("xi = 0 kills A and B") {
    for (double gamma : {1.0, -1.0}) {
      const GeneratorSet gs = build_generators(derive_g_gamma(0.6, gamma), 1.0, 24);
      CHECK(max_abs(gs.a_op.matrix()) == 0.0);
      CHECK(max_abs(gs.b_op.matrix()) == 0.0);
    }
  }
  SUBCASE("eigen-operator residual") {
    CHECK(eigen_operator_residual(build_generators(derive_g_gamma(0.5, 1.0 / 3.0), 1.0, 40)) < 1e-8);
  }
  SUBCASE("commutator identities hold independently of the closed forms") {
    const int n = 40;
    const GeneratorSet gs = build_generators(derive_g_gamma(0.7, -0.4), 1.3, n);
    const Operator c = commutator(gs.h0, gs.h1);
    const Eigen::MatrixXcd a_ref = Complex(0, -1) * c.matrix();
    const Eigen::MatrixXcd b_ref = -commutator(gs.hamiltonian(), c).matrix();
    CHECK(max_abs(interior(gs.a_op.matrix() - a_ref)) < 1e-10);
    CHECK(max_abs(interior(gs.b_op.matrix() - b_ref)) < 1e-10);
  }
  SUBCASE("delta closed form") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> ug(0.01, 0.99), ugm(-0.99, 0.99);
    for (int i = 0; i < 20; ++i) {
      const double g = ug(rng), gamma = ugm(rng);
      const GeneratorSet gs = build_generators(derive_g_gamma(g, gamma), 2.0, 12);
      CHECK(gs.delta == doctest::Approx(16.0 * (1 - g * g) * (1 - gamma * gamma * g * g)).epsilon(1e-13));
      CHECK(gs.alpha == doctest::Approx(-g * g).epsilon(1e-14));
    }
  }
}

TEST_CASE("exact local generator") {
  const GeneratorSet gs = build_generators(derive_g_gamma(0.5, 0.2), 1.0, 32);
  CHECK(max_abs(local_generator_exact(gs, 0.0).matrix()) == 0.0);
  const GeneratorSet iso = build_generators(derive_g_gamma(0.5, 1.0), 1.0, 32);
  CHECK(max_abs(local_generator_exact(iso, 2.7).matrix() - (2.7 * iso.h1).matrix()) < 1e-14);
  const GeneratorSet beyond = build_generators(derive_g_gamma(1.1, 0.2), 1.0, 32);
  CHECK_THROWS_AS(local_generator_exact(beyond, 1.0), DomainError);
}

TEST_CASE("exact generator matches the finite-difference oracle") {
  SUBCASE("g = 0.5, gamma = 0, omega t = 5") {
    const auto [exact, fd] = both_qfi(0.5, 0.0, 5.0);
    CHECK(rel(fd, exact) < 1e-6);
  }
  SUBCASE("random points") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> ug(0.2, 0.9), ugm(-0.9, 0.9), ut(0.3, 12.0);
    for (int i = 0; i < 10; ++i) {
      const double g = ug(rng), gamma = ugm(rng), t = ut(rng);
      const auto [exact, fd] = both_qfi(g, gamma, t);
      CHECK(rel(fd, exact) < 1e-6);
    }
  }
  SUBCASE("the generator with a trailing 1/t in the B coefficient does not") {
    const double g = 0.7, gamma = 0.3, t = 4.0;
    const DerivedParams d = derive_g_gamma(g, gamma);
    const int n = 96;
    const GeneratorSet gs = build_generators(d, 1.0, n);
    const double s = std::sqrt(gs.delta);
    const Operator h = t * gs.h1 + ((std::cos(s * t) - 1.0) / gs.delta) * gs.a_op -
                       ((std::sin(s * t) - s * t) / (gs.delta * s * t)) * gs.b_op;
    const Ket psi = homodyne_initial_state(n);
    const double alt = 4.0 * variance(h, psi);
    const auto [exact, fd] = both_qfi(g, gamma, t);
    CHECK(rel(alt, fd) > 1e-2);
  }
}

TEST_CASE("finite-difference QFI") {
  SUBCASE("alpha-independent family gives zero") {
    const int n = 16;
    const Operator h = quad_x2(n);
    const QfiResult r =
        qfi_finite_difference([&](double) { return h; }, 0.3, 2.0, homodyne_initial_state(n), 1e-5);
    CHECK(std::abs(r.value) < 1e-10);
  }
  SUBCASE("commuting family alpha X") {
    const int n = 3;
    const Operator x = quad_x(n);
    const QfiResult r =
        qfi_finite_difference([&](double a) { return a * x; }, 0.4, 1.0, fock_ket(0, n), 1e-5);
    // 4 t^2 Var[X] on the vacuum; the cutoff does not touch <0|X^2|0>.
    CHECK(r.value == doctest::Approx(2.0).epsilon(1e-8));
  }
  SUBCASE("state QFI of a rotating qubit-like pair") {
    const int n = 4;
    auto psi_of = [n](double th) {
      Eigen::VectorXcd v = Eigen::VectorXcd::Zero(n);
      v(0) = std::cos(th / 2.0);
      v(1) = std::sin(th / 2.0);
      return Ket(v, Basis::field_only);
    };
    CHECK(qfi_state(psi_of, 0.7, 1e-4).value == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("closed-form QFI") {
  const DerivedParams d = derive_g_gamma(0.9, 1.0 / 3.0);
  const double vp2 = var_p2(homodyne_initial_state(32));
  SUBCASE("vanishes at xi = 0") {
    CHECK(qfi_analytic(derive_g_gamma(0.9, 1.0), 1.0, 3.0, vp2).value == 0.0);
  }
  SUBCASE("quadratic in k at tau_k") {
    const double f1 = qfi_analytic(d, 1.0, tau_k(d.delta_g, 1.0, 1), vp2).value;
    for (int k = 2; k <= 5; ++k) {
      const double fk = qfi_analytic(d, 1.0, tau_k(d.delta_g, 1.0, k), vp2).value;
      CHECK(std::abs(fk / (k * k) - f1) <= 1e-12 * f1);
    }
    const double closed = 64.0 * std::numbers::pi * std::numbers::pi * d.g * d.g * d.xi * d.xi * d.mu * d.mu /
                          std::pow(d.delta_g, 3) * vp2;
    CHECK(f1 == doctest::Approx(closed).epsilon(1e-12));
  }
  SUBCASE("agrees with the oracle within 10% at g = 0.5, gamma = 1/3") {
    const DerivedParams e = derive_g_gamma(0.5, 1.0 / 3.0);
    const double t = tau_k(e.delta_g, 1.0, 1);
    const auto [exact, fd] = both_qfi(0.5, 1.0 / 3.0, t);
    (void)exact;
    CHECK(rel(qfi_analytic(e, 1.0, t, vp2).value, fisher_g_from_alpha(fd, 0.5)) < 0.10);
  }
  SUBCASE("rejects the broken phase") {
    CHECK_THROWS_AS(qfi_analytic(derive_g_gamma(1.0, 0.0), 1.0, 1.0, vp2), DomainError);
  }
  CHECK(vp2 == doctest::Approx(1.25).epsilon(1e-14));
}

TEST_CASE("gamma sign symmetry") {
  for (double g : {0.5, 0.8, 0.95})
    for (double gamma : {0.2, 1.0 / 3.0, 0.7}) {
      const DerivedParams p = derive_g_gamma(g, gamma), m = derive_g_gamma(g, -gamma);
      const double t = tau_k(p.delta_g, 1.0, 1);
      const double a = qfi_analytic(p, 1.0, t, 1.25).value, b = qfi_analytic(m, 1.0, t, 1.25).value;
      CHECK(std::abs(a - b) <= 1e-10 * a);
      const auto [ep, fp] = both_qfi(g, gamma, t, 64);
      const auto [em, fm] = both_qfi(g, -gamma, t, 64);
      CHECK(std::abs(ep - em) <= 1e-10 * ep);
      CHECK(std::abs(fp - fm) <= 1e-10 * fp);
    }
}

TEST_CASE("divergence toward the critical point") {
  double prev = 0.0;
  for (double g : {0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99}) {
    const DerivedParams d = derive_g_gamma(g, 0.3);
    const double f = qfi_analytic(d, 1.0, tau_k(d.delta_g, 1.0, 1), 1.25).value;
    CHECK(f > prev);
    prev = f;
  }
}

TEST_CASE("isotropic coupling maximizes the QFI") {
  for (double g : {0.6, 0.9}) {
    const DerivedParams d0 = derive_g_gamma(g, 0.0);
    const double f0 = qfi_analytic(d0, 1.0, tau_k(d0.delta_g, 1.0, 1), 1.25).value;
    for (int i = -9; i <= 9; ++i) {
      if (i == 0) continue;
      const DerivedParams d = derive_g_gamma(g, 0.1 * i);
      CHECK(qfi_analytic(d, 1.0, tau_k(d.delta_g, 1.0, 1), 1.25).value < f0);
    }
  }
}

TEST_CASE("reparameterization between alpha and g") {
  CHECK(fisher_g_from_alpha(3.0, 0.5) == doctest::Approx(3.0));
  CHECK(fisher_alpha_from_g(fisher_g_from_alpha(2.2, 0.7), 0.7) == doctest::Approx(2.2).epsilon(1e-15));
  // F_g from a direct g-derivative of the state agrees with 4 g^2 F_alpha.
  const double g = 0.6, gamma = 0.25, t = 3.0;
  const int n = 64;
  const Ket psi0 = homodyne_initial_state(n);
  auto psi_of = [&](double gg) {
    return evolve(hamiltonian_np_down_quadrature(gg, gamma, 1.0, n), t, psi0);
  };
  const double fg = qfi_state(psi_of, g, 1e-5 * g).value;
  const double fa = qfi_exact_generator(build_generators(derive_g_gamma(g, gamma), 1.0, n), t, psi0).value;
  CHECK(rel(fg, fisher_g_from_alpha(fa, g)) < 1e-6);
}
