#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "aqrm/finitefreq.hpp"
#include "aqrm/homodyne.hpp"

using namespace aqrm;

namespace {

const Truncation kTr{32, 256, 1e-9};

}  // namespace

TEST_CASE("series coefficients") {
  const double pi2 = std::numbers::pi * std::numbers::pi;
  SUBCASE("leading term at g = 0.5") {
    CHECK(series_inverted_variance(0.5, 50.0, 0.0) == doctest::Approx(2.92433).epsilon(1e-5));
    CHECK(series_coefficients(0.5, 50.0).c0 == doctest::Approx(0.25 * pi2 / (2.0 * 0.421875)).epsilon(1e-15));
  }
  SUBCASE("leading term equals the homodyne peak at k = 1, gamma = 0") {
    std::mt19937 rng(13);
    std::uniform_real_distribution<double> ug(0.05, 0.99);
    for (int i = 0; i < 20; ++i) {
      const double g = ug(rng);
      const double peak = inverted_variance_at_tau_k(derive_g_gamma(g, 0.0), 1.0, 1);
      CHECK(series_coefficients(g, 10.0).c0 == doctest::Approx(peak).epsilon(1e-13));
    }
  }
  SUBCASE("c1 is positive, so the maximum shifts to gamma > 0") {
    for (double g : {0.1, 0.5, 0.9, 0.99})
      for (double eta : {1.0, 50.0, 1e4}) {
        const FiniteFreqSeries s = series_coefficients(g, eta);
        CHECK(s.c0 > 0.0);
        CHECK(s.c1 > 0.0);
      }
  }
  SUBCASE("E polynomial as printed") {
    const double g = 0.7, eta = 30.0;
    const FiniteFreqSeries s = series_coefficients(g, eta);
    const double e = 4 * std::pow(g, 10) + 4 * (2 + eta * eta) + 2 * std::pow(g, 8) * (3 * eta * eta - 8) -
                     2 * g * g * (9 * eta * eta + 4) - 2 * std::pow(g, 6) * (11 * eta * eta + 10) +
                     std::pow(g, 4) * (30 * eta * eta + 32 - pi2);
    CHECK(s.e_poly == doctest::Approx(e).epsilon(1e-14));
    CHECK(s.c2 == doctest::Approx(g * g * pi2 * e / (4 * std::pow(1 - g * g, 6) * eta * eta)).epsilon(1e-14));
  }
  SUBCASE("linear shift vanishes at large eta") {
    const FiniteFreqSeries s = series_coefficients(0.8, 1e8);
    CHECK(s.c1 * 0.1 < 1e-6 * s.c0);
  }
  CHECK_THROWS_AS(series_coefficients(1.0, 50.0), DomainError);
  CHECK_THROWS_AS(series_coefficients(0.5, 0.0), DomainError);
}

TEST_CASE("lab inverted variance reduces to the effective model at large eta") {
  const DerivedParams d = derive_g_gamma(0.5, 0.0);
  const double t = tau_k(d.delta_g, 1.0, 1);
  const LabValue lab = numeric_inverted_variance_lab(from_g_gamma(0.5, 0.0, 1.0, 1e6), t, kTr);
  CHECK(lab.converged);
  const QuadratureTrace ref = numeric_trace_converged(d, 1.0, {t}, kTr);
  CHECK(std::abs(lab.value - ref.inv_var[0]) < 1e-3 * ref.inv_var[0]);
}

TEST_CASE("discrepancy from the effective model shrinks with eta") {
  const double g = 0.7, gamma = 0.2;
  const DerivedParams d = derive_g_gamma(g, gamma);
  const double t = tau_k(d.delta_g, 1.0, 1);
  const double ref = numeric_trace_converged(d, 1.0, {t}, kTr).inv_var[0];
  double prev = 1e300;
  for (double eta : {1e2, 1e3, 1e4}) {
    const double v = numeric_inverted_variance_lab(from_g_gamma(g, gamma, 1.0, eta), t, kTr).value;
    CHECK(std::abs(v - ref) < prev);
    prev = std::abs(v - ref);
  }
}

TEST_CASE("finite eta breaks the gamma sign symmetry") {
  const double g = 0.9, eta = 20.0;
  const auto at = [&](double gamma) {
    const double t = tau_k(delta_g(g, gamma), 1.0, 1);
    return numeric_inverted_variance_lab(from_g_gamma(g, gamma, 1.0, eta), t, kTr).value;
  };
  const double plus = at(0.2), minus = at(-0.2);
  CHECK(std::abs(plus - minus) > 0.01 * std::max(plus, minus));
}

TEST_CASE("optimal ratio scan") {
  OptimalRatioConfig cfg;
  cfg.gamma.clear();
  for (int i = 0; i <= 20; ++i) cfg.gamma.push_back(-0.5 + i / 20.0);
  cfg.t_samples = 5;
  cfg.truncation = kTr;
  SUBCASE("finite eta favors gamma > 0 near g = 1") {
    const OptimalRatio r = optimal_ratio(0.9, 50.0, cfg);
    CHECK(r.gamma_star > 0.0);
    CHECK(r.ratio_star > 1.0);
    CHECK(r.t_star_over_tau >= 0.9);
    CHECK(r.t_star_over_tau <= 1.0);
    CHECK(r.profile.size() == cfg.gamma.size());
  }
  SUBCASE("rows and columns") {
    const auto rows = optimal_ratio_scan({0.9}, {50.0}, cfg);
    REQUIRE(rows.size() == 1);
    const std::vector<std::string> cols{"g", "eta", "gamma_star", "ratio_star", "t_star_over_tau",
                                        "inv_var_max", "n_used", "converged"};
    CHECK(rows[0].columns() == cols);
  }
  SUBCASE("bad configuration") {
    OptimalRatioConfig bad = cfg;
    bad.gamma = {0.0, 0.1};
    CHECK_THROWS_AS(optimal_ratio(0.9, 50.0, bad), DomainError);
    CHECK_THROWS_AS(optimal_ratio(1.0, 50.0, cfg), DomainError);
  }
}
