#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "clocknet/optics.hpp"
#include "clocknet/rng.hpp"
#include "clocknet/spin.hpp"

using namespace clocknet;

namespace {

/// Independent oracle for the conditional variance: for a joint Gaussian with
/// readout P_out = P_L + kappa X (P_L vacuum, Var 1/2),
/// Var(X | P_out) = Var(X) - Cov(X, P_out)^2 / Var(P_out).
double conditional_variance_oracle(double prior_var_x, double kappa) {
  const double var_out = 0.5 + kappa * kappa * prior_var_x;
  const double cov = kappa * prior_var_x;
  return prior_var_x - cov * cov / var_out;
}

}  // namespace

TEST_CASE("free-space interaction constant") {
  CHECK(kappa_free(100.0, 0.0) == doctest::Approx(0.0));

  // d = 2e at eta = 1/2: kappa^2 = sqrt(e), so xi_min = sqrt(e)/kappa^2 = 1.
  const double d = 2.0 * M_E;
  const double k = kappa_free(d, 0.5);
  CHECK(k * k == doctest::Approx(std::sqrt(M_E)).epsilon(1e-12));
  CHECK(std::sqrt(M_E) / (k * k) == doctest::Approx(2.0 * M_E / d).epsilon(1e-12));

  const double k100 = kappa_free(100.0, 0.5);
  CHECK(std::sqrt(M_E) / (k100 * k100) == doctest::Approx(2.0 * M_E / 100.0).epsilon(1e-3));

  CHECK_THROWS_AS(kappa_free(-1.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(kappa_free(1.0, -0.1), std::invalid_argument);
}

TEST_CASE("qnd update: closed form and limits") {
  Rng rng(3);

  // kappa = 0: only decoherence, xi = e^eta.
  const QndResult nothing = qnd_update(new_css(1000), 0.0, 0.3, rng);
  CHECK(nothing.state.cov.isApprox(Eigen::Matrix2d::Identity() * 0.5, 1e-12));
  CHECK(squeezing_parameter(nothing.state) == doctest::Approx(std::exp(0.3)));

  // CSS prior: xi = 1/(e^{-eta}(1+kappa^2)) for generic parameters.
  for (double kappa : {0.5, 2.0, 10.0}) {
    for (double eta : {0.0, 0.5, 1.5}) {
      const QndResult r = qnd_update(new_css(1000), kappa, eta, rng);
      CHECK(squeezing_parameter(r.state) ==
            doctest::Approx(xi_closed_form(kappa, eta)).epsilon(1e-12));
    }
  }
}

TEST_CASE("qnd update matches the independent conditional-variance oracle") {
  Rng rng(5);
  // kappa^2 = d e^{-1/2}/2 at eta = 1/2 and d = 1000 -> xi = 2e/1000.
  const double d = 1000.0;
  const double kappa = std::sqrt(d * std::exp(-0.5) / 2.0);
  const QndResult r = qnd_update(new_css(1000), kappa, 0.5, rng);

  const double oracle_var = conditional_variance_oracle(0.5, kappa);
  const double oracle_xi = oracle_var * 1000.0 / r.state.j_len;
  CHECK(squeezing_parameter(r.state) == doctest::Approx(oracle_xi).epsilon(1e-9));
  // The asymptotic 2e/d drops the "+1" in 1 + kappa^2, a relative correction
  // of 1/kappa^2 = 2 sqrt(e)/d.
  CHECK(squeezing_parameter(r.state) ==
        doctest::Approx(2.0 * M_E / 1000.0).epsilon(3.5 / 1000.0));
}

TEST_CASE("property sweep: qnd variance equals the closed form over (kappa, eta)") {
  Rng rng(17);
  for (int i = 0; i < 200; ++i) {
    const double kappa = rng.uniform(0.0, 100.0);
    const double eta = rng.uniform(0.0, 2.0);
    const QndResult r = qnd_update(new_css(1000), kappa, eta, rng);
    const double xi = squeezing_parameter(r.state);
    CHECK(std::abs(xi - xi_closed_form(kappa, eta)) <= 1e-9 * xi_closed_form(kappa, eta));
    // Conditioning never grows Var(X_A) and respects Heisenberg.
    CHECK(r.state.cov(0, 0) <= 0.5 + 1e-15);
    CHECK(r.state.cov.determinant() >= 0.25 - 1e-9);
  }
}

TEST_CASE("qnd outcome statistics") {
  // Averaging sampled outcomes reproduces mean kappa <X_A> within 5 SE.
  const double kappa = 1.3;
  CollectiveSpin s = new_css(1000);
  s.quad_mean << 0.3, 0.0;
  Rng rng(29);
  const int n = 100000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    sum += qnd_update(s, kappa, 0.0, rng).outcome;
  }
  const double mean = sum / n;
  const double se = std::sqrt((0.5 + kappa * kappa * 0.5) / n);
  CHECK(std::abs(mean - kappa * 0.3) < 5.0 * se);
}

TEST_CASE("cavity-enhanced interaction constant") {
  // F = pi/2 is the crossover where 2F/pi = 1.
  CHECK(kappa_cavity(40.0, M_PI / 2.0, 0.3) ==
        doctest::Approx(kappa_free(40.0, 0.3)).epsilon(1e-12));

  // Substitution form at eta_cav = 1/2: kappa_cav^2 = 2 d F e^{-1/2} / pi.
  const double d = 0.012, f = 1e5;
  const double k = kappa_cavity_substituted(d, f, 0.5);
  CHECK(k * k == doctest::Approx(2.0 * d * f * std::exp(-0.5) / M_PI).epsilon(1e-12));

  // dF = 1200 -> xi_min = e pi / (2 dF) ~ 3.56e-3, beyond 20 dB.
  const double xi_min = M_E * M_PI / (2.0 * d * f);
  CHECK(xi_min == doctest::Approx(3.56e-3).epsilon(0.01));
  CHECK(-10.0 * std::log10(xi_min) > 20.0);

  // eta_cav relation.
  CHECK(eta_cav(0.0, 1e4) == doctest::Approx(0.0));
  CHECK(eta_cav(0.37, M_PI) == doctest::Approx(0.37).epsilon(1e-12));
  CHECK(M_PI / (2.0 * 1e5) == doctest::Approx(1.57e-5).epsilon(0.01));
  CHECK(eta_cav(M_PI / (2.0 * 1e5), 1e5) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("free-space optimum of the squeezing curve") {
  const double d = 1000.0;
  double best_eta = 0.0, best_xi = 1e300;
  for (int i = 1; i <= 2000; ++i) {
    const double eta = 2.0 * i / 2000.0;
    const double xi = xi_closed_form(kappa_free(d, eta), eta);
    if (xi < best_xi) {
      best_xi = xi;
      best_eta = eta;
    }
  }
  CHECK(best_eta == doctest::Approx(0.5).epsilon(0.02));
  // Large-d expansion: the exact optimum sits below 2e/d by the relative
  // correction 1/kappa^2 = 2 sqrt(e)/d ~ 3.3/d.
  CHECK(std::abs(best_xi - 2.0 * M_E / d) < (3.5 / d) * (2.0 * M_E / d));
}

TEST_CASE("probe phase shift") {
  CavityParams cav;
  cav.t1 = cav.t2 = 1e-5;
  cav.d = 0.012;
  ProbePulse probe;
  probe.n_det = 1e6;
  probe.gamma = 7e3;
  probe.delta = 7e6;
  probe.sigma_over_a = 1.2e-5;

  const CollectiveSpin symmetric = new_css(1000);
  const PhaseShiftResult r0 = phase_shift(symmetric, probe, cav);
  CHECK(r0.mean == doctest::Approx(0.0));
  CHECK(r0.shot_noise_rms == doctest::Approx(1e-3).epsilon(1e-12));

  // Mean scales linearly with <X_A>.
  CollectiveSpin shifted = symmetric;
  shifted.quad_mean << 0.25, 0.0;
  const double m1 = phase_shift(shifted, probe, cav).mean;
  shifted.quad_mean << 0.5, 0.0;
  const double m2 = phase_shift(shifted, probe, cav).mean;
  CHECK(m2 == doctest::Approx(2.0 * m1).epsilon(1e-12));

  ProbePulse none = probe;
  none.n_det = 0.0;
  CHECK_THROWS_AS(phase_shift(symmetric, none, cav), std::invalid_argument);
}

TEST_CASE("cavity transmission") {
  CavityParams matched;
  matched.t1 = matched.t2 = 1e-4;
  matched.loss = 0.0;
  CHECK(cavity_transmission(matched, 0.0).exact == doctest::Approx(1.0).epsilon(1e-12));

  // Series-expansion oracle: the first-order form tracks the exact one within
  // 1% while the expansion parameter 2 F d_delta / pi stays below 0.05.
  for (double d_delta : {1e-7, 5e-7, 1e-6}) {
    const double f = matched.finesse();
    REQUIRE(2.0 * f * d_delta / M_PI < 0.05);
    const TransmissionResult t = cavity_transmission(matched, d_delta);
    CHECK(t.first_order == doctest::Approx(t.exact).epsilon(0.01));
  }

  // Absorption at the optimal eta = 1/2 enters as d_delta = N/(2n).
  const double n_detected = 1e7;
  const double d_delta = 1000.0 / (2.0 * n_detected);
  const TransmissionResult t = cavity_transmission(matched, d_delta);
  CHECK(t.exact < 1.0);

  CavityParams degenerate;
  CHECK_THROWS_AS(cavity_transmission(degenerate, 0.0), std::invalid_argument);
}

TEST_CASE("cooperativity consistency") {
  CavityParams cav;
  cav.d = 0.012;
  cav.big_gamma = 29e3;
  cav.t1 = cav.t2 = M_PI / 1e5;  // finesse 1e5 -> dF = 1200
  const CooperativityResult r = cooperativity_check(cav, 500e3, 7e3);
  CHECK(r.value == doctest::Approx(1231.5).epsilon(1e-3));
  CHECK(r.expected == doctest::Approx(1200.0).epsilon(1e-9));
  CHECK(r.consistent);  // within the default 5%

  // Collective enhancement: single-atom Rabi 16 kHz and N = 1000.
  CHECK(16e3 * std::sqrt(1000.0) == doctest::Approx(506e3).epsilon(0.01));

  // Doubling N doubles Omega^2 (and d F): value scales linearly.
  const CooperativityResult twice =
      cooperativity_check(cav, 500e3 * std::sqrt(2.0), 7e3);
  CHECK(twice.value == doctest::Approx(2.0 * r.value).epsilon(1e-9));

  CHECK_THROWS_AS(cooperativity_check(cav, 0.0, 7e3), std::invalid_argument);
}

TEST_CASE("holstein-primakoff readout bound") {
  const double bound = 2.0 * M_PI * M_E;
  CHECK(bound == doctest::Approx(17.08).epsilon(1e-3));
  CHECK(hp_validity(1e-4, 1e4));                  // sigma F / A = 1
  CHECK_FALSE(hp_validity(1e-3, 1e5));            // = 100
  CHECK_FALSE(hp_validity(bound / 1e4, 1e4));     // boundary excluded
  CHECK_THROWS_AS(hp_validity(0.0, 1.0), std::invalid_argument);
}

TEST_CASE("probe pulse eta and finesse plumbing") {
  ProbePulse p;
  p.n_dr = 1e6;
  p.gamma = 7e3;
  p.delta = -7e6;
  p.sigma_over_a = 1e-5;
  CHECK(p.eta() == doctest::Approx(1e6 * 1e-6 * 1e-5).epsilon(1e-12));
  p.delta = 0.0;
  CHECK_THROWS_AS(p.eta(), std::invalid_argument);

  CavityParams cav;
  cav.t1 = 2e-5;
  cav.t2 = 3e-5;
  cav.loss = 0.5e-5;
  CHECK(cav.finesse() == doctest::Approx(2.0 * M_PI / 6e-5).epsilon(1e-12));
  CHECK(cav.small_parameter_ok());
  cav.loss = 0.2;
  CHECK_FALSE(cav.small_parameter_ok());
}
