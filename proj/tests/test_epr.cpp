#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "clocknet/epr.hpp"

using namespace clocknet;

namespace {

CouplingRates matched_rates(double mu, double nu, double extra = 0.0) {
  CouplingRates r;
  r.mu1 = r.mu2 = mu;
  r.nu1 = r.nu2 = nu;
  r.extra_loss = extra;
  return r;
}

/// Independent crude integrator (explicit Euler) of the covariance flow,
/// used as an oracle against both steady_state and the module integrator.
Eigen::Matrix4d euler_integrate(const DriftDiffusion& dd, double total, double dt) {
  Eigen::Matrix4d sigma = Eigen::Matrix4d::Identity() * 0.5;
  for (double t = 0.0; t < total; t += dt) {
    sigma += dt * (dd.drift * sigma + sigma * dd.drift.transpose() + dd.diffusion);
  }
  return sigma;
}

}  // namespace

TEST_CASE("epr criterion on reference states") {
  // Two independent vacuum-level clocks sit exactly on the boundary.
  const EprCriterionResult vac = epr_criterion(vacuum_pair(500.0));
  CHECK(vac.value == doctest::Approx(1000.0).epsilon(1e-12));
  CHECK_FALSE(vac.entangled);

  // Oracle: the standard two-mode squeezed covariance built in place.
  for (double r : {0.2, 0.7, 1.3}) {
    const double c = 0.5 * std::cosh(2.0 * r);
    const double q = 0.5 * std::sinh(2.0 * r);
    EPRState oracle;
    oracle.j_len = 500.0;
    oracle.cov4 << c, 0, -q, 0, 0, c, 0, q, -q, 0, c, 0, 0, q, 0, c;
    const EprCriterionResult res = epr_criterion(oracle);
    CHECK(res.value == doctest::Approx(1000.0 * std::exp(-2.0 * r)).epsilon(1e-12));
    CHECK(res.entangled);
    CHECK((two_mode_squeezed_state(r, 500.0).cov4 - oracle.cov4).norm() < 1e-12);
  }

  // Classical noise on one side cannot produce entanglement.
  EPRState thermal = vacuum_pair(500.0);
  thermal.cov4(0, 0) = thermal.cov4(1, 1) = 50.0;
  CHECK_FALSE(epr_criterion(thermal).entangled);

  CHECK_THROWS_AS(epr_criterion(vacuum_pair(0.0)), std::invalid_argument);
}

TEST_CASE("drift and diffusion from the jump operators") {
  // mu = 0: beam-splitter damping toward vacuum.
  const EPRState damped = steady_state(matched_rates(0.0, 1.0), 500.0);
  CHECK((damped.cov4 - Eigen::Matrix4d::Identity() * 0.5).norm() < 1e-10);
  CHECK(epr_criterion(damped).value == doctest::Approx(1000.0).epsilon(1e-9));

  // nu = 0 with no extra loss: anti-damped, no steady state.
  const DriftDiffusion unstable = drift_diffusion(matched_rates(1.0, 0.0));
  CHECK_FALSE(unstable.stable);
  CHECK_THROWS_AS(steady_state(matched_rates(1.0, 0.0), 500.0), std::runtime_error);

  CouplingRates negative = matched_rates(1.0, 2.0);
  negative.extra_loss = -1.0;
  CHECK_THROWS_AS(drift_diffusion(negative), std::invalid_argument);

  CHECK(matched_rates(0.3, 1.0).matched());
  CouplingRates off = matched_rates(0.3, 1.0);
  off.mu2 = 0.4;
  CHECK_FALSE(off.matched());
}

TEST_CASE("matched steady state is the two-mode squeezed state") {
  for (double r : {0.1, 0.5, 1.0}) {
    const double ratio = std::tanh(r);
    const EPRState ss = steady_state(matched_rates(ratio, 1.0), 500.0);
    const EPRState tms = two_mode_squeezed_state(r, 500.0);
    CHECK((ss.cov4 - tms.cov4).norm() < 1e-9);

    // ODE-integration oracle: the independent Euler run lands on the same
    // covariance.
    const DriftDiffusion dd = drift_diffusion(matched_rates(ratio, 1.0));
    const Eigen::Matrix4d euler = euler_integrate(dd, 60.0 / (1.0 - ratio * ratio), 1e-3);
    CHECK((euler - ss.cov4).norm() < 1e-4);
  }
}

TEST_CASE("steady-state criterion matches the closed form over the rate sweep") {
  const double j = 500.0;
  for (int i = 0; i <= 19; ++i) {
    const double ratio = 0.05 * i;  // mu/nu in [0, 0.95]
    const EPRState ss = steady_state(matched_rates(ratio, 1.0), j);
    const double closed = 2.0 * j * (1.0 - ratio) / (1.0 + ratio);
    CHECK(std::abs(epr_criterion(ss).value - closed) < 1e-8 * closed);
  }

  // mu/nu = 1/3 gives exactly half the boundary: value = J.
  const EPRState half = steady_state(matched_rates(1.0 / 3.0, 1.0), j);
  CHECK(epr_criterion(half).value == doctest::Approx(j).epsilon(1e-10));
}

TEST_CASE("uncorrelated loss washes out the entanglement") {
  const double j = 500.0;
  double prev = 0.0;
  for (double loss : {0.0, 1.0, 10.0, 100.0}) {
    const double value = epr_criterion(steady_state(matched_rates(0.5, 1.0, loss), j)).value;
    CHECK(value >= prev);  // monotone toward the boundary
    prev = value;
  }
  CHECK(prev < 2.0 * j + 1e-6);
  CHECK(prev == doctest::Approx(2.0 * j).epsilon(0.05));  // loss-dominated limit
}

TEST_CASE("lyapunov residual of the steady state") {
  const CouplingRates rates = matched_rates(0.6, 1.0, 0.2);
  const DriftDiffusion dd = drift_diffusion(rates);
  const EPRState ss = steady_state(rates, 500.0);
  const Eigen::Matrix4d residual =
      dd.drift * ss.cov4 + ss.cov4 * dd.drift.transpose() + dd.diffusion;
  CHECK(residual.norm() < 1e-10 * ss.cov4.norm());
}

TEST_CASE("time integrator converges to the steady state") {
  const CouplingRates rates = matched_rates(0.5, 1.0);
  const EPRState ss = steady_state(rates, 500.0);
  EPRState s = vacuum_pair(500.0);
  s = evolve_for(s, rates, 60.0, 0.01);
  CHECK((s.cov4 - ss.cov4).norm() < 1e-8);
  CHECK(physical(s));
}

TEST_CASE("integrator order and physicality") {
  const CouplingRates rates = matched_rates(0.5, 1.0);
  EPRState s = vacuum_pair(500.0);

  // dt -> 0 approaches the identity.
  const EPRState tiny = evolve(s, rates, 1e-10);
  CHECK((tiny.cov4 - s.cov4).norm() < 1e-9);

  // Two half steps agree with one full step to O(dt^3).
  const double dt = 0.05;
  const EPRState full = evolve(s, rates, dt);
  const EPRState halves = evolve(evolve(s, rates, dt / 2.0), rates, dt / 2.0);
  CHECK((full.cov4 - halves.cov4).norm() < dt * dt * dt);

  // Physicality holds along the flow.
  EPRState walker = vacuum_pair(500.0);
  for (int i = 0; i < 200; ++i) {
    walker = evolve(walker, rates, 0.05);
    CHECK(physical(walker));
  }
  CHECK_THROWS_AS(evolve(s, rates, 0.0), std::invalid_argument);
}

TEST_CASE("single-party marginal is thermal") {
  CHECK(single_party_variance(two_mode_squeezed_state(0.0, 500.0), 1) ==
        doctest::Approx(0.5).epsilon(1e-12));
  CHECK(single_party_variance(two_mode_squeezed_state(1.0, 500.0), 2) ==
        doctest::Approx(0.5 * std::cosh(2.0)).epsilon(1e-12));

  // The marginal grows with r while the joint EPR variance shrinks.
  double prev_marginal = 0.0, prev_joint = 1e300;
  for (double r : {0.1, 0.4, 0.8, 1.2}) {
    const EPRState s = two_mode_squeezed_state(r, 500.0);
    const double marginal = single_party_variance(s, 1);
    const double joint = epr_criterion(s).value;
    CHECK(marginal > prev_marginal);
    CHECK(joint < prev_joint);
    prev_marginal = marginal;
    prev_joint = joint;
  }
  CHECK_THROWS_AS(single_party_variance(vacuum_pair(500.0), 3), std::invalid_argument);
}

TEST_CASE("rate mismatch degrades the steady-state entanglement") {
  const double j = 500.0;
  const double matched_value =
      epr_criterion(steady_state(matched_rates(0.4, 1.0), j)).value;
  CouplingRates skew = matched_rates(0.4, 1.0);
  skew.mu1 = 0.3;
  skew.mu2 = 0.5;  // same average
  const double skew_value = epr_criterion(steady_state(skew, j)).value;
  CHECK(skew_value > matched_value);
}
