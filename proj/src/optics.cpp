#include "clocknet/optics.hpp"

#include <cmath>
#include <stdexcept>

namespace clocknet {

double ProbePulse::eta() const {
  if (delta == 0.0) {
    throw std::invalid_argument("ProbePulse: zero detuning");
  }
  const double ratio = gamma / delta;
  return n_dr * ratio * ratio * sigma_over_a;
}

double CavityParams::finesse() const {
  const double budget = t1 + t2 + 2.0 * loss;
  if (budget <= 0.0) {
    throw std::invalid_argument("CavityParams: mirror budget must be positive");
  }
  return 2.0 * M_PI / budget;
}

bool CavityParams::small_parameter_ok(double threshold) const {
  return t1 + t2 + 2.0 * loss < threshold;
}

double kappa_free(double d, double eta) {
  if (d <= 0.0) {
    throw std::invalid_argument("kappa_free: optical depth must be positive");
  }
  if (eta < 0.0) {
    throw std::invalid_argument("kappa_free: eta must be >= 0");
  }
  return std::sqrt(d * eta * std::exp(-eta));
}

double kappa_cavity(double d, double finesse, double eta_n) {
  if (finesse <= 0.0) {
    throw std::invalid_argument("kappa_cavity: finesse must be positive");
  }
  return kappa_free(d, eta_n) * 2.0 * finesse / M_PI;
}

double kappa_cavity_substituted(double d, double finesse, double eta_cav) {
  if (d <= 0.0 || finesse <= 0.0) {
    throw std::invalid_argument("kappa_cavity_substituted: d and finesse must be positive");
  }
  if (eta_cav < 0.0) {
    throw std::invalid_argument("kappa_cavity_substituted: eta_cav must be >= 0");
  }
  return std::sqrt(4.0 * d * finesse * eta_cav * std::exp(-eta_cav) / M_PI);
}

double eta_cav(double eta_n, double finesse) {
  if (eta_n < 0.0 || finesse <= 0.0) {
    throw std::invalid_argument("eta_cav: eta_n >= 0 and finesse > 0 required");
  }
  return eta_n * finesse / M_PI;
}

double xi_closed_form(double kappa, double eta) {
  return 1.0 / (std::exp(-eta) * (1.0 + kappa * kappa));
}

namespace {

void check_state(const CollectiveSpin& s) {
  if (s.j_len <= 0.0 || !std::isfinite(s.j_len)) {
    throw std::invalid_argument("qnd: state has no mean spin");
  }
  if (s.cov.determinant() <= 0.0 || s.cov(0, 0) <= 0.0) {
    throw std::invalid_argument("qnd: state covariance not positive definite");
  }
}

/// Shared measurement core: outcome = kappa (offset + t.r) + P_L shot noise,
/// with back-action kappa^2/2 on the conjugate of the measured quadrature and
/// the conditional (Kalman-style) contraction of the covariance.
QndResult measure_quadrature(const CollectiveSpin& s, const Eigen::Vector2d& t,
                             double offset, double kappa, Rng& rng) {
  check_state(s);
  if (kappa < 0.0) {
    throw std::invalid_argument("qnd: kappa must be >= 0");
  }

  const double var_y = t.dot(s.cov * t);
  const double mean_y = offset + t.dot(s.quad_mean);
  const double noise_var = 0.5 + kappa * kappa * var_y;
  const double outcome = rng.normal(kappa * mean_y, std::sqrt(noise_var));

  CollectiveSpin out = s;

  // Back-action on the conjugate quadrature (t and q commute canonically).
  const Eigen::Vector2d q(-t.y(), t.x());
  out.cov += 0.5 * kappa * kappa * q * q.transpose();

  if (kappa > 0.0) {
    const Eigen::Vector2d cross = kappa * (s.cov * t);
    out.quad_mean += cross / noise_var * (outcome - kappa * mean_y);
    out.cov -= cross * cross.transpose() / noise_var;
    out.cov = 0.5 * (out.cov + out.cov.transpose().eval());
  }
  return {out, outcome};
}

}  // namespace

QndResult qnd_update(const CollectiveSpin& s, double kappa, double eta, Rng& rng) {
  QndResult res = measure_quadrature(s, Eigen::Vector2d(1.0, 0.0), 0.0, kappa, rng);
  res.state = apply_decoherence(res.state, eta);
  return res;
}

QndResult qnd_measure_along(const CollectiveSpin& s, const Eigen::Vector3d& lab_dir,
                            double kappa, Rng& rng) {
  const Eigen::Vector3d c = frame_components(s, lab_dir);
  const Eigen::Vector2d t(c.x(), c.y());
  const double offset = std::sqrt(s.j_len) * c.z();
  return measure_quadrature(s, t, offset, kappa, rng);
}

PhaseShiftResult phase_shift(const CollectiveSpin& s, const ProbePulse& probe,
                             const CavityParams& cav) {
  if (probe.n_det < 1.0) {
    throw std::invalid_argument("phase_shift: at least one detected photon required");
  }
  if (probe.delta == 0.0) {
    throw std::invalid_argument("phase_shift: zero detuning");
  }
  const double ratio = probe.gamma / probe.delta;
  const double eta_n = probe.n_det * ratio * ratio * probe.sigma_over_a;
  PhaseShiftResult r;
  r.shot_noise_rms = 1.0 / std::sqrt(probe.n_det);
  r.mean = std::sqrt(cav.d * std::exp(-eta_n)) * ratio *
           std::sqrt(probe.sigma_over_a) * (2.0 * cav.finesse() / M_PI) *
           s.quad_mean(0);
  return r;
}

TransmissionResult cavity_transmission(const CavityParams& cav, double d_delta) {
  const double budget = cav.t1 + cav.t2 + 2.0 * cav.loss;
  const double denom = budget + 2.0 * d_delta;
  if (denom == 0.0 || budget == 0.0) {
    throw std::invalid_argument("cavity_transmission: zero denominator");
  }
  TransmissionResult r;
  r.exact = 4.0 * cav.t1 * cav.t2 / (denom * denom);
  r.first_order = 4.0 * cav.t1 * cav.t2 / (budget * budget) *
                  (1.0 - 2.0 * cav.finesse() * d_delta / M_PI);
  return r;
}

CooperativityResult cooperativity_check(const CavityParams& cav, double omega_collective,
                                        double gamma, double rel_tol) {
  if (omega_collective <= 0.0 || gamma <= 0.0 || cav.big_gamma <= 0.0) {
    throw std::invalid_argument("cooperativity_check: rates must be positive");
  }
  CooperativityResult r;
  r.value = omega_collective * omega_collective / (cav.big_gamma * gamma);
  r.expected = cav.d * cav.finesse();
  r.rel_deviation = std::abs(r.value - r.expected) / r.expected;
  r.consistent = r.rel_deviation <= rel_tol;
  return r;
}

bool hp_validity(double sigma_over_a, double finesse) {
  if (sigma_over_a <= 0.0 || finesse <= 0.0) {
    throw std::invalid_argument("hp_validity: inputs must be positive");
  }
  return sigma_over_a * finesse < 2.0 * M_PI * M_E;
}

}  // namespace clocknet
