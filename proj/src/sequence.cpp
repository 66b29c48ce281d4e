#include "clocknet/sequence.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "clocknet/optics.hpp"
#include "clocknet/spin.hpp"

namespace clocknet {

namespace {

double clamp_unit(double x) { return std::clamp(x, -1.0, 1.0); }

struct ShotOutput {
  ShotRecord record;
  bool aborted = false;
};

ShotOutput run_one_shot(const SequenceConfig& cfg, Rng& rng) {
  const Eigen::Vector3d z = Eigen::Vector3d::UnitZ();
  const long long n_nom = cfg.n_atoms;
  const double j_bar0 = 0.5 * static_cast<double>(n_nom);

  // (a) prepare all atoms in |1>: mean spin +z, with jittered atom number.
  long long n_act = n_nom;
  if (cfg.atom_jitter_rms > 0.0) {
    n_act = std::max<long long>(
        1, std::llround(static_cast<double>(n_nom) *
                        (1.0 + rng.normal(0.0, cfg.atom_jitter_rms))));
  }
  CollectiveSpin s = new_css(n_act, z);

  // (b) pi/2 about y: mean spin to +x, clock superposition.
  s = rotate(s, Axis::Y, M_PI / 2.0, cfg.pulse_error_rms, &rng);

  // (c) double QND of lab J_z with a pi swap in between. Each probe carries
  // half of the photon budget: kappa_1^2 = kappa^2/2, eta_1 = eta/2.
  const double kappa1 = cfg.kappa_total / std::sqrt(2.0);
  const double eta1 = 0.5 * cfg.eta_total;
  // Common-mode population offset seen by the probe (atom-number jitter).
  const double common =
      (static_cast<double>(n_act) - static_cast<double>(n_nom)) /
      (2.0 * std::sqrt(j_bar0));
  double stark_phase = 0.0;

  QndResult q1 = qnd_measure_along(s, z, kappa1, rng);
  const double o1 = q1.outcome + kappa1 * common;
  s = apply_decoherence(q1.state, eta1);
  stark_phase += cfg.stark_coeff * cfg.n_dr;

  s = rotate(s, Axis::X, M_PI, cfg.pulse_error_rms, &rng);

  QndResult q2 = qnd_measure_along(s, z, kappa1, rng);
  const double o2 = q2.outcome + kappa1 * common;
  s = apply_decoherence(q2.state, eta1);
  stark_phase += (cfg.flip_second_detuning ? -1.0 : 1.0) * cfg.stark_coeff * cfg.n_dr;

  if (!hp_valid(s, cfg.hp_ratio)) {
    return {ShotRecord{o1, o2, 0.0, 0.0}, true};
  }

  // Experimenter's squeezed J_z reference from the two outcomes: the swap
  // flips the sign of the spin signal while the common mode cancels.
  const double sigma0_sq =
      0.5 + j_bar0 * cfg.pulse_error_rms * cfg.pulse_error_rms;
  const double o_diff = 0.5 * (o1 - o2);
  const double gain =
      (kappa1 > 0.0)
          ? kappa1 * sigma0_sq / (kappa1 * kappa1 * sigma0_sq + 0.25)
          : 0.0;
  const double z_hat = gain * o_diff;  // estimate of pre-swap J_z / sqrt(J)
  // The reference phase is subtracted at readout time, where the mean spin has
  // already decayed to e^{-eta} J; the quadrature offset rides at sqrt(J_end).
  const double theta_ref = z_hat / std::sqrt(j_bar0 * std::exp(-cfg.eta_total));

  // (d) pi/2 about x: J_z squeezing becomes coherence (phase) squeezing.
  s = rotate(s, Axis::X, M_PI / 2.0, cfg.pulse_error_rms, &rng);

  // (e) precession at the side of the fringe, plus the residual light shift.
  s = rotate(s, Axis::Z, M_PI / 2.0 + cfg.precession_angle + stark_phase, 0.0);

  // (f) pi/2 about y and destructive population readout.
  s = rotate(s, Axis::Y, M_PI / 2.0, cfg.pulse_error_rms, &rng);
  const double m_z = sample_spin_along(s, z, rng, cfg.detector_noise_var);

  const double j_bar_end = j_bar0 * std::exp(-cfg.eta_total);
  const double psi = std::asin(clamp_unit(m_z / j_bar_end));
  const double estimator = psi - theta_ref;
  return {ShotRecord{o1, o2, m_z, estimator}, false};
}

}  // namespace

SequenceResult run_sequence(const SequenceConfig& cfg) {
  if (cfg.shots < 1) {
    throw std::invalid_argument("run_sequence: shots must be >= 1");
  }
  if (cfg.pulse_error_rms < 0.0 || cfg.atom_jitter_rms < 0.0) {
    throw std::invalid_argument("run_sequence: jitter parameters must be >= 0");
  }
  Rng master(cfg.seed);

  SequenceResult res;
  res.records.reserve(static_cast<std::size_t>(cfg.shots));
  double sum = 0.0, sum_sq = 0.0;
  long long aborted = 0;
  for (long long i = 0; i < cfg.shots; ++i) {
    Rng shot_rng = master.child(static_cast<std::uint64_t>(i));
    ShotOutput out = run_one_shot(cfg, shot_rng);
    if (out.aborted) {
      if (++aborted == cfg.shots) {
        throw std::runtime_error(
            "run_sequence: every shot violated the Holstein-Primakoff bound "
            "(antisqueezed variance exceeds hp_ratio * J); raise hp_ratio or "
            "reduce kappa");
      }
      continue;
    }
    sum += out.record.estimator;
    sum_sq += out.record.estimator * out.record.estimator;
    res.records.push_back(out.record);
  }

  const double n = static_cast<double>(res.records.size());
  res.summary.shots = res.records.size();
  res.summary.mean_estimator = sum / n;
  res.summary.std_estimator =
      (n > 1.0) ? std::sqrt((sum_sq - sum * sum / n) / (n - 1.0)) : 0.0;
  res.summary.std_error_of_mean = res.summary.std_estimator / std::sqrt(n);
  res.summary.xi_predicted = xi_closed_form(cfg.kappa_total, cfg.eta_total);
  res.summary.predicted_std =
      std::sqrt(res.summary.xi_predicted / static_cast<double>(cfg.n_atoms));
  return res;
}

StarkCheckResult stark_cancellation_check(const SequenceConfig& cfg) {
  SequenceConfig flipped = cfg;
  flipped.precession_angle = 0.0;
  flipped.flip_second_detuning = true;
  SequenceConfig same = flipped;
  same.flip_second_detuning = false;
  same.seed = cfg.seed + 1;

  const SequenceResult a = run_sequence(flipped);
  const SequenceResult b = run_sequence(same);

  StarkCheckResult r;
  r.residual_mean_flipped = a.summary.mean_estimator;
  r.residual_se_flipped = a.summary.std_error_of_mean;
  r.residual_mean_same = b.summary.mean_estimator;
  r.residual_se_same = b.summary.std_error_of_mean;
  r.single_probe_shift = cfg.stark_coeff * cfg.n_dr;
  return r;
}

PrecisionScanResult precision_scan(const SequenceConfig& cfg,
                                   const std::vector<long long>& n_list,
                                   double d_per_atom) {
  if (n_list.size() < 2) {
    throw std::invalid_argument("precision_scan: at least two atom numbers required");
  }
  PrecisionScanResult res;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    SequenceConfig point = cfg;
    point.n_atoms = n_list[i];
    point.seed = cfg.seed + 1000 * i;
    if (d_per_atom > 0.0) {
      const double d = d_per_atom * static_cast<double>(point.n_atoms);
      point.kappa_total = kappa_free(d, point.eta_total);
    } else {
      point.kappa_total = 0.0;
    }
    const SequenceResult run = run_sequence(point);
    PrecisionScanRow row;
    row.n_atoms = point.n_atoms;
    row.measured = run.summary.std_estimator;
    row.predicted = run.summary.predicted_std;
    row.reference = (d_per_atom > 0.0)
                        ? 1.0 / static_cast<double>(point.n_atoms)
                        : 1.0 / std::sqrt(static_cast<double>(point.n_atoms));
    res.rows.push_back(row);
    const double x = std::log(static_cast<double>(row.n_atoms));
    const double y = std::log(row.measured);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(res.rows.size());
  res.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return res;
}

}  // namespace clocknet
