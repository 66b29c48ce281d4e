#pragma once

#include <cstdint>
#include <vector>

#include "clocknet/rng.hpp"

namespace clocknet {

/// Monte Carlo configuration for the full entangled-clock Ramsey sequence:
/// state preparation, pi/2 pulse, double QND readout with a pi swap in
/// between, squeezing-to-coherence conversion, precession and destructive
/// population readout. The clock operates at the side of the Ramsey fringe,
/// so `precession_angle` is the (small) phase accumulated relative to the
/// quadrature point.
struct SequenceConfig {
  long long n_atoms = 1000;
  double kappa_total = 0.0;  // total QND interaction constant; 0 = CSS control
  double eta_total = 0.0;    // total probe-induced decoherence
  double stark_coeff = 0.0;  // mean light-shift angle per driving photon
  double n_dr = 0.0;         // driving photons per probe (feeds the Stark model)
  bool flip_second_detuning = true;  // probe pair at +Delta/-Delta vs +Delta/+Delta
  double precession_angle = 0.0;     // radians, the "true" phase to estimate
  double pulse_error_rms = 0.0;      // radians
  double atom_jitter_rms = 0.0;      // fractional atom-number jitter
  double detector_noise_var = 0.0;   // extra readout noise in units of J_z^2
  long long shots = 10000;
  std::uint64_t seed = 1;
  double hp_ratio = 0.1;  // Holstein-Primakoff validity threshold
};

struct ShotRecord {
  double qnd1_outcome = 0.0;
  double qnd2_outcome = 0.0;
  double final_population_signal = 0.0;  // destructive J_z readout
  double estimator = 0.0;                // inferred precession angle
};

struct SequenceSummary {
  long long shots = 0;
  double mean_estimator = 0.0;
  double std_estimator = 0.0;
  double std_error_of_mean = 0.0;
  double xi_predicted = 0.0;   // closed-form squeezing for (kappa_total, eta_total)
  double predicted_std = 0.0;  // sqrt(xi_predicted / N)
};

struct SequenceResult {
  std::vector<ShotRecord> records;
  SequenceSummary summary;
};

SequenceResult run_sequence(const SequenceConfig& cfg);

struct StarkCheckResult {
  double residual_mean_flipped = 0.0;  // mean estimator bias, +Delta/-Delta probing
  double residual_se_flipped = 0.0;
  double residual_mean_same = 0.0;     // mean estimator bias, +Delta/+Delta probing
  double residual_se_same = 0.0;
  double single_probe_shift = 0.0;     // model value stark_coeff * n_dr
};

/// Runs the sequence at zero precession angle in both detuning modes and
/// reports the residual mean phase of each.
StarkCheckResult stark_cancellation_check(const SequenceConfig& cfg);

struct PrecisionScanRow {
  long long n_atoms = 0;
  double measured = 0.0;   // empirical estimator standard deviation
  double predicted = 0.0;  // sqrt(xi / N)
  double reference = 0.0;  // 1/N guide line (QND) or 1/sqrt(N) (CSS)
};

struct PrecisionScanResult {
  std::vector<PrecisionScanRow> rows;
  double slope = 0.0;  // log-log slope of measured precision vs N
};

/// Sweeps the atom number; with d_per_atom > 0 the free-space QND interaction
/// is recomputed per point with d = d_per_atom * N (cyclic-transition regime),
/// with d_per_atom = 0 the CSS control is run.
PrecisionScanResult precision_scan(const SequenceConfig& cfg,
                                   const std::vector<long long>& n_list,
                                   double d_per_atom);

}  // namespace clocknet
