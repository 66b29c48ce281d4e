#pragma once

#include <Eigen/Dense>

#include "clocknet/rng.hpp"
#include "clocknet/spin.hpp"

namespace clocknet {

/// Probe-light parameters. `n_dr` is the driving photon number (free-space
/// context), `n_det` the detected photon number (cavity context).
struct ProbePulse {
  double n_dr = 0.0;
  double n_det = 0.0;
  double gamma = 0.0;          // Hz, natural linewidth of the probe transition
  double delta = 0.0;          // Hz, signed detuning from the cyclic transition
  double sigma_over_a = 0.0;   // resonant cross section over beam area

  /// Spontaneous-emission parameter eta = n_dr (gamma/delta)^2 sigma/A.
  double eta() const;
};

struct CavityParams {
  double t1 = 0.0;             // input mirror power transmission, in (0,1)
  double t2 = 0.0;             // output mirror power transmission, in (0,1)
  double loss = 0.0;           // single-pass intracavity power loss
  double length = 0.0;         // meters, metadata
  double big_gamma = 0.0;      // Hz, cavity linewidth
  double omega_single = 0.0;   // Hz, single-atom vacuum Rabi frequency (metadata)
  double d = 0.0;              // resonant single-pass optical depth

  /// F = 2 pi / (T1 + T2 + 2L).
  double finesse() const;

  /// True when the mirror budget satisfies the small-parameter regime
  /// T1 + T2 + 2L << 1 under which the finesse formula holds.
  bool small_parameter_ok(double threshold = 0.1) const;
};

/// Free-space QND interaction constant kappa = sqrt(d eta e^{-eta}).
double kappa_free(double d, double eta);

/// Cavity-enhanced interaction constant sqrt(d eta_n e^{-eta_n}) * 2F/pi.
double kappa_cavity(double d, double finesse, double eta_n);

/// Convenience form written in terms of the in-cavity decoherence
/// eta_cav = eta_n F/pi: sqrt(4 d F eta_cav e^{-eta_cav} / pi). Differs from
/// kappa_cavity by the exponent carrying eta_cav instead of eta_n.
double kappa_cavity_substituted(double d, double finesse, double eta_cav);

/// eta_cav = eta_n * F / pi.
double eta_cav(double eta_n, double finesse);

/// Closed-form squeezing after a QND measurement from a CSS:
/// xi = 1 / (e^{-eta} (1 + kappa^2)).
double xi_closed_form(double kappa, double eta);

struct QndResult {
  CollectiveSpin state;
  double outcome = 0.0;
};

/// Conditional Gaussian update for a homodyne readout of P_L^out = P_L + kappa X_A,
/// followed by decoherence eta. The returned outcome is sampled from the full
/// predictive distribution (mean kappa <X_A>, shot noise 1/2 plus the atomic
/// contribution kappa^2 Var(X_A)).
QndResult qnd_update(const CollectiveSpin& s, double kappa, double eta, Rng& rng);

/// Same measurement physics, but of the spin projection along an arbitrary lab
/// direction (outcome = kappa J.dir/sqrt(J) + shot noise); no decoherence is
/// applied. The mean-spin component of the projection enters the outcome as a
/// deterministic offset. Used by the clock sequence where the probe addresses
/// lab J_z while the mean spin wanders with pulse errors.
QndResult qnd_measure_along(const CollectiveSpin& s, const Eigen::Vector3d& lab_dir,
                            double kappa, Rng& rng);

struct PhaseShiftResult {
  double mean = 0.0;            // radians
  double shot_noise_rms = 0.0;  // radians
};

/// Observed probe phase shift: shot noise n^{-1/2} plus the cavity-enhanced
/// term sqrt(d e^{-eta_n}) (gamma/Delta) sqrt(sigma/A) (2F/pi) <X_A>.
PhaseShiftResult phase_shift(const CollectiveSpin& s, const ProbePulse& probe,
                             const CavityParams& cav);

struct TransmissionResult {
  double exact = 0.0;        // 4 T1 T2 / (T1 + T2 + 2L + 2 d_Delta)^2
  double first_order = 0.0;  // 4 T1 T2 / (T1 + T2 + 2L)^2 [1 - 2 F d_Delta / pi]
};

TransmissionResult cavity_transmission(const CavityParams& cav, double d_delta);

struct CooperativityResult {
  double value = 0.0;        // Omega^2 / (Gamma gamma)
  double expected = 0.0;     // d * F
  double rel_deviation = 0.0;
  bool consistent = false;
};

/// Collective cooperativity Omega^2/(Gamma gamma), checked against d*F.
CooperativityResult cooperativity_check(const CavityParams& cav, double omega_collective,
                                        double gamma, double rel_tol = 0.05);

/// Holstein-Primakoff validity of the cavity-enhanced readout: sigma F / A < 2 pi e.
bool hp_validity(double sigma_over_a, double finesse);

}  // namespace clocknet
