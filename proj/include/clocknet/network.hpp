#pragma once

#include <vector>

namespace clocknet {

struct ChainClock {
  long long n_atoms = 0;
  double d = 0.0;        // resonant single-pass optical depth
  double finesse = 0.0;
  double eta = 0.5;      // probe decoherence budget for this clock
};

struct ChannelSegment {
  double r = 0.0;  // attenuation exponent, transmission e^{-r}
};

enum class TransmissionConvention {
  per_hop_exponent,
  total_over_m,
  total_over_m_minus_1,
};

/// Ordered chain of clocks probed by one cascaded QND beam. Index 0 is the
/// clock farthest from the detector; segments[i] is the channel from clock i
/// toward the detector side (the last segment connects the final clock to the
/// detector and may be lossless).
struct ChainConfig {
  std::vector<ChainClock> clocks;
  std::vector<ChannelSegment> segments;
  TransmissionConvention convention = TransmissionConvention::total_over_m;

  void validate() const;

  /// Accumulated attenuation r_i from clock i to the detector.
  std::vector<double> accumulated_attenuation() const;
};

/// Per-clock S/N contribution sqrt(4 d N F_i eta_i e^{-2 eta_i} e^{-r_i} / pi).
double chain_snr_term(const ChainClock& clock, double r_accumulated);

/// Collective S/N of the chain: sum of the per-clock terms.
double chain_snr(const ChainConfig& cfg);

/// Finesse profile F_i = F_M e^{(i-M) r} that pins every eta_i at its budget
/// for a fixed detected photon number. Requires uniform per-hop attenuation.
std::vector<double> allocate_finesse(double f_last, const ChainConfig& cfg);

/// Precision improvement of an M-clock chain over a single clock with finesse
/// F_M: sum_{k=0}^{M-1} e^{-k r}. The per-hop exponent r is derived from the
/// total transmission according to the chosen convention.
double chain_improvement(int m, double total_transmission, TransmissionConvention conv);

struct ChainPrecisionResult {
  double exact = 0.0;       // (S/N)^{-1} from the full sum
  double asymptotic = 0.0;  // dense-chain closed form (4dNF_M/pi e)^{-1/2} r
  bool diverged = false;    // true when the two differ by more than 10%
};

/// Chain precision with the optimal finesse allocation and eta = 1/2.
ChainPrecisionResult chain_precision(int m, double r, double d, long long n_atoms,
                                     double f_last);

struct OptimizeOptions {
  bool free_eta = true;       // optimize per-clock eta at fixed finesse
  bool free_finesse = false;  // optimize per-clock finesse under a photon budget
  // Photon-budget coupling: realized eta_i = coupling * e^{r_i} * F_i. Each
  // clock's `eta` field acts as the decoherence cap in this mode.
  double coupling = 0.0;
  double eta_lo = 1e-9;
  double eta_hi = 4.0;
  double finesse_hi = 1e9;
  double rel_tol = 1e-10;  // convergence: relative S/N gain per sweep
  int max_sweeps = 200;
};

struct OptimizeResult {
  ChainConfig config;
  double snr = 0.0;
  int sweeps = 0;
  bool converged = false;
};

/// Deterministic coordinate descent (golden-section line searches per
/// coordinate) maximizing chain_snr.
OptimizeResult optimize_chain(const ChainConfig& cfg, const OptimizeOptions& opts);

/// Uniform chain builder: m identical clocks, per-hop attenuation r, finesse
/// allocated as F_i = f_last e^{(i-M) r}, lossless final segment.
ChainConfig make_uniform_chain(int m, long long n_atoms, double d, double f_last,
                               double r, double eta = 0.5);

}  // namespace clocknet
