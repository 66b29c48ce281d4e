#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "clocknet/epr.hpp"
#include "clocknet/rng.hpp"

namespace clocknet {

/// Intercept-resend attack on clock 2's half of the EPR pair: the
/// eavesdropper measures a randomly guessed quadrature with a vacuum-limited
/// meter and resends a freshly prepared state centered on her outcome.
struct Eavesdropper {
  double meter_noise_var = 0.5;   // variance added by the measurement
  double resend_noise_var = 0.5;  // variance of the re-prepared state
};

struct RoundRecord {
  bool choice1 = false;  // true = party applied the pi/2 rotation
  bool choice2 = false;
  double outcome1 = 0.0;
  double outcome2 = 0.0;
  bool sifted = false;
};

struct ProtocolOptions {
  double significance = 0.01;  // two-sided false-alarm rate of the variance test
  long long min_rounds = 16;
};

struct ProtocolTranscript {
  std::vector<RoundRecord> rounds;
  long long sifted_rounds = 0;
  double sift_fraction = 0.0;
  double joint_variance = 0.0;     // sample variance of sifted joint outcomes
  double expected_variance = 0.0;  // criterion value / (2J), the no-attack value
  double stat_low = 0.0;           // acceptance band for the variance statistic
  double stat_high = 0.0;
  bool eavesdrop_flag = false;
};

/// Secret-time-sharing rounds over a shared EPR state: random pi/2 choices,
/// public sifting on matching choices, and a two-sided chi-square variance
/// test on the sifted joint outcomes against the no-attack expectation.
ProtocolTranscript secret_time_protocol(const EPRState& s, long long rounds,
                                        const std::optional<Eavesdropper>& eve,
                                        std::uint64_t seed,
                                        const ProtocolOptions& opts = {});

/// Standard normal quantile (Acklam's rational approximation).
double normal_quantile(double p);

/// Chi-square quantile via the Wilson-Hilferty transform; accurate for the
/// large degree-of-freedom regime the protocol operates in.
double chi_square_quantile(double p, double dof);

}  // namespace clocknet
