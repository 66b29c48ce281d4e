#include "clocknet/protocol.hpp"

#include <cmath>
#include <stdexcept>

namespace clocknet {

double normal_quantile(double p) {
  if (p <= 0.0 || p >= 1.0) {
    throw std::invalid_argument("normal_quantile: p must be in (0, 1)");
  }
  // Acklam's rational approximation, |relative error| < 1.15e-9.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double q, r;
  if (p < plow) {
    q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - plow) {
    q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  q = p - 0.5;
  r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

double chi_square_quantile(double p, double dof) {
  if (dof <= 0.0) {
    throw std::invalid_argument("chi_square_quantile: dof must be positive");
  }
  const double z = normal_quantile(p);
  const double t = 2.0 / (9.0 * dof);
  const double w = 1.0 - t + z * std::sqrt(t);
  return dof * w * w * w;
}

ProtocolTranscript secret_time_protocol(const EPRState& s, long long rounds,
                                        const std::optional<Eavesdropper>& eve,
                                        std::uint64_t seed,
                                        const ProtocolOptions& opts) {
  if (rounds < opts.min_rounds) {
    throw std::invalid_argument("secret_time_protocol: too few rounds for the variance test");
  }
  if (s.j_len <= 0.0) {
    throw std::invalid_argument("secret_time_protocol: invalid state");
  }

  Rng rng(seed);
  const Eigen::Matrix4d chol = s.cov4.llt().matrixL();

  ProtocolTranscript tr;
  tr.rounds.reserve(static_cast<std::size_t>(rounds));
  tr.expected_variance = epr_criterion(s).value / (2.0 * s.j_len);

  double sum = 0.0, sum_sq = 0.0;
  for (long long i = 0; i < rounds; ++i) {
    // Fresh dissipatively prepared copy of the joint state each round.
    Eigen::Vector4d z;
    for (int k = 0; k < 4; ++k) z(k) = rng.normal();
    Eigen::Vector4d q = s.mean4 + chol * z;  // (X1, P1, X2, P2)

    RoundRecord rec;
    rec.choice1 = rng.bit();
    rec.choice2 = rng.bit();

    // Physical quadratures: party 2's J_y measurement reads -P2 under the
    // antiparallel convention.
    double x2 = q(2);
    double y2 = -q(3);

    if (eve) {
      const bool eve_basis_y = rng.bit();
      const double intercepted = (eve_basis_y ? y2 : x2) +
                                 rng.normal(0.0, std::sqrt(eve->meter_noise_var));
      const double resend_sigma = std::sqrt(eve->resend_noise_var);
      if (eve_basis_y) {
        y2 = intercepted + rng.normal(0.0, resend_sigma);
        x2 = rng.normal(0.0, resend_sigma);
      } else {
        x2 = intercepted + rng.normal(0.0, resend_sigma);
        y2 = rng.normal(0.0, resend_sigma);
      }
    }

    rec.outcome1 = rec.choice1 ? q(1) : q(0);  // P1 (= J_y1) or X1 (= J_z1)
    rec.outcome2 = rec.choice2 ? y2 : x2;
    rec.sifted = (rec.choice1 == rec.choice2);
    if (rec.sifted) {
      const double joint = rec.outcome1 + rec.outcome2;
      sum += joint;
      sum_sq += joint * joint;
      ++tr.sifted_rounds;
    }
    tr.rounds.push_back(rec);
  }

  tr.sift_fraction = static_cast<double>(tr.sifted_rounds) / static_cast<double>(rounds);
  if (tr.sifted_rounds < 2) {
    throw std::runtime_error("secret_time_protocol: not enough sifted rounds");
  }
  const double n = static_cast<double>(tr.sifted_rounds);
  const double mean = sum / n;
  tr.joint_variance = (sum_sq - n * mean * mean) / (n - 1.0);

  const double dof = n - 1.0;
  tr.stat_low = chi_square_quantile(0.5 * opts.significance, dof);
  tr.stat_high = chi_square_quantile(1.0 - 0.5 * opts.significance, dof);
  const double stat = dof * tr.joint_variance / tr.expected_variance;
  tr.eavesdrop_flag = (stat < tr.stat_low) || (stat > tr.stat_high);
  return tr;
}

}  // namespace clocknet
