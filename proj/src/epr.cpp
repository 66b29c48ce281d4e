#include "clocknet/epr.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace clocknet {

namespace {

using Cplx = std::complex<double>;
using CVec4 = Eigen::Vector4cd;

Eigen::Matrix4d symplectic_form() {
  Eigen::Matrix4d omega = Eigen::Matrix4d::Zero();
  omega(0, 1) = 1.0;
  omega(1, 0) = -1.0;
  omega(2, 3) = 1.0;
  omega(3, 2) = -1.0;
  return omega;
}

/// Quadrature coefficient vector for L = alpha1 b1 + beta1 b1^dag +
/// alpha2 b2 + beta2 b2^dag, with b = (X + iP)/sqrt(2).
CVec4 jump_coefficients(double alpha1, double beta1, double alpha2, double beta2) {
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  CVec4 c;
  c(0) = (alpha1 + beta1) * inv_sqrt2;
  c(1) = Cplx(0.0, 1.0) * (alpha1 - beta1) * inv_sqrt2;
  c(2) = (alpha2 + beta2) * inv_sqrt2;
  c(3) = Cplx(0.0, 1.0) * (alpha2 - beta2) * inv_sqrt2;
  return c;
}

Eigen::Matrix4d lyapunov_rhs(const DriftDiffusion& dd, const Eigen::Matrix4d& sigma) {
  return dd.drift * sigma + sigma * dd.drift.transpose() + dd.diffusion;
}

}  // namespace

bool CouplingRates::matched(double rel_tol) const {
  const double scale = std::max({mu1, mu2, nu1, nu2, 1e-300});
  return std::abs(mu1 - mu2) <= rel_tol * scale && std::abs(nu1 - nu2) <= rel_tol * scale;
}

EPRState vacuum_pair(double j_len) {
  EPRState s;
  s.j_len = j_len;
  return s;
}

EPRState two_mode_squeezed_state(double r, double j_len) {
  EPRState s;
  s.j_len = j_len;
  const double c = 0.5 * std::cosh(2.0 * r);
  const double q = 0.5 * std::sinh(2.0 * r);
  // Squeezed combinations: X1+X2 and P1-P2.
  s.cov4 << c, 0, -q, 0,
            0, c, 0, q,
            -q, 0, c, 0,
            0, q, 0, c;
  return s;
}

EprCriterionResult epr_criterion(const EPRState& s) {
  if (s.j_len <= 0.0) {
    throw std::invalid_argument("epr_criterion: zero mean spin length");
  }
  const Eigen::Matrix4d& c = s.cov4;
  const double var_x_sum = c(0, 0) + c(2, 2) + 2.0 * c(0, 2);
  const double var_p_diff = c(1, 1) + c(3, 3) - 2.0 * c(1, 3);
  EprCriterionResult res;
  res.value = s.j_len * (var_x_sum + var_p_diff);
  res.entangled = res.value < 2.0 * s.j_len;
  return res;
}

DriftDiffusion drift_diffusion(const CouplingRates& rates) {
  if (rates.mu1 < 0.0 || rates.mu2 < 0.0 || rates.nu1 < 0.0 || rates.nu2 < 0.0 ||
      rates.extra_loss < 0.0) {
    throw std::invalid_argument("drift_diffusion: rates must be nonnegative");
  }
  std::vector<CVec4> jumps;
  // L+ = mu1 b1^dag + nu2 b2, L- = mu2 b2^dag + nu1 b1.
  jumps.push_back(jump_coefficients(0.0, rates.mu1, rates.nu2, 0.0));
  jumps.push_back(jump_coefficients(rates.nu1, 0.0, 0.0, rates.mu2));
  if (rates.extra_loss > 0.0) {
    const double g = std::sqrt(rates.extra_loss);
    jumps.push_back(jump_coefficients(g, 0.0, 0.0, 0.0));
    jumps.push_back(jump_coefficients(0.0, 0.0, g, 0.0));
  }

  Eigen::Matrix4cd gram = Eigen::Matrix4cd::Zero();
  for (const auto& c : jumps) {
    gram += c.conjugate() * c.transpose();
  }
  const Eigen::Matrix4d omega = symplectic_form();

  DriftDiffusion dd;
  dd.drift = omega * gram.imag();
  dd.diffusion = omega * gram.real() * omega.transpose();
  dd.stable = Eigen::EigenSolver<Eigen::Matrix4d>(dd.drift)
                  .eigenvalues()
                  .real()
                  .maxCoeff() < 0.0;
  return dd;
}

EPRState steady_state(const CouplingRates& rates, double j_len) {
  const DriftDiffusion dd = drift_diffusion(rates);
  if (!dd.stable) {
    throw std::runtime_error(
        "steady_state: drift is not stable (nu must exceed mu, or add extra loss)");
  }
  // vec(A S + S A^T) = (I (x) A + A (x) I) vec(S) = -vec(D).
  Eigen::Matrix<double, 16, 16> big = Eigen::Matrix<double, 16, 16>::Zero();
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      for (int k = 0; k < 4; ++k) {
        // (I (x) A): block (j, j) = A; acts on column j of S.
        big(4 * j + i, 4 * j + k) += dd.drift(i, k);
        // (A (x) I): S A^T contributes A(j, k) to coupling of columns.
        big(4 * j + i, 4 * k + i) += dd.drift(j, k);
      }
    }
  }
  Eigen::Matrix<double, 16, 1> rhs;
  for (int j = 0; j < 4; ++j) {
    for (int i = 0; i < 4; ++i) {
      rhs(4 * j + i) = -dd.diffusion(i, j);
    }
  }
  const Eigen::Matrix<double, 16, 1> sol = big.fullPivLu().solve(rhs);
  EPRState s;
  s.j_len = j_len;
  for (int j = 0; j < 4; ++j) {
    for (int i = 0; i < 4; ++i) {
      s.cov4(i, j) = sol(4 * j + i);
    }
  }
  s.cov4 = 0.5 * (s.cov4 + s.cov4.transpose().eval());
  return s;
}

bool physical(const EPRState& s, double tol) {
  Eigen::Matrix4cd m = s.cov4.cast<Cplx>();
  m += Cplx(0.0, 0.5) * symplectic_form().cast<Cplx>();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(m);
  return es.eigenvalues().minCoeff() >= -tol;
}

namespace {

EPRState midpoint_step(const EPRState& s, const DriftDiffusion& dd, double dt, int depth) {
  EPRState half = s;
  half.cov4 = s.cov4 + 0.5 * dt * lyapunov_rhs(dd, s.cov4);
  EPRState out = s;
  out.cov4 = s.cov4 + dt * lyapunov_rhs(dd, half.cov4);
  out.cov4 = 0.5 * (out.cov4 + out.cov4.transpose().eval());
  const Eigen::Matrix4d mean_half =
      Eigen::Matrix4d::Identity() + 0.5 * dt * dd.drift;
  out.mean4 = s.mean4 + dt * (dd.drift * (mean_half * s.mean4));
  if (!physical(out, 1e-7)) {
    if (depth >= 16) {
      throw std::runtime_error("evolve: step halving failed to restore physicality");
    }
    EPRState first = midpoint_step(s, dd, 0.5 * dt, depth + 1);
    return midpoint_step(first, dd, 0.5 * dt, depth + 1);
  }
  return out;
}

}  // namespace

EPRState evolve(const EPRState& s, const CouplingRates& rates, double dt) {
  if (dt <= 0.0) {
    throw std::invalid_argument("evolve: dt must be positive");
  }
  return midpoint_step(s, drift_diffusion(rates), dt, 0);
}

EPRState evolve_for(const EPRState& s, const CouplingRates& rates, double total_time,
                    double dt) {
  const DriftDiffusion dd = drift_diffusion(rates);
  EPRState out = s;
  double t = 0.0;
  while (t < total_time) {
    const double step = std::min(dt, total_time - t);
    out = midpoint_step(out, dd, step, 0);
    t += step;
  }
  return out;
}

double single_party_variance(const EPRState& s, int party) {
  if (party != 1 && party != 2) {
    throw std::invalid_argument("single_party_variance: party must be 1 or 2");
  }
  const int i = (party == 1) ? 0 : 2;
  return 0.5 * (s.cov4(i, i) + s.cov4(i + 1, i + 1));
}

}  // namespace clocknet
