#pragma once

#include <Eigen/Dense>

namespace clocknet {

/// Joint Gaussian state of two oppositely oriented clocks in the quadrature
/// basis (X1, P1, X2, P2). The antiparallel Holstein-Primakoff convention is
/// X1 = J_z1/sqrt(J), P1 = J_y1/sqrt(J), X2 = J_z2/sqrt(J), P2 = -J_y2/sqrt(J),
/// so both mode pairs obey the canonical commutator. With this convention the
/// spin sums map to J_z1 + J_z2 = sqrt(J)(X1 + X2) and
/// J_y1 + J_y2 = sqrt(J)(P1 - P2).
struct EPRState {
  Eigen::Matrix4d cov4 = Eigen::Matrix4d::Identity() * 0.5;
  Eigen::Vector4d mean4 = Eigen::Vector4d::Zero();
  double j_len = 0.0;
};

/// Effective six-wave-mixing coupling rates. The collective jump operators
/// after adiabatic elimination of the traveling light are
/// L+ = mu1 b1^dag + nu2 b2 and L- = mu2 b2^dag + nu1 b1; `extra_loss` adds an
/// uncorrelated vacuum decay channel per mode.
struct CouplingRates {
  double mu1 = 0.0;
  double mu2 = 0.0;
  double nu1 = 0.0;
  double nu2 = 0.0;
  double extra_loss = 0.0;

  bool matched(double rel_tol = 1e-9) const;
};

/// Two independent vacuum-noise clocks (the unentangled reference).
EPRState vacuum_pair(double j_len);

/// Ideal two-mode squeezed covariance of parameter r (the matched steady
/// state with tanh r = mu/nu).
EPRState two_mode_squeezed_state(double r, double j_len);

struct EprCriterionResult {
  double value = 0.0;  // J [Var(X1+X2) + Var(P1-P2)]
  bool entangled = false;
};

/// EPR entanglement criterion Var(J_y1+J_y2) + Var(J_z1+J_z2) < 2J.
EprCriterionResult epr_criterion(const EPRState& s);

struct DriftDiffusion {
  Eigen::Matrix4d drift = Eigen::Matrix4d::Zero();
  Eigen::Matrix4d diffusion = Eigen::Matrix4d::Zero();
  bool stable = false;  // all drift eigenvalues have negative real part
};

/// Gaussian drift/diffusion matrices for dSigma/dt = A Sigma + Sigma A^T + D
/// generated by the collective jump operators plus the uncorrelated loss.
DriftDiffusion drift_diffusion(const CouplingRates& rates);

/// Steady-state covariance from the Lyapunov equation A S + S A^T + D = 0
/// (direct linear solve). Throws when the drift is not stable.
EPRState steady_state(const CouplingRates& rates, double j_len);

/// One second-order (midpoint) step of the covariance flow; halves the step
/// recursively if physicality (cov + i Omega/2 >= 0) would be violated.
EPRState evolve(const EPRState& s, const CouplingRates& rates, double dt);

/// Integrate for a total time in steps of dt.
EPRState evolve_for(const EPRState& s, const CouplingRates& rates, double total_time,
                    double dt);

/// Marginal quadrature variance of one clock alone (party 1 or 2); for a
/// two-mode squeezed state of parameter r this is cosh(2r)/2.
double single_party_variance(const EPRState& s, int party);

/// Physicality check: eigenvalues of cov4 + (i/2) Omega are all >= -tol.
bool physical(const EPRState& s, double tol = 1e-9);

}  // namespace clocknet
