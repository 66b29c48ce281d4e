#pragma once

#include <Eigen/Dense>
#include <utility>

#include "clocknet/rng.hpp"

namespace clocknet {

enum class Axis { X, Y, Z };

/// Gaussian (Holstein-Primakoff) model of one clock ensemble.
///
/// The transverse quantum fluctuations live in the canonical quadrature pair
/// (X_A, P_A) = (J_z, J_y)/sqrt(J) when the mean spin points along +x; for a
/// general mean direction the pair is carried in the canonical transverse
/// frame returned by canonical_frame(). `cov` is the 2x2 covariance of that
/// pair and `quad_mean` its conditional mean (nonzero after a QND readout).
struct CollectiveSpin {
  long long n_atoms = 0;
  Eigen::Vector3d mean_dir = Eigen::Vector3d::UnitX();
  double j_len = 0.0;
  Eigen::Matrix2d cov = Eigen::Matrix2d::Identity() * 0.5;
  Eigen::Vector2d quad_mean = Eigen::Vector2d::Zero();
  double eta_acc = 0.0;
};

/// Default ratio for the Holstein-Primakoff validity flag:
/// max eigenvalue of cov must stay below ratio * j_len.
inline constexpr double kDefaultHpRatio = 0.1;

/// Orthonormal transverse frame (u, v) for a mean direction m, satisfying
/// v x u = m so that [J_u, J_v] = i J_m and the pair (J_u, J_v)/sqrt(J) is
/// canonical. For m along +x this is u = z, v = y, matching X_A = J_z/sqrt(J),
/// P_A = J_y/sqrt(J).
std::pair<Eigen::Vector3d, Eigen::Vector3d> canonical_frame(const Eigen::Vector3d& m);

/// Coherent spin state along +x: J = N/2, cov = diag(1/2, 1/2).
CollectiveSpin new_css(long long n_atoms);

/// Coherent spin state along an arbitrary unit direction.
CollectiveSpin new_css(long long n_atoms, const Eigen::Vector3d& dir);

/// Right-hand-rule rotation about a lab axis. The angle error, when nonzero,
/// is sampled as a Gaussian from `rng` (required in that case). The covariance
/// is transported with the state and re-expressed in the canonical frame of
/// the new mean direction: a rotation about the mean-spin axis therefore
/// rotates (X_A, P_A) by the same angle, while rotations that move the mean
/// spin permute which projections form the canonical pair.
CollectiveSpin rotate(const CollectiveSpin& s, Axis axis, double angle,
                      double angle_error_rms = 0.0, Rng* rng = nullptr);

/// Spontaneous-emission decoherence: J -> e^{-eta} J. Following the model,
/// the covariance is untouched unless `inject_noise` is set, in which case
/// cov gains eta/2 * I (extension beyond the base model, off by default).
CollectiveSpin apply_decoherence(const CollectiveSpin& s, double eta,
                                 bool inject_noise = false);

/// Wineland squeezing parameter xi = Var(X_A) * N / J; xi < 1 flags
/// metrologically useful entanglement.
double squeezing_parameter(const CollectiveSpin& s);

/// Minimal detectable rotation angle sqrt(xi / N) = sqrt(Var(J_z)) / J.
double min_detectable_angle(const CollectiveSpin& s);

bool hp_valid(const CollectiveSpin& s, double ratio = kDefaultHpRatio);

/// Decomposition of a lab direction onto (u, v, mean): returns (a, b, c) with
/// dir = a u + b v + c mean_dir.
Eigen::Vector3d frame_components(const CollectiveSpin& s, const Eigen::Vector3d& lab_dir);

/// Mean of the spin projection J . dir, including the quadrature offsets.
double mean_spin_along(const CollectiveSpin& s, const Eigen::Vector3d& lab_dir);

/// Variance of the spin projection J . dir (transverse fluctuations only).
double var_spin_along(const CollectiveSpin& s, const Eigen::Vector3d& lab_dir);

/// Destructively sample a projective readout of J . dir with optional extra
/// detector noise variance (in units of J_z^2).
double sample_spin_along(const CollectiveSpin& s, const Eigen::Vector3d& lab_dir,
                         Rng& rng, double detector_noise_var = 0.0);

}  // namespace clocknet
