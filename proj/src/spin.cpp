#include "clocknet/spin.hpp"

#include <cmath>
#include <stdexcept>

namespace clocknet {

namespace {

Eigen::Vector3d axis_vector(Axis axis) {
  switch (axis) {
    case Axis::X: return Eigen::Vector3d::UnitX();
    case Axis::Y: return Eigen::Vector3d::UnitY();
    case Axis::Z: return Eigen::Vector3d::UnitZ();
  }
  throw std::invalid_argument("unknown axis");
}

}  // namespace

std::pair<Eigen::Vector3d, Eigen::Vector3d> canonical_frame(const Eigen::Vector3d& m) {
  // Project z (fallback: y near the poles) onto the transverse plane.
  Eigen::Vector3d seed = Eigen::Vector3d::UnitZ();
  if (std::abs(seed.dot(m)) > 1.0 - 1e-9) {
    seed = Eigen::Vector3d::UnitY();
  }
  Eigen::Vector3d u = (seed - seed.dot(m) * m).normalized();
  Eigen::Vector3d v = u.cross(m);  // v x u = m
  return {u, v};
}

CollectiveSpin new_css(long long n_atoms) {
  return new_css(n_atoms, Eigen::Vector3d::UnitX());
}

CollectiveSpin new_css(long long n_atoms, const Eigen::Vector3d& dir) {
  if (n_atoms < 1) {
    throw std::invalid_argument("new_css: atom count must be >= 1");
  }
  if (dir.norm() < 1e-12) {
    throw std::invalid_argument("new_css: zero mean direction");
  }
  CollectiveSpin s;
  s.n_atoms = n_atoms;
  s.mean_dir = dir.normalized();
  s.j_len = 0.5 * static_cast<double>(n_atoms);
  s.cov = Eigen::Matrix2d::Identity() * 0.5;
  s.quad_mean = Eigen::Vector2d::Zero();
  s.eta_acc = 0.0;
  return s;
}

CollectiveSpin rotate(const CollectiveSpin& s, Axis axis, double angle,
                      double angle_error_rms, Rng* rng) {
  if (!std::isfinite(angle)) {
    throw std::invalid_argument("rotate: non-finite angle");
  }
  if (angle_error_rms < 0.0) {
    throw std::invalid_argument("rotate: negative angle_error_rms");
  }
  double theta = angle;
  if (angle_error_rms > 0.0) {
    if (rng == nullptr) {
      throw std::invalid_argument("rotate: rng required when angle_error_rms > 0");
    }
    theta += rng->normal(0.0, angle_error_rms);
  }

  const Eigen::Matrix3d rot =
      Eigen::AngleAxisd(theta, axis_vector(axis)).toRotationMatrix();

  auto [u0, v0] = canonical_frame(s.mean_dir);
  const Eigen::Vector3d m1 = (rot * s.mean_dir).normalized();
  const Eigen::Vector3d ut = rot * u0;
  const Eigen::Vector3d vt = rot * v0;
  auto [u1, v1] = canonical_frame(m1);

  // In-plane angle between the transported frame and the canonical frame of
  // the new mean; both frames share the handedness v x u = m.
  const double phi = std::atan2(u1.dot(vt), u1.dot(ut));
  Eigen::Matrix2d g;
  g << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);

  CollectiveSpin out = s;
  out.mean_dir = m1;
  out.cov = g * s.cov * g.transpose();
  out.cov = 0.5 * (out.cov + out.cov.transpose().eval());  // keep exactly symmetric
  out.quad_mean = g * s.quad_mean;
  return out;
}

CollectiveSpin apply_decoherence(const CollectiveSpin& s, double eta, bool inject_noise) {
  if (eta < 0.0) {
    throw std::invalid_argument("apply_decoherence: eta must be >= 0");
  }
  CollectiveSpin out = s;
  out.j_len = s.j_len * std::exp(-eta);
  out.eta_acc = s.eta_acc + eta;
  if (inject_noise) {
    out.cov += 0.5 * eta * Eigen::Matrix2d::Identity();
  }
  return out;
}

double squeezing_parameter(const CollectiveSpin& s) {
  if (s.j_len <= 0.0) {
    throw std::invalid_argument("squeezing_parameter: zero mean spin");
  }
  return s.cov(0, 0) * static_cast<double>(s.n_atoms) / s.j_len;
}

double min_detectable_angle(const CollectiveSpin& s) {
  return std::sqrt(squeezing_parameter(s) / static_cast<double>(s.n_atoms));
}

bool hp_valid(const CollectiveSpin& s, double ratio) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(s.cov);
  return es.eigenvalues().maxCoeff() <= ratio * s.j_len;
}

Eigen::Vector3d frame_components(const CollectiveSpin& s, const Eigen::Vector3d& lab_dir) {
  auto [u, v] = canonical_frame(s.mean_dir);
  return {lab_dir.dot(u), lab_dir.dot(v), lab_dir.dot(s.mean_dir)};
}

double mean_spin_along(const CollectiveSpin& s, const Eigen::Vector3d& lab_dir) {
  const Eigen::Vector3d c = frame_components(s, lab_dir);
  const double root_j = std::sqrt(s.j_len);
  return s.j_len * c.z() + root_j * (c.x() * s.quad_mean(0) + c.y() * s.quad_mean(1));
}

double var_spin_along(const CollectiveSpin& s, const Eigen::Vector3d& lab_dir) {
  const Eigen::Vector3d c = frame_components(s, lab_dir);
  const Eigen::Vector2d t(c.x(), c.y());
  return s.j_len * t.dot(s.cov * t);
}

double sample_spin_along(const CollectiveSpin& s, const Eigen::Vector3d& lab_dir,
                         Rng& rng, double detector_noise_var) {
  const double mean = mean_spin_along(s, lab_dir);
  const double var = var_spin_along(s, lab_dir) + detector_noise_var;
  return rng.normal(mean, std::sqrt(var));
}

}  // namespace clocknet
