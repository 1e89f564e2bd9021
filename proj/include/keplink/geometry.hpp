#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace keplink {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Line-of-sight frame {e_rho, e_alpha, e_delta} at spherical angles (alpha, delta).
struct ObservationBasis {
  Vec3 e_rho;
  Vec3 e_alpha;
  Vec3 e_delta;
};

// Skew-symmetric matrix with hat(u) * w == u x w.
struct SkewMatrix3 {
  Mat3 m;
  [[nodiscard]] Vec3 operator*(const Vec3& w) const { return m * w; }
};

// Position and velocity of the observer in the inertial frame.
struct ObserverState {
  Vec3 q = Vec3::Zero();
  Vec3 qdot = Vec3::Zero();
};

// Throws a Domain error for |delta| >= pi/2 - 1e-9, where e_alpha is undefined.
[[nodiscard]] ObservationBasis observation_basis(double alpha, double delta);

// r = q + rho * e_rho. Requires rho > 0.
[[nodiscard]] Vec3 body_position(const Vec3& q, double rho, const ObservationBasis& basis);

// rdot = qdot + rhodot e_rho + rho (alphadot cos(delta) e_alpha + deltadot e_delta). Requires rho > 0.
[[nodiscard]] Vec3 body_velocity(const Vec3& qdot, double rhodot, double rho, double alphadot,
                                 double deltadot, const ObservationBasis& basis, double delta);

[[nodiscard]] SkewMatrix3 hat_map(const Vec3& u);

// Topocentric spherical coordinates of a relative state, the inverse of
// body_position/body_velocity.
struct TopocentricState {
  double alpha = 0.0;
  double delta = 0.0;
  double alphadot = 0.0;
  double deltadot = 0.0;
  double rho = 0.0;
  double rhodot = 0.0;
};
[[nodiscard]] TopocentricState topocentric_from_relative(const Vec3& d, const Vec3& ddot);

}  // namespace keplink
