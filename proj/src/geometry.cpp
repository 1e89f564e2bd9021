#include "keplink/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "keplink/errors.hpp"
#include "keplink/units.hpp"

namespace keplink {

double wrap_pi(double angle) {
  double wrapped = std::fmod(angle + kPi, kTwoPi);
  if (wrapped < 0.0) wrapped += kTwoPi;
  return wrapped - kPi;
}

double wrap_two_pi(double angle) {
  double wrapped = std::fmod(angle, kTwoPi);
  if (wrapped < 0.0) wrapped += kTwoPi;
  // fmod can return exactly 2pi after the correction for tiny negative inputs
  return wrapped >= kTwoPi ? 0.0 : wrapped;
}

ObservationBasis observation_basis(double alpha, double delta) {
  if (!(std::abs(delta) < kPi / 2.0 - 1e-9)) {
    fail(ErrorKind::Domain, "observation_basis: declination at the pole, cos(delta) vanishes");
  }
  const double a = wrap_pi(alpha);
  const double ca = std::cos(a), sa = std::sin(a);
  const double cd = std::cos(delta), sd = std::sin(delta);
  return {Vec3(cd * ca, cd * sa, sd), Vec3(-sa, ca, 0.0), Vec3(-sd * ca, -sd * sa, cd)};
}

Vec3 body_position(const Vec3& q, double rho, const ObservationBasis& basis) {
  if (!(rho > 0.0)) fail(ErrorKind::Domain, "body_position: rho must be positive");
  return q + rho * basis.e_rho;
}

Vec3 body_velocity(const Vec3& qdot, double rhodot, double rho, double alphadot, double deltadot,
                   const ObservationBasis& basis, double delta) {
  if (!(rho > 0.0)) fail(ErrorKind::Domain, "body_velocity: rho must be positive");
  return qdot + rhodot * basis.e_rho +
         rho * (alphadot * std::cos(delta) * basis.e_alpha + deltadot * basis.e_delta);
}

SkewMatrix3 hat_map(const Vec3& u) {
  SkewMatrix3 h;
  h.m << 0.0, -u.z(), u.y(),
         u.z(), 0.0, -u.x(),
         -u.y(), u.x(), 0.0;
  return h;
}

TopocentricState topocentric_from_relative(const Vec3& d, const Vec3& ddot) {
  TopocentricState s;
  s.rho = d.norm();
  if (!(s.rho > 0.0)) fail(ErrorKind::Domain, "topocentric_from_relative: body at the observer");
  s.alpha = wrap_pi(std::atan2(d.y(), d.x()));
  s.delta = std::asin(std::clamp(d.z() / s.rho, -1.0, 1.0));
  const ObservationBasis b = observation_basis(s.alpha, s.delta);
  s.rhodot = b.e_rho.dot(ddot);
  s.alphadot = b.e_alpha.dot(ddot) / (s.rho * std::cos(s.delta));
  s.deltadot = b.e_delta.dot(ddot) / s.rho;
  return s;
}

}  // namespace keplink
