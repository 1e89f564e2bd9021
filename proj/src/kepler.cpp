#include "keplink/kepler.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/LU>
#include <unsupported/Eigen/AutoDiff>

#include "keplink/errors.hpp"
#include "keplink/units.hpp"

namespace keplink {

namespace {

constexpr double kSmallAngle = 1e-10;
constexpr double kSmallEcc = 1e-10;

using Grad6 = Eigen::Matrix<double, 6, 1>;
using AD = Eigen::AutoDiffScalar<Grad6>;

template <typename T>
struct StateT {
  Eigen::Matrix<T, 3, 1> r;
  Eigen::Matrix<T, 3, 1> v;
};

// Element-to-state map written once for both double and AutoDiff scalars.
// `ecc_anomaly` is the converged double solution of Kepler's equation; one
// Newton step in T carries the implicit derivatives dE/d(e, ell).
template <typename T>
StateT<T> elements_to_state(const T& a, const T& e, const T& inc, const T& node, const T& peri,
                            const T& ell, double ecc_anomaly, double mu) {
  using std::cos;
  using std::sin;
  using std::sqrt;
  const T E0 = T(ecc_anomaly);
  const T E = E0 - (E0 - e * sin(E0) - ell) / (T(1.0) - e * cos(E0));
  const T cE = cos(E), sE = sin(E);
  const T beta = sqrt(T(1.0) - e * e);
  const T n = sqrt(T(mu) / (a * a * a));
  const T Edot = n / (T(1.0) - e * cE);

  const T xp = a * (cE - e);
  const T yp = a * beta * sE;
  const T vxp = -a * sE * Edot;
  const T vyp = a * beta * cE * Edot;

  const T cO = cos(node), sO = sin(node);
  const T co = cos(peri), so = sin(peri);
  const T ci = cos(inc), si = sin(inc);
  Eigen::Matrix<T, 3, 1> P, Q;
  P << cO * co - sO * so * ci, sO * co + cO * so * ci, so * si;
  Q << -cO * so - sO * co * ci, -sO * so + cO * co * ci, co * si;
  return {P * xp + Q * yp, P * vxp + Q * vyp};
}

void check_elliptic(const KeplerianElements& el) {
  if (!(el.e >= 0.0 && el.e < 1.0)) fail(ErrorKind::Domain, "keplerian elements: eccentricity must be in [0, 1)");
  if (!(el.a > 0.0)) fail(ErrorKind::Domain, "keplerian elements: semimajor axis must be positive");
}

}  // namespace

Eigen::Matrix<double, 6, 1> KeplerianElements::as_vector() const {
  Eigen::Matrix<double, 6, 1> v;
  v << a, e, i, Omega, omega, ell;
  return v;
}

KeplerianElements KeplerianElements::from_vector(const Eigen::Matrix<double, 6, 1>& v, double epoch) {
  return {v(0), v(1), v(2), v(3), v(4), v(5), epoch};
}

double KeplerianElements::mean_motion(double mu) const { return std::sqrt(mu / (a * a * a)); }

Vec3 angular_momentum(const Vec3& r, const Vec3& rdot) { return r.cross(rdot); }

Vec3 laplace_lenz(const Vec3& r, const Vec3& rdot, double mu) {
  const double rn = r.norm();
  if (!(rn > 0.0)) fail(ErrorKind::Domain, "laplace_lenz: |r| = 0");
  return ((rdot.squaredNorm() - mu / rn) * r - rdot.dot(r) * rdot) / mu;
}

double two_body_energy(const Vec3& r, const Vec3& rdot, double mu) {
  const double rn = r.norm();
  if (!(rn > 0.0)) fail(ErrorKind::Domain, "two_body_energy: |r| = 0");
  return 0.5 * rdot.squaredNorm() - mu / rn;
}

double solve_kepler(double ell, double e) {
  if (!(e >= 0.0 && e < 1.0)) fail(ErrorKind::Domain, "solve_kepler: eccentricity must be in [0, 1)");
  const double M = wrap_pi(ell);
  double lo = M - e, hi = M + e;
  double E = M + e * std::sin(M);
  for (int iter = 0; iter < 100; ++iter) {
    const double f = E - e * std::sin(E) - M;
    if (f < 0.0) lo = E; else hi = E;
    const double step = f / (1.0 - e * std::cos(E));
    double next = E - step;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - E) < 1e-14 || hi - lo < 1e-14) {
      return next + (ell - M);
    }
    E = next;
  }
  fail(ErrorKind::Numerical, "solve_kepler: no convergence for e = " + std::to_string(e));
}

std::optional<KeplerianElements> cartesian_to_keplerian(const CartesianState& state, double mu) {
  const Vec3& r = state.r;
  const Vec3& v = state.rdot;
  const double rn = r.norm();
  if (!(rn > 0.0)) fail(ErrorKind::Domain, "cartesian_to_keplerian: |r| = 0");
  const Vec3 c = r.cross(v);
  const double h = c.norm();
  if (h <= 1e-12 * rn * v.norm()) fail(ErrorKind::Degenerate, "cartesian_to_keplerian: rectilinear orbit");
  const double energy = two_body_energy(r, v, mu);
  if (energy >= 0.0) return std::nullopt;

  KeplerianElements el;
  el.epoch = state.epoch;
  el.a = -mu / (2.0 * energy);
  const Vec3 ecc = laplace_lenz(r, v, mu);
  el.e = ecc.norm();
  const Vec3 chat = c / h;
  el.i = std::acos(std::clamp(chat.z(), -1.0, 1.0));

  Vec3 node_dir(1.0, 0.0, 0.0);
  const Vec3 node(-c.y(), c.x(), 0.0);
  if (el.i > kSmallAngle && el.i < kPi - kSmallAngle && node.norm() > 0.0) {
    node_dir = node.normalized();
    el.Omega = wrap_two_pi(std::atan2(node.y(), node.x()));
  } else {
    el.Omega = 0.0;
  }

  // Angles in the orbital plane are measured counterclockwise about c.
  auto plane_angle = [&chat](const Vec3& from, const Vec3& to) {
    return std::atan2(from.cross(to).dot(chat), from.dot(to));
  };
  Vec3 ref = node_dir;
  if (el.e >= kSmallEcc) {
    el.omega = wrap_two_pi(plane_angle(node_dir, ecc));
    ref = ecc.normalized();
  } else {
    el.omega = 0.0;
  }
  const double nu = plane_angle(ref, r);
  const double E = std::atan2(std::sqrt(1.0 - el.e * el.e) * std::sin(nu), el.e + std::cos(nu));
  el.ell = wrap_two_pi(E - el.e * std::sin(E));
  return el;
}

CartesianState keplerian_to_cartesian(const KeplerianElements& el, double mu) {
  check_elliptic(el);
  const double E = solve_kepler(el.ell, el.e);
  const auto s = elements_to_state<double>(el.a, el.e, el.i, el.Omega, el.omega, el.ell, E, mu);
  return {s.r, s.v, el.epoch};
}

Mat6 keplerian_to_cartesian_jacobian(const KeplerianElements& el, double mu) {
  check_elliptic(el);
  const double E = solve_kepler(el.ell, el.e);
  const Grad6 x = el.as_vector();
  auto seed = [&x](int k) { return AD(x(k), 6, k); };
  const auto s = elements_to_state<AD>(seed(0), seed(1), seed(2), seed(3), seed(4), seed(5), E, mu);
  Mat6 J;
  for (int k = 0; k < 3; ++k) {
    J.row(k) = s.r(k).derivatives().transpose();
    J.row(k + 3) = s.v(k).derivatives().transpose();
  }
  return J;
}

Mat6 cartesian_to_keplerian_jacobian(const KeplerianElements& el, double mu) {
  const Eigen::PartialPivLU<Mat6> lu(keplerian_to_cartesian_jacobian(el, mu));
  return lu.inverse();
}

KeplerianElements propagate_elements(const KeplerianElements& el, double target_epoch, double mu,
                                     double time_units_per_day) {
  check_elliptic(el);
  KeplerianElements out = el;
  out.ell = wrap_two_pi(el.ell + el.mean_motion(mu) * (target_epoch - el.epoch) * time_units_per_day);
  out.epoch = target_epoch;
  return out;
}

CartesianState propagate_kepler(const KeplerianElements& el, double target_epoch, double mu,
                                double time_units_per_day) {
  if (target_epoch == el.epoch) return keplerian_to_cartesian(el, mu);
  return keplerian_to_cartesian(propagate_elements(el, target_epoch, mu, time_units_per_day), mu);
}

Mat6 propagation_jacobian(const KeplerianElements& el, double target_epoch, double mu,
                          double time_units_per_day) {
  check_elliptic(el);
  Mat6 J = Mat6::Identity();
  const double dt = (target_epoch - el.epoch) * time_units_per_day;
  J(5, 0) = -1.5 * el.mean_motion(mu) / el.a * dt;
  return J;
}

CompatibilityResiduals compatibility_residuals(const CartesianState& s1, const CartesianState& s2,
                                               const Vec3& e_rho2, double mu, double time_units_per_day) {
  CompatibilityResiduals out;
  out.lenz_line_of_sight = (laplace_lenz(s1.r, s1.rdot, mu) - laplace_lenz(s2.r, s2.rdot, mu)).dot(e_rho2);
  const auto el1 = cartesian_to_keplerian(s1, mu);
  const auto el2 = cartesian_to_keplerian(s2, mu);
  if (el1 && el2) {
    const double dt = (s1.epoch - s2.epoch) * time_units_per_day;
    out.mean_anomaly = wrap_pi(el1->ell - el2->ell - el1->mean_motion(mu) * dt);
  }
  return out;
}

}  // namespace keplink
