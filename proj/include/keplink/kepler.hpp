#pragma once

#include <optional>

#include <Eigen/Core>

#include "keplink/geometry.hpp"

namespace keplink {

using Mat6 = Eigen::Matrix<double, 6, 6>;

// Classical elements (a, e, i, Omega, omega, mean anomaly). Angles are kept in
// [0, 2pi). For e < 1e-10 omega is 0 and the mean anomaly is measured from the
// node; for a planar orbit (i < 1e-10 or i > pi - 1e-10) Omega is 0 and the
// node direction is the x axis.
struct KeplerianElements {
  double a = 1.0;
  double e = 0.0;
  double i = 0.0;
  double Omega = 0.0;
  double omega = 0.0;
  double ell = 0.0;
  double epoch = 0.0;  // MJD

  // Vector ordering used by every 6x6 element matrix in the library.
  [[nodiscard]] Eigen::Matrix<double, 6, 1> as_vector() const;
  [[nodiscard]] static KeplerianElements from_vector(const Eigen::Matrix<double, 6, 1>& v, double epoch);
  [[nodiscard]] double mean_motion(double mu) const;
};

struct CartesianState {
  Vec3 r = Vec3::Zero();
  Vec3 rdot = Vec3::Zero();
  double epoch = 0.0;  // MJD
};

[[nodiscard]] Vec3 angular_momentum(const Vec3& r, const Vec3& rdot);

// Laplace-Lenz (eccentricity) vector L with mu L = rdot x c - mu r/|r|.
[[nodiscard]] Vec3 laplace_lenz(const Vec3& r, const Vec3& rdot, double mu);

[[nodiscard]] double two_body_energy(const Vec3& r, const Vec3& rdot, double mu);

// Eccentric anomaly for mean anomaly `ell`, 0 <= e <= 0.99.
[[nodiscard]] double solve_kepler(double ell, double e);

// Returns nullopt for non-elliptic states (energy >= 0). Throws Degenerate for
// rectilinear motion (|c| ~ 0).
[[nodiscard]] std::optional<KeplerianElements> cartesian_to_keplerian(const CartesianState& state, double mu);

[[nodiscard]] CartesianState keplerian_to_cartesian(const KeplerianElements& el, double mu);

// d(r, rdot)/d(a, e, i, Omega, omega, ell).
[[nodiscard]] Mat6 keplerian_to_cartesian_jacobian(const KeplerianElements& el, double mu);

// d(a, e, i, Omega, omega, ell)/d(r, rdot), the inverse of the matrix above.
[[nodiscard]] Mat6 cartesian_to_keplerian_jacobian(const KeplerianElements& el, double mu);

// Two-body flow. `time_units_per_day` converts the epoch difference into the
// time unit of mu.
[[nodiscard]] KeplerianElements propagate_elements(const KeplerianElements& el, double target_epoch, double mu,
                                                   double time_units_per_day = 1.0);
[[nodiscard]] CartesianState propagate_kepler(const KeplerianElements& el, double target_epoch, double mu,
                                              double time_units_per_day = 1.0);

// d(elements at target)/d(elements at el.epoch).
[[nodiscard]] Mat6 propagation_jacobian(const KeplerianElements& el, double target_epoch, double mu,
                                        double time_units_per_day = 1.0);

struct CompatibilityResiduals {
  double lenz_line_of_sight = 0.0;            // (L1 - L2) . e_rho2
  std::optional<double> mean_anomaly;         // wrap(l1 - l2 - n1 (t1 - t2)); unset when non-elliptic
};

[[nodiscard]] CompatibilityResiduals compatibility_residuals(const CartesianState& s1, const CartesianState& s2,
                                                             const Vec3& e_rho2, double mu,
                                                             double time_units_per_day = 1.0);

}  // namespace keplink
