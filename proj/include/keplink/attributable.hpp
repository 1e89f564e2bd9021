#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "keplink/units.hpp"

namespace keplink {

using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;

// Angles and angular rates at the mean epoch of a short optical arc.
// Vector and covariance order: (alpha, delta, alphadot, deltadot).
struct OpticalAttributable {
  double alpha = 0.0;     // [-pi, pi)
  double delta = 0.0;     // (-pi/2, pi/2)
  double alphadot = 0.0;  // rad per internal time unit
  double deltadot = 0.0;
  double tbar = 0.0;      // MJD
  Mat4 cov = Mat4::Zero();
  std::string station;

  [[nodiscard]] Vec4 values() const { return {alpha, delta, alphadot, deltadot}; }
};

// Angles, range and range rate. Order: (alpha, delta, rho, rhodot).
struct RadarAttributable {
  double alpha = 0.0;
  double delta = 0.0;
  double rho = 1.0;
  double rhodot = 0.0;
  double tbar = 0.0;
  Mat4 cov = Mat4::Zero();
  std::string station;

  [[nodiscard]] Vec4 values() const { return {alpha, delta, rho, rhodot}; }
};

struct Observation {
  double t = 0.0;                // MJD
  double alpha = 0.0;            // rad
  double delta = 0.0;            // rad
  std::optional<double> rho;     // radar range
  double sigma_angle = 0.0;      // rad, on the tangent plane
  double sigma_rho = 0.0;
};

struct ObservationArc {
  std::vector<Observation> observations;
  std::string station;
};

// Weighted least-squares fit of alpha(t), delta(t) (degree 2 for m >= 3,
// degree 1 for m == 2) evaluated at the mean epoch. Rates are expressed per
// internal time unit. Throws Input for m < 2, non-increasing times or a
// singular normal matrix.
[[nodiscard]] OpticalAttributable fit_optical_attributable(const ObservationArc& arc,
                                                           double time_units_per_day = 1.0);
[[nodiscard]] RadarAttributable fit_radar_attributable(const ObservationArc& arc, double time_units_per_day = 1.0);

// Covariance of (value, rate) at tau = 0 for a polynomial fit at offsets `tau`
// (internal time units) with per-point sigmas.
[[nodiscard]] Eigen::Matrix2d polynomial_fit_covariance(const std::vector<double>& tau,
                                                        const std::vector<double>& sigma, int degree);

// t = tbar - rho / c, in MJD.
[[nodiscard]] double aberration_correct(double tbar, double rho, const UnitSystem& units);

}  // namespace keplink
