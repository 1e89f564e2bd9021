#pragma once

#include <string>

namespace keplink {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
inline constexpr double kGaussK = 0.01720209895;
inline constexpr double kAuKm = 149597870.7;
inline constexpr double kLightKmPerSec = 299792.458;
inline constexpr double kSecondsPerDay = 86400.0;
inline constexpr double kLightAuPerDay = kLightKmPerSec * kSecondsPerDay / kAuKm;
inline constexpr double kMuEarthKm3PerSec2 = 398600.4418;
inline constexpr double kArcsec = kPi / (180.0 * 3600.0);
inline constexpr double kDeg = kPi / 180.0;

// A run-level unit configuration. Epochs are always MJD (days); lengths,
// speeds and rates use the internal units of the system. `time_units_per_day`
// converts an epoch difference into the internal time unit.
struct UnitSystem {
  std::string name;
  double mu = 1.0;
  double c_light = 0.0;           // length per internal time unit
  double time_units_per_day = 1.0;
  double min_rho = 1e-7;          // smallest physical topocentric distance

  // AU, days, mu = k^2.
  static UnitSystem heliocentric() {
    return {"heliocentric", kGaussK * kGaussK, kLightAuPerDay, 1.0, 1e-7};
  }
  // km, seconds, mu = GM_earth.
  static UnitSystem geocentric() {
    return {"geocentric", kMuEarthKm3PerSec2, kLightKmPerSec, kSecondsPerDay, 1e-7};
  }
  // Dimensionless system used by tests: time in days, arbitrary mu, no light-time.
  static UnitSystem custom(double mu, double c_light = 0.0) { return {"custom", mu, c_light, 1.0, 1e-7}; }

  // Internal-time difference between two MJD epochs.
  [[nodiscard]] double elapsed(double from_mjd, double to_mjd) const {
    return (to_mjd - from_mjd) * time_units_per_day;
  }
  // Light travel time for distance rho, in days; zero when c_light is unset.
  [[nodiscard]] double light_time_days(double rho) const {
    return c_light > 0.0 ? rho / c_light / time_units_per_day : 0.0;
  }
};

// Wrap an angle to [-pi, pi).
[[nodiscard]] double wrap_pi(double angle);
// Wrap an angle to [0, 2pi).
[[nodiscard]] double wrap_two_pi(double angle);

}  // namespace keplink
