#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "keplink/kepler.hpp"
#include "keplink/units.hpp"

namespace keplink {

// Observing site on a uniformly rotating body, relative to its center.
struct StationOffset {
  double radius = 6378.137;           // length units of the run
  double latitude = 0.0;              // rad
  double longitude0 = 0.0;            // rad at epoch0
  double rotation_rate = 7.2921159e-5;  // rad per internal time unit, about +z
  double epoch0 = 51544.5;            // MJD
};

// Center on a two-body orbit (or fixed at the origin) plus an optional station.
struct AnalyticEphemeris {
  std::optional<KeplerianElements> center;
  std::optional<StationOffset> station;
  double mu = 1.0;                     // central body of the center's orbit
  double time_units_per_day = 1.0;
};

// Tabulated samples; velocities in length per internal time unit.
struct TabulatedEphemeris {
  std::vector<double> mjd;
  std::vector<Vec3> q;
  std::vector<Vec3> qdot;
  double time_units_per_day = 1.0;
};

using EphemerisModel = std::variant<AnalyticEphemeris, TabulatedEphemeris>;

// Circular heliocentric orbit of radius 1 AU in the reference plane, mean
// longitude `longitude0` at `epoch0`.
[[nodiscard]] AnalyticEphemeris circular_earth(double epoch0 = 51544.5, double longitude0 = 100.46 * kDeg);
// Equatorial station on a geocentric frame (km, s).
[[nodiscard]] AnalyticEphemeris geocentric_station(const StationOffset& station = {});

// Analytic models are exact; tabulated ones use cubic Hermite interpolation on
// (q, qdot). Throws Input for an epoch outside the table or an invalid table.
[[nodiscard]] ObserverState observer_state(const EphemerisModel& model, double mjd);

// Samples an analytic model on a regular grid (for tests and table export).
[[nodiscard]] TabulatedEphemeris tabulate(const AnalyticEphemeris& model, double t0, double t1, double step_days);

}  // namespace keplink
