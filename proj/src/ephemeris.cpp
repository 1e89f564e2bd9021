#include "keplink/ephemeris.hpp"

#include <algorithm>
#include <cmath>

#include "keplink/errors.hpp"

namespace keplink {

namespace {

ObserverState analytic_state(const AnalyticEphemeris& m, double mjd) {
  ObserverState s;
  if (m.center) {
    const CartesianState c = propagate_kepler(*m.center, mjd, m.mu, m.time_units_per_day);
    s.q = c.r;
    s.qdot = c.rdot;
  }
  if (m.station) {
    const StationOffset& st = *m.station;
    const double lon = st.longitude0 + st.rotation_rate * (mjd - st.epoch0) * m.time_units_per_day;
    const double cl = std::cos(st.latitude);
    const Vec3 off(st.radius * cl * std::cos(lon), st.radius * cl * std::sin(lon), st.radius * std::sin(st.latitude));
    s.q += off;
    s.qdot += st.rotation_rate * Vec3::UnitZ().cross(off);
  }
  return s;
}

ObserverState tabulated_state(const TabulatedEphemeris& m, double mjd) {
  const auto n = m.mjd.size();
  if (n < 2 || m.q.size() != n || m.qdot.size() != n) fail(ErrorKind::Input, "ephemeris table: needs >= 2 complete rows");
  if (!(mjd >= m.mjd.front() && mjd <= m.mjd.back()))
    fail(ErrorKind::Input, "ephemeris: epoch " + std::to_string(mjd) + " outside tabulated span");
  auto it = std::upper_bound(m.mjd.begin(), m.mjd.end(), mjd);
  std::size_t k = it == m.mjd.end() ? n - 2 : static_cast<std::size_t>(it - m.mjd.begin()) - 1;
  k = std::min(k, n - 2);
  const double h_days = m.mjd[k + 1] - m.mjd[k];
  if (!(h_days > 0.0)) fail(ErrorKind::Input, "ephemeris table: nodes must be strictly increasing");
  const double s = (mjd - m.mjd[k]) / h_days;
  const double h = h_days * m.time_units_per_day;
  const double s2 = s * s, s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s, h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
  const double d00 = 6 * s2 - 6 * s, d10 = 3 * s2 - 4 * s + 1, d01 = -6 * s2 + 6 * s, d11 = 3 * s2 - 2 * s;
  const Vec3 &p0 = m.q[k], &p1 = m.q[k + 1], &v0 = m.qdot[k], &v1 = m.qdot[k + 1];
  ObserverState out;
  out.q = h00 * p0 + h10 * h * v0 + h01 * p1 + h11 * h * v1;
  out.qdot = (d00 * p0 + d01 * p1) / h + d10 * v0 + d11 * v1;
  return out;
}

}  // namespace

AnalyticEphemeris circular_earth(double epoch0, double longitude0) {
  AnalyticEphemeris m;
  m.center = KeplerianElements{1.0, 0.0, 0.0, 0.0, 0.0, wrap_two_pi(longitude0), epoch0};
  m.mu = kGaussK * kGaussK;
  m.time_units_per_day = 1.0;
  return m;
}

AnalyticEphemeris geocentric_station(const StationOffset& station) {
  AnalyticEphemeris m;
  m.station = station;
  m.mu = kMuEarthKm3PerSec2;
  m.time_units_per_day = kSecondsPerDay;
  return m;
}

ObserverState observer_state(const EphemerisModel& model, double mjd) {
  if (const auto* a = std::get_if<AnalyticEphemeris>(&model)) return analytic_state(*a, mjd);
  return tabulated_state(std::get<TabulatedEphemeris>(model), mjd);
}

TabulatedEphemeris tabulate(const AnalyticEphemeris& model, double t0, double t1, double step_days) {
  if (!(step_days > 0.0) || !(t1 >= t0)) fail(ErrorKind::Input, "tabulate: invalid span or step");
  TabulatedEphemeris tab;
  tab.time_units_per_day = model.time_units_per_day;
  const auto n = static_cast<std::size_t>(std::ceil((t1 - t0) / step_days - 1e-9));
  for (std::size_t k = 0; k <= n; ++k) {
    const double t = std::min(t0 + static_cast<double>(k) * step_days, t1);
    const ObserverState s = analytic_state(model, t);
    tab.mjd.push_back(t);
    tab.q.push_back(s.q);
    tab.qdot.push_back(s.qdot);
  }
  return tab;
}

}  // namespace keplink
