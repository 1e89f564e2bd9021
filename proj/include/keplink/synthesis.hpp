#pragma once

#include <array>
#include <cstdint>

#include "keplink/ephemeris.hpp"
#include "keplink/solution.hpp"

namespace keplink {

// Arc design behind each synthetic attributable. The covariance always comes
// from this design; the values are perturbed only when `perturb` is set.
struct NoiseSpec {
  int n_obs = 3;
  double arc_length_days = 1.0;
  double sigma_angle = 0.5 * kArcsec;  // rad, tangent plane
  double sigma_rho = 0.0;              // radar range, length units
  bool perturb = false;
  std::uint64_t seed = 0;
};

struct SyntheticTruth {
  std::array<double, 2> tbar{};
  std::array<double, 2> epoch{};  // light-time corrected
  std::array<double, 2> rho{};
  std::array<double, 2> rhodot{};
  double xi = 0.0;    // rho1 alphadot1 cos(delta1)
  double zeta = 0.0;  // rho1 deltadot1
  std::array<CartesianState, 2> state{};
  std::array<double, 4> alphadot_deltadot{};  // alphadot1, deltadot1, alphadot2, deltadot2 (exact)
  KeplerianElements elements;
};

struct SyntheticPair {
  LinkageKind kind = LinkageKind::Optical;
  OpticalAttributable opt1;   // set for the optical kind
  RadarAttributable rad1;     // set for the radar kind
  OpticalAttributable opt2;
  ObserverState obs1;
  ObserverState obs2;
  SyntheticTruth truth;

  [[nodiscard]] OpticalPair optical() const { return {opt1, opt2, obs1, obs2}; }
  [[nodiscard]] RadarOpticalPair radar() const { return {rad1, opt2, obs1, obs2}; }
};

// Propagates the true orbit to the light-time corrected epochs seen at tbar1
// and tbar2, forms exact topocentric attributables, attaches the arc-design
// covariance and optionally perturbs the values. Throws Domain for
// non-elliptic elements or a body at the observer.
[[nodiscard]] SyntheticPair synthesize_attributables(const KeplerianElements& truth, double tbar1, double tbar2,
                                                     const EphemerisModel& model, const NoiseSpec& noise,
                                                     LinkageKind kind, const UnitSystem& units);

}  // namespace keplink
