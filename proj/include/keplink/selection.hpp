#pragma once

#include <optional>
#include <vector>

#include "keplink/covariance.hpp"

namespace keplink {

// Attributable predicted at the second mean epoch from the epoch-1 orbit.
struct PredictedAttributable {
  Vec4 A = Vec4::Zero();       // (alpha, delta, alphadot, deltadot)
  Mat4 gamma = Mat4::Zero();
  double epoch = 0.0;          // light-time corrected epoch of the body state, MJD
};

inline constexpr double kDefaultChi4Threshold = 100.0;

// Propagates elements and covariance to the epoch seen at tbar2 from obs2
// (light-time iterated), then maps state and covariance to attributable
// coordinates. Throws Domain for non-elliptic elements.
[[nodiscard]] PredictedAttributable predict_attributable(const KeplerianElements& elements1, const Mat6& gamma1,
                                                         const ObserverState& obs2, double tbar2,
                                                         const UnitSystem& units);

// chi4 = d . [C_p - C_p Gamma_0 C_p] d with d = A2 - A_p (alpha difference
// wrapped). Covariances with condition number above 1e12 are regularized;
// nullopt when one of them is zero or not finite.
[[nodiscard]] std::optional<double> identification_penalty(const Vec4& A2, const Mat4& gamma_A2,
                                                           const PredictedAttributable& pred);

// Annotates every solution with chi4 (when selectable) and the acceptance
// flag, and returns the accepted ones.
std::vector<LinkageSolution> select_solutions(std::vector<LinkageSolution>& solutions,
                                              const OpticalAttributable& att2, const ObserverState& obs2,
                                              double threshold, const UnitSystem& units);

}  // namespace keplink
