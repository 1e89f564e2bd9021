#pragma once

#include <optional>

#include <Eigen/Core>

#include "keplink/solution.hpp"
#include "keplink/units.hpp"

namespace keplink {

using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat8 = Eigen::Matrix<double, 8, 8>;
using Mat12 = Eigen::Matrix<double, 12, 12>;
using Mat4x8 = Eigen::Matrix<double, 4, 8>;
using Mat4x12 = Eigen::Matrix<double, 4, 12>;

// The two attributables of a linkage problem together with their joint 8x8
// covariance (block-diagonal unless a joint matrix is supplied).
struct AttributablePair {
  LinkageKind kind = LinkageKind::Optical;
  Vec4 A1 = Vec4::Zero();
  Vec4 A2 = Vec4::Zero();
  ObserverState obs1;
  ObserverState obs2;
  Mat8 gamma = Mat8::Zero();

  [[nodiscard]] static AttributablePair from(const OpticalPair& pair, const std::optional<Mat8>& joint = {});
  [[nodiscard]] static AttributablePair from(const RadarOpticalPair& pair, const std::optional<Mat8>& joint = {});
};

// (c1 - c2, mu (L1 - L2) . w) with w = r2 x q2.
[[nodiscard]] Vec4 psi(const CartesianState& s1, const CartesianState& s2, const Vec3& q2, double mu);
// d psi / d(r1, rdot1, r2, rdot2).
[[nodiscard]] Mat4x12 psi_jacobian(const CartesianState& s1, const CartesianState& s2, const Vec3& q2, double mu);

// Attributable coordinates (alpha, delta, alphadot, deltadot, rho, rhodot) of
// one epoch for a solution.
[[nodiscard]] Vec6 attributable_coordinates(const AttributablePair& pair, const LinkageSolution& sol, int epoch);

// d(r, rdot)/d(alpha, delta, alphadot, deltadot, rho, rhodot) with the observer state fixed.
[[nodiscard]] Mat6 attributable_to_cartesian_jacobian(const Vec6& eatt, const ObserverState& obs);
// Block-diagonal 12x12 for both epochs.
[[nodiscard]] Mat12 cartesian_from_attributable_jacobian(const Vec6& eatt1, const Vec6& eatt2,
                                                         const ObserverState& obs1, const ObserverState& obs2);

struct ImplicitJacobian {
  Mat4x8 dY_dA = Mat4x8::Zero();
  double condition_number = 0.0;  // of d Phi / d Y after row/column equilibration
  bool ill_conditioned = false;
};

inline constexpr double kIllConditioned = 1e12;

// dY/dA = -(dPhi/dY)^{-1} dPhi/dA. Columns of dE_car/dE_att used for Y:
// (5,6,11,12) optical, (3,4,11,12) radar-optical; the remaining eight give A.
[[nodiscard]] ImplicitJacobian implicit_solution_jacobian(const AttributablePair& pair, const LinkageSolution& sol,
                                                          double mu);

// Gamma_car of epoch 1 or 2 (epoch in {1, 2}).
[[nodiscard]] Mat6 cartesian_covariance(const AttributablePair& pair, const LinkageSolution& sol,
                                        const Mat4x8& dY_dA, int epoch);

// Fills sol.covariance and, for elliptic solutions, sol.element_covariance1.
// Adds a warning when d Phi / d Y is ill-conditioned.
void attach_covariance(const AttributablePair& pair, LinkageSolution& sol, double mu);

}  // namespace keplink
