#include "keplink/covariance.hpp"

#include <array>
#include <cmath>
#include <limits>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "keplink/errors.hpp"

namespace keplink {

namespace {

Mat8 block_diagonal(const Mat4& a, const Mat4& b) {
  Mat8 g = Mat8::Zero();
  g.topLeftCorner<4, 4>() = a;
  g.bottomRightCorner<4, 4>() = b;
  return g;
}

// Column indices (0-based) of dE_car/dE_att for Y and for A.
struct ColumnSplit {
  std::array<int, 4> y;
  std::array<int, 8> a;
};

ColumnSplit column_split(LinkageKind kind) {
  if (kind == LinkageKind::Optical) return {{4, 5, 10, 11}, {0, 1, 2, 3, 6, 7, 8, 9}};
  return {{2, 3, 10, 11}, {0, 1, 4, 5, 6, 7, 8, 9}};
}

template <class M>
M symmetrized(const M& m) {
  return 0.5 * (m + m.transpose());
}

}  // namespace

AttributablePair AttributablePair::from(const OpticalPair& pair, const std::optional<Mat8>& joint) {
  return {LinkageKind::Optical, pair.att1.values(), pair.att2.values(), pair.obs1, pair.obs2,
          joint ? *joint : block_diagonal(pair.att1.cov, pair.att2.cov)};
}

AttributablePair AttributablePair::from(const RadarOpticalPair& pair, const std::optional<Mat8>& joint) {
  return {LinkageKind::RadarOptical, pair.att1.values(), pair.att2.values(), pair.obs1, pair.obs2,
          joint ? *joint : block_diagonal(pair.att1.cov, pair.att2.cov)};
}

Vec4 psi(const CartesianState& s1, const CartesianState& s2, const Vec3& q2, double mu) {
  const Vec3 dc = angular_momentum(s1.r, s1.rdot) - angular_momentum(s2.r, s2.rdot);
  const Vec3 w = s2.r.cross(q2);
  const double dl = mu * (laplace_lenz(s1.r, s1.rdot, mu) - laplace_lenz(s2.r, s2.rdot, mu)).dot(w);
  return {dc.x(), dc.y(), dc.z(), dl};
}

Mat4x12 psi_jacobian(const CartesianState& s1, const CartesianState& s2, const Vec3& q2, double mu) {
  const Vec3& r1 = s1.r;
  const Vec3& v1 = s1.rdot;
  const Vec3& r2 = s2.r;
  const Vec3& v2 = s2.rdot;
  const double n1 = r1.norm();
  if (!(n1 > 0.0)) fail(ErrorKind::Domain, "psi_jacobian: |r1| = 0");
  const Vec3 w = r2.cross(q2);

  Mat4x12 J = Mat4x12::Zero();
  J.block<3, 3>(0, 0) = -hat_map(v1).m;
  J.block<3, 3>(0, 3) = hat_map(r1).m;
  J.block<3, 3>(0, 6) = hat_map(v2).m;
  J.block<3, 3>(0, 9) = -hat_map(r2).m;

  const double k1 = v1.squaredNorm() - mu / n1;
  const Vec3 d_r1 = k1 * w + mu * r1.dot(w) / (n1 * n1 * n1) * r1 - v1.dot(w) * v1;
  const Vec3 d_v1 = 2.0 * r1.dot(w) * v1 - v1.dot(w) * r1 - v1.dot(r1) * w;
  const Vec3 d_r2 = k1 * q2.cross(r1) - v1.dot(r1) * q2.cross(v1) + v2.dot(w) * v2 + v2.dot(r2) * q2.cross(v2);
  const Vec3 d_v2 = v2.dot(w) * r2 + v2.dot(r2) * w;
  J.block<1, 3>(3, 0) = d_r1.transpose();
  J.block<1, 3>(3, 3) = d_v1.transpose();
  J.block<1, 3>(3, 6) = d_r2.transpose();
  J.block<1, 3>(3, 9) = d_v2.transpose();
  return J;
}

Vec6 attributable_coordinates(const AttributablePair& pair, const LinkageSolution& sol, int epoch) {
  Vec6 e;
  if (epoch == 1) {
    if (pair.kind == LinkageKind::Optical)
      e << pair.A1(0), pair.A1(1), pair.A1(2), pair.A1(3), sol.rho1, sol.rhodot1;
    else
      e << pair.A1(0), pair.A1(1), sol.alphadot1, sol.deltadot1, pair.A1(2), pair.A1(3);
  } else {
    e << pair.A2(0), pair.A2(1), pair.A2(2), pair.A2(3), sol.rho2, sol.rhodot2;
  }
  return e;
}

Mat6 attributable_to_cartesian_jacobian(const Vec6& eatt, const ObserverState& /*obs*/) {
  const double alpha = eatt(0), delta = eatt(1), ad = eatt(2), dd = eatt(3), rho = eatt(4), rhodot = eatt(5);
  const ObservationBasis b = observation_basis(alpha, delta);
  const double cd = std::cos(delta), sd = std::sin(delta);
  // derivatives of the basis
  const Vec3 de_rho_da = cd * b.e_alpha;
  const Vec3 de_rho_dd = b.e_delta;
  const Vec3 de_alpha_da = -(cd * b.e_rho - sd * b.e_delta);
  const Vec3 de_delta_da = -sd * b.e_alpha;
  const Vec3 de_delta_dd = -b.e_rho;
  const Vec3 tangential = ad * cd * b.e_alpha + dd * b.e_delta;

  Mat6 J = Mat6::Zero();
  J.block<3, 1>(0, 0) = rho * de_rho_da;
  J.block<3, 1>(0, 1) = rho * de_rho_dd;
  J.block<3, 1>(0, 4) = b.e_rho;

  J.block<3, 1>(3, 0) = rhodot * de_rho_da + rho * (ad * cd * de_alpha_da + dd * de_delta_da);
  J.block<3, 1>(3, 1) = rhodot * de_rho_dd + rho * (-ad * sd * b.e_alpha + dd * de_delta_dd);
  J.block<3, 1>(3, 2) = rho * cd * b.e_alpha;
  J.block<3, 1>(3, 3) = rho * b.e_delta;
  J.block<3, 1>(3, 4) = tangential;
  J.block<3, 1>(3, 5) = b.e_rho;
  return J;
}

Mat12 cartesian_from_attributable_jacobian(const Vec6& eatt1, const Vec6& eatt2, const ObserverState& obs1,
                                           const ObserverState& obs2) {
  Mat12 J = Mat12::Zero();
  J.topLeftCorner<6, 6>() = attributable_to_cartesian_jacobian(eatt1, obs1);
  J.bottomRightCorner<6, 6>() = attributable_to_cartesian_jacobian(eatt2, obs2);
  return J;
}

ImplicitJacobian implicit_solution_jacobian(const AttributablePair& pair, const LinkageSolution& sol, double mu) {
  const Mat12 T = cartesian_from_attributable_jacobian(attributable_coordinates(pair, sol, 1),
                                                       attributable_coordinates(pair, sol, 2), pair.obs1, pair.obs2);
  const Mat4x12 P = psi_jacobian(sol.state1, sol.state2, pair.obs2.q, mu);
  const Eigen::Matrix<double, 4, 12> PT = P * T;
  const ColumnSplit cols = column_split(pair.kind);
  Mat4 dPhi_dY;
  Mat4x8 dPhi_dA;
  for (int k = 0; k < 4; ++k) dPhi_dY.col(k) = PT.col(cols.y[static_cast<std::size_t>(k)]);
  for (int k = 0; k < 8; ++k) dPhi_dA.col(k) = PT.col(cols.a[static_cast<std::size_t>(k)]);

  // Equilibrate rows and columns so the conditioning reflects geometry, not units.
  Vec4 rs, cs;
  for (int k = 0; k < 4; ++k) {
    const double rmax = dPhi_dY.row(k).cwiseAbs().maxCoeff();
    rs(k) = rmax > 0.0 ? 1.0 / rmax : 1.0;
  }
  const Mat4 rowscaled = rs.asDiagonal() * dPhi_dY;
  for (int k = 0; k < 4; ++k) {
    const double cmax = rowscaled.col(k).cwiseAbs().maxCoeff();
    cs(k) = cmax > 0.0 ? 1.0 / cmax : 1.0;
  }
  const Mat4 scaled = rowscaled * cs.asDiagonal();
  const Vec4 sv = Eigen::JacobiSVD<Mat4>(scaled).singularValues();

  ImplicitJacobian out;
  out.condition_number = sv(3) > 0.0 ? sv(0) / sv(3) : std::numeric_limits<double>::infinity();
  out.ill_conditioned = !(out.condition_number < kIllConditioned);
  if (sv(3) == 0.0 || !std::isfinite(sv(3)))
    fail(ErrorKind::Numerical, "implicit_solution_jacobian: d Phi / d Y is singular");
  // dY = -S_c (R dPhi_dY S_c)^{-1} R dPhi_dA
  const Mat4x8 rhs = rs.asDiagonal() * dPhi_dA;
  out.dY_dA = -(cs.asDiagonal() * Eigen::PartialPivLU<Mat4>(scaled).solve(rhs));
  return out;
}

Mat6 cartesian_covariance(const AttributablePair& pair, const LinkageSolution& sol, const Mat4x8& dY_dA,
                          int epoch) {
  if (epoch != 1 && epoch != 2) fail(ErrorKind::Input, "cartesian_covariance: epoch must be 1 or 2");
  Eigen::Matrix<double, 6, 8> datt = Eigen::Matrix<double, 6, 8>::Zero();
  if (epoch == 2) {
    datt.block<4, 4>(0, 4).setIdentity();
    datt.row(4) = dY_dA.row(2);
    datt.row(5) = dY_dA.row(3);
  } else if (pair.kind == LinkageKind::Optical) {
    datt.block<4, 4>(0, 0).setIdentity();
    datt.row(4) = dY_dA.row(0);
    datt.row(5) = dY_dA.row(1);
  } else {
    datt(0, 0) = 1.0;
    datt(1, 1) = 1.0;
    datt.row(2) = dY_dA.row(0);
    datt.row(3) = dY_dA.row(1);
    datt(4, 2) = 1.0;
    datt(5, 3) = 1.0;
  }
  const ObserverState& obs = epoch == 1 ? pair.obs1 : pair.obs2;
  const Eigen::Matrix<double, 6, 8> J =
      attributable_to_cartesian_jacobian(attributable_coordinates(pair, sol, epoch), obs) * datt;
  return symmetrized<Mat6>(J * pair.gamma * J.transpose());
}

void attach_covariance(const AttributablePair& pair, LinkageSolution& sol, double mu) {
  const ImplicitJacobian ij = implicit_solution_jacobian(pair, sol, mu);
  SolutionCovariance cov;
  cov.dY_dA = ij.dY_dA;
  cov.condition_number = ij.condition_number;
  cov.ill_conditioned = ij.ill_conditioned;
  cov.gamma_car1 = cartesian_covariance(pair, sol, ij.dY_dA, 1);
  cov.gamma_car2 = cartesian_covariance(pair, sol, ij.dY_dA, 2);
  if (ij.ill_conditioned) sol.warnings.emplace_back("ill-conditioned solution: d Phi / d Y condition number above 1e12");
  if (sol.elements1) {
    const Mat6 K = cartesian_to_keplerian_jacobian(*sol.elements1, mu);
    sol.element_covariance1 = symmetrized<Mat6>(K * cov.gamma_car1 * K.transpose());
  }
  sol.covariance = cov;
}

}  // namespace keplink
