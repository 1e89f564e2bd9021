#include "keplink/selection.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "keplink/errors.hpp"

namespace keplink {

namespace {

constexpr double kMaxCondition = 1e12;

// Inverse of a symmetric covariance, regularized when badly conditioned.
std::optional<Mat4> regularized_inverse(const Mat4& g) {
  if (!g.allFinite()) return std::nullopt;
  const Mat4 s = 0.5 * (g + g.transpose());
  const Vec4 ev = Eigen::SelfAdjointEigenSolver<Mat4>(s, Eigen::EigenvaluesOnly).eigenvalues();
  const double lmax = ev.cwiseAbs().maxCoeff();
  if (!(lmax > 0.0)) return std::nullopt;
  Mat4 reg = s;
  if (ev(0) < lmax / kMaxCondition) reg.diagonal().array() += lmax / kMaxCondition - std::min(ev(0), 0.0);
  return Eigen::PartialPivLU<Mat4>(reg).inverse();
}

}  // namespace

PredictedAttributable predict_attributable(const KeplerianElements& elements1, const Mat6& gamma1,
                                           const ObserverState& obs2, double tbar2, const UnitSystem& units) {
  if (!(elements1.e < 1.0) || !(elements1.a > 0.0))
    fail(ErrorKind::Domain, "predict_attributable: non-elliptic elements");
  double t = tbar2;
  CartesianState s = propagate_kepler(elements1, t, units.mu, units.time_units_per_day);
  for (int it = 0; it < 10; ++it) {
    const double next = tbar2 - units.light_time_days((s.r - obs2.q).norm());
    const bool done = std::abs(next - t) < 1e-13;
    t = next;
    s = propagate_kepler(elements1, t, units.mu, units.time_units_per_day);
    if (done) break;
  }
  const Mat6 phi = propagation_jacobian(elements1, t, units.mu, units.time_units_per_day);
  const KeplerianElements el2 = propagate_elements(elements1, t, units.mu, units.time_units_per_day);
  const Mat6 K = keplerian_to_cartesian_jacobian(el2, units.mu);
  const Mat6 gamma_car = K * phi * gamma1 * phi.transpose() * K.transpose();

  const TopocentricState tp = topocentric_from_relative(s.r - obs2.q, s.rdot - obs2.qdot);
  Vec6 eatt;
  eatt << tp.alpha, tp.delta, tp.alphadot, tp.deltadot, tp.rho, tp.rhodot;
  const Mat6 Jinv = Eigen::PartialPivLU<Mat6>(attributable_to_cartesian_jacobian(eatt, obs2)).inverse();
  const Mat6 gamma_att = Jinv * gamma_car * Jinv.transpose();

  PredictedAttributable out;
  out.A = eatt.head<4>();
  out.gamma = 0.5 * (gamma_att.topLeftCorner<4, 4>() + gamma_att.topLeftCorner<4, 4>().transpose());
  out.epoch = t;
  return out;
}

std::optional<double> identification_penalty(const Vec4& A2, const Mat4& gamma_A2, const PredictedAttributable& pred) {
  const auto C_p = regularized_inverse(pred.gamma);
  const auto C_2 = regularized_inverse(gamma_A2);
  if (!C_p || !C_2) return std::nullopt;
  const Mat4 C0 = *C_p + *C_2;
  const Mat4 G0 = Eigen::PartialPivLU<Mat4>(C0).inverse();
  const Mat4 M = *C_p - *C_p * G0 * *C_p;
  Vec4 d = A2 - pred.A;
  d(0) = -wrap_pi(-d(0));  // (-pi, pi]
  const double chi = d.dot(M * d);
  if (!std::isfinite(chi)) return std::nullopt;
  return std::max(chi, 0.0);
}

std::vector<LinkageSolution> select_solutions(std::vector<LinkageSolution>& solutions,
                                              const OpticalAttributable& att2, const ObserverState& obs2,
                                              double threshold, const UnitSystem& units) {
  std::vector<LinkageSolution> accepted;
  for (auto& sol : solutions) {
    sol.accepted = false;
    sol.chi4.reset();
    if (!sol.elements1 || !sol.element_covariance1) {
      sol.warnings.emplace_back("unselectable: no elliptic elements with covariance at epoch 1");
      continue;
    }
    try {
      const PredictedAttributable pred =
          predict_attributable(*sol.elements1, *sol.element_covariance1, obs2, att2.tbar, units);
      sol.chi4 = identification_penalty(att2.values(), att2.cov, pred);
    } catch (const Error& err) {
      sol.warnings.emplace_back(std::string("unselectable: ") + err.what());
      continue;
    }
    if (!sol.chi4) {
      sol.warnings.emplace_back("unselectable: singular covariance in identification penalty");
      continue;
    }
    sol.accepted = *sol.chi4 <= threshold;
    if (sol.accepted) accepted.push_back(sol);
  }
  return accepted;
}

}  // namespace keplink
