#include "keplink/synthesis.hpp"

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "keplink/errors.hpp"

namespace keplink {

namespace {

struct Seen {
  double epoch = 0.0;
  CartesianState body;
  TopocentricState topo;
};

Seen observe(const KeplerianElements& el, double tbar, const ObserverState& obs, const UnitSystem& units) {
  double t = tbar;
  CartesianState s = propagate_kepler(el, t, units.mu, units.time_units_per_day);
  for (int it = 0; it < 20; ++it) {
    const double next = tbar - units.light_time_days((s.r - obs.q).norm());
    const bool done = std::abs(next - t) < 1e-14 * std::max(1.0, std::abs(tbar));
    t = next;
    s = propagate_kepler(el, t, units.mu, units.time_units_per_day);
    if (done) break;
  }
  const Vec3 d = s.r - obs.q;
  if (!(d.norm() > units.min_rho)) fail(ErrorKind::Domain, "synthesis: body coincides with the observer");
  return {t, s, topocentric_from_relative(d, s.rdot - obs.qdot)};
}

std::vector<double> arc_offsets(const NoiseSpec& noise, double time_units_per_day) {
  if (noise.n_obs < 2) fail(ErrorKind::Input, "synthesis: n_obs must be >= 2");
  if (!(noise.arc_length_days > 0.0)) fail(ErrorKind::Input, "synthesis: arc length must be positive");
  std::vector<double> tau;
  for (int k = 0; k < noise.n_obs; ++k)
    tau.push_back((static_cast<double>(k) / (noise.n_obs - 1) - 0.5) * noise.arc_length_days * time_units_per_day);
  return tau;
}

Eigen::Matrix2d fit_block(const std::vector<double>& tau, double sigma, int degree) {
  if (sigma == 0.0) return Eigen::Matrix2d::Zero();
  return polynomial_fit_covariance(tau, std::vector<double>(tau.size(), sigma), degree);
}

// Gaussian sample with covariance `cov` (zero when cov vanishes).
Vec4 sample(const Mat4& cov, std::mt19937_64& rng) {
  std::normal_distribution<double> n01;
  Vec4 z;
  for (int k = 0; k < 4; ++k) z(k) = n01(rng);
  // eigen-decomposition tolerates singular (PSD) covariances
  const Eigen::SelfAdjointEigenSolver<Mat4> es(cov);
  return es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() * z;
}

}  // namespace

SyntheticPair synthesize_attributables(const KeplerianElements& truth, double tbar1, double tbar2,
                                       const EphemerisModel& model, const NoiseSpec& noise, LinkageKind kind,
                                       const UnitSystem& units) {
  if (!(truth.e < 1.0) || !(truth.a > 0.0)) fail(ErrorKind::Domain, "synthesis: elements must be elliptic");
  SyntheticPair out;
  out.kind = kind;
  out.obs1 = observer_state(model, tbar1);
  out.obs2 = observer_state(model, tbar2);
  const Seen s1 = observe(truth, tbar1, out.obs1, units);
  const Seen s2 = observe(truth, tbar2, out.obs2, units);

  SyntheticTruth& tr = out.truth;
  tr.tbar = {tbar1, tbar2};
  tr.epoch = {s1.epoch, s2.epoch};
  tr.rho = {s1.topo.rho, s2.topo.rho};
  tr.rhodot = {s1.topo.rhodot, s2.topo.rhodot};
  tr.xi = s1.topo.rho * s1.topo.alphadot * std::cos(s1.topo.delta);
  tr.zeta = s1.topo.rho * s1.topo.deltadot;
  tr.state = {s1.body, s2.body};
  tr.alphadot_deltadot = {s1.topo.alphadot, s1.topo.deltadot, s2.topo.alphadot, s2.topo.deltadot};
  tr.elements = truth;

  const std::vector<double> tau = arc_offsets(noise, units.time_units_per_day);
  const int degree = noise.n_obs >= 3 ? 2 : 1;
  auto optical_cov = [&](const TopocentricState& t) {
    const Eigen::Matrix2d a = fit_block(tau, noise.sigma_angle / std::cos(t.delta), degree);
    const Eigen::Matrix2d d = fit_block(tau, noise.sigma_angle, degree);
    Mat4 c = Mat4::Zero();
    c(0, 0) = a(0, 0); c(0, 2) = a(0, 1); c(2, 0) = a(1, 0); c(2, 2) = a(1, 1);
    c(1, 1) = d(0, 0); c(1, 3) = d(0, 1); c(3, 1) = d(1, 0); c(3, 3) = d(1, 1);
    return c;
  };
  auto radar_cov = [&](const TopocentricState& t) {
    const Eigen::Matrix2d a = fit_block(tau, noise.sigma_angle / std::cos(t.delta), degree);
    const Eigen::Matrix2d d = fit_block(tau, noise.sigma_angle, degree);
    const Eigen::Matrix2d r = fit_block(tau, noise.sigma_rho, degree);
    Mat4 c = Mat4::Zero();
    c(0, 0) = a(0, 0);
    c(1, 1) = d(0, 0);
    c.bottomRightCorner<2, 2>() = r;
    return c;
  };

  std::mt19937_64 rng(noise.seed);
  auto perturbed = [&](Vec4 v, const Mat4& cov) {
    if (noise.perturb) v += sample(cov, rng);
    v(0) = wrap_pi(v(0));
    return v;
  };

  if (kind == LinkageKind::Optical) {
    const Mat4 c = optical_cov(s1.topo);
    const Vec4 v = perturbed({s1.topo.alpha, s1.topo.delta, s1.topo.alphadot, s1.topo.deltadot}, c);
    out.opt1 = {v(0), v(1), v(2), v(3), tbar1, c, "synthetic"};
  } else {
    const Mat4 c = radar_cov(s1.topo);
    const Vec4 v = perturbed({s1.topo.alpha, s1.topo.delta, s1.topo.rho, s1.topo.rhodot}, c);
    out.rad1 = {v(0), v(1), v(2), v(3), tbar1, c, "synthetic"};
  }
  const Mat4 c2 = optical_cov(s2.topo);
  const Vec4 v2 = perturbed({s2.topo.alpha, s2.topo.delta, s2.topo.alphadot, s2.topo.deltadot}, c2);
  out.opt2 = {v2(0), v2(1), v2(2), v2(3), tbar2, c2, "synthetic"};
  return out;
}

}  // namespace keplink
