#include "keplink/optical_linkage.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/LU>

#include "keplink/errors.hpp"

namespace keplink {

namespace {

constexpr double kDegenerateRel = 1e-10;

BivariatePoly cx(double c) { return BivariatePoly::constant(c); }

// a + b x as a bivariate polynomial in (x, y) = (rho1, rho2).
BivariatePoly linear_x(double a, double b) { return cx(a) + b * BivariatePoly::x(); }
BivariatePoly linear_y(double a, double b) { return cx(a) + b * BivariatePoly::y(); }

Vec3 transverse_rate(const OpticalAttributable& att, const ObservationBasis& b) {
  return att.alphadot * std::cos(att.delta) * b.e_alpha + att.deltadot * b.e_delta;
}

void require_nondegenerate_cross(const OpticalCoefficients& c1, const OpticalCoefficients& c2) {
  const Vec3 N = c1.D.cross(c2.D);
  if (!(N.norm() > kDegenerateRel * c1.D.norm() * c2.D.norm()))
    fail(ErrorKind::Degenerate, "optical linkage: D1 x D2 vanishes (coincident lines of sight)");
}

// Solve b2 y^2 + b1 y + b0 = 0 for real roots, tolerating a slightly negative
// discriminant at a double root.
std::vector<double> real_quadratic_roots(double b2, double b1, double b0) {
  const double scale = std::max({std::abs(b2), std::abs(b1), std::abs(b0)});
  if (scale == 0.0) return {};
  if (std::abs(b2) <= 1e-14 * scale) {
    if (std::abs(b1) <= 1e-14 * scale) return {};
    return {-b0 / b1};
  }
  double disc = b1 * b1 - 4.0 * b2 * b0;
  if (disc < 0.0) {
    if (disc < -1e-12 * (b1 * b1 + 4.0 * std::abs(b2 * b0))) return {};
    disc = 0.0;
  }
  const double sq = std::sqrt(disc);
  const double t = -0.5 * (b1 + std::copysign(sq, b1));
  if (t == 0.0) return {0.0};
  return {t / b2, b0 / t};
}

// Newton on (p, q) = 0 from a resultant-based starting point. Steps are kept
// while the scaled residual decreases.
std::pair<double, double> refine_pair(const BivariatePoly& p, const BivariatePoly& q, double x, double y) {
  const BivariatePoly px = p.derivative_x(), py = p.derivative_y();
  const BivariatePoly qx = q.derivative_x(), qy = q.derivative_y();
  const double ps = p.max_abs_coefficient(), qs = q.max_abs_coefficient();
  auto residual = [&](double a, double b) { return std::hypot(p(a, b) / ps, q(a, b) / qs); };
  double res = residual(x, y);
  for (int k = 0; k < 3 && res > 0.0; ++k) {
    Eigen::Matrix2d J;
    J << px(x, y), py(x, y), qx(x, y), qy(x, y);
    const Eigen::Vector2d f(p(x, y), q(x, y));
    const Eigen::FullPivLU<Eigen::Matrix2d> lu(J);
    if (!lu.isInvertible()) break;
    const Eigen::Vector2d step = lu.solve(f);
    const double nx = x - step(0), ny = y - step(1);
    const double nres = residual(nx, ny);
    if (!(nres < res) || !(nx > 0.0) || !(ny > 0.0)) break;
    x = nx;
    y = ny;
    res = nres;
  }
  return {x, y};
}

}  // namespace

const char* to_string(Degeneracy d) {
  switch (d) {
    case Degeneracy::QuadraticFormDegenerate: return "quadratic_form_degenerate";
    case Degeneracy::CoincidentLinesOfSight: return "coincident_lines_of_sight";
    case Degeneracy::Zenith: return "zenith";
    case Degeneracy::RadarTripleProduct: return "radar_triple_product";
  }
  return "unknown";
}

OpticalCoefficients compute_optical_coefficients(const OpticalAttributable& att, const ObserverState& obs) {
  const ObservationBasis b = observation_basis(att.alpha, att.delta);
  const double ad = att.alphadot * std::cos(att.delta);
  OpticalCoefficients c;
  c.D = obs.q.cross(b.e_rho);
  c.E = ad * b.e_delta - att.deltadot * b.e_alpha;
  c.F = ad * obs.q.cross(b.e_alpha) + att.deltadot * obs.q.cross(b.e_delta) + b.e_rho.cross(obs.qdot);
  c.G = obs.q.cross(obs.qdot);
  return c;
}

BivariatePoly build_q_poly(const OpticalCoefficients& c1, const OpticalCoefficients& c2) {
  require_nondegenerate_cross(c1, c2);
  const Vec3 N = c1.D.cross(c2.D);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(3, 3);
  m(2, 0) = -c1.E.dot(N);
  m(1, 0) = -c1.F.dot(N);
  m(0, 2) = c2.E.dot(N);
  m(0, 1) = c2.F.dot(N);
  m(0, 0) = (c2.G - c1.G).dot(N);
  return BivariatePoly(m);
}

std::pair<BivariatePoly, BivariatePoly> radial_velocity_polys(const OpticalCoefficients& c1,
                                                              const OpticalCoefficients& c2) {
  require_nondegenerate_cross(c1, c2);
  const Vec3 N = c1.D.cross(c2.D);
  const double n2 = N.squaredNorm();
  // (J x D2) . N = J . (D2 x N), and J has no rho1 rho2 term.
  auto project = [&](const Vec3& u) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(3, 3);
    m(0, 2) = c2.E.dot(u);
    m(2, 0) = -c1.E.dot(u);
    m(0, 1) = c2.F.dot(u);
    m(1, 0) = -c1.F.dot(u);
    m(0, 0) = (c2.G - c1.G).dot(u);
    return BivariatePoly(m);
  };
  return {project(c2.D.cross(N) / n2), project(c1.D.cross(N) / n2)};
}

std::pair<double, double> radial_velocities(double rho1, double rho2, const OpticalCoefficients& c1,
                                            const OpticalCoefficients& c2) {
  require_nondegenerate_cross(c1, c2);
  const Vec3 N = c1.D.cross(c2.D);
  const double n2 = N.squaredNorm();
  const Vec3 J = c2.E * rho2 * rho2 - c1.E * rho1 * rho1 + c2.F * rho2 - c1.F * rho1 + c2.G - c1.G;
  return {J.cross(c2.D).dot(N) / n2, J.cross(c1.D).dot(N) / n2};
}

BivariatePoly build_p_poly(const OpticalPair& pair, double mu) {
  const OpticalCoefficients c1 = compute_optical_coefficients(pair.att1, pair.obs1);
  const OpticalCoefficients c2 = compute_optical_coefficients(pair.att2, pair.obs2);
  const auto [rhodot1, rhodot2] = radial_velocity_polys(c1, c2);

  const ObservationBasis b1 = observation_basis(pair.att1.alpha, pair.att1.delta);
  const ObservationBasis b2 = observation_basis(pair.att2.alpha, pair.att2.delta);
  const Vec3& q1 = pair.obs1.q;
  const Vec3& qd1 = pair.obs1.qdot;
  const Vec3& q2 = pair.obs2.q;
  const Vec3& qd2 = pair.obs2.qdot;
  const Vec3 w1 = transverse_rate(pair.att1, b1);
  const Vec3 w2 = transverse_rate(pair.att2, b2);
  const Vec3 v = b2.e_rho.cross(q2);

  // Epoch 1, with rdot1 = rhodot1 e1 + u1 and u1 = qdot1 + rho1 w1:
  //   |rdot1|^2 r1 - (rdot1.r1) rdot1
  //     = rhodot1^2 [q1 - (q1.e1) e1] + rhodot1 [2 (e1.u1) r1 - (e1.r1) u1 - (u1.r1) e1]
  //       + |u1|^2 r1 - (u1.r1) u1,
  // so the rhodot1^2 rho1 e1 term is gone before any polynomial is formed.
  const Vec3& e1 = b1.e_rho;
  const BivariatePoly r1v = linear_x(q1.dot(v), e1.dot(v));
  const BivariatePoly r1sq = cx(q1.squaredNorm()) + 2.0 * q1.dot(e1) * BivariatePoly::x() +
                             BivariatePoly::x() * BivariatePoly::x();
  const double k0 = (q1 - q1.dot(e1) * e1).dot(v);
  const BivariatePoly u1v = linear_x(qd1.dot(v), w1.dot(v));
  const BivariatePoly u1r1 = linear_x(qd1.dot(q1), qd1.dot(e1) + w1.dot(q1));
  const BivariatePoly u1sq = cx(qd1.squaredNorm()) + 2.0 * qd1.dot(w1) * BivariatePoly::x() +
                             w1.squaredNorm() * (BivariatePoly::x() * BivariatePoly::x());
  const BivariatePoly e1r1 = linear_x(q1.dot(e1), 1.0);
  const BivariatePoly K1 = 2.0 * e1.dot(qd1) * r1v - e1r1 * u1v - e1.dot(v) * u1r1;
  const BivariatePoly K2 = u1sq * r1v - u1r1 * u1v;

  // Epoch 2: rdot2 . v does not involve rhodot2 and is linear in rho2.
  const Vec3& e2 = b2.e_rho;
  const BivariatePoly r2dot_v = linear_y(qd2.dot(v), w2.dot(v));
  const BivariatePoly r2dot_r2 = rhodot2 * linear_y(q2.dot(e2), 1.0) + linear_y(qd2.dot(q2), qd2.dot(e2) + w2.dot(q2));

  const BivariatePoly T = k0 * (rhodot1 * rhodot1) + rhodot1 * K1 + K2 + r2dot_r2 * r2dot_v;
  return (mu * mu) * (r1v * r1v) - r1sq * (T * T);
}

std::pair<CartesianState, CartesianState> optical_states(double rho1, double rho2, const OpticalPair& pair) {
  const OpticalCoefficients c1 = compute_optical_coefficients(pair.att1, pair.obs1);
  const OpticalCoefficients c2 = compute_optical_coefficients(pair.att2, pair.obs2);
  const auto [rd1, rd2] = radial_velocities(rho1, rho2, c1, c2);
  const ObservationBasis b1 = observation_basis(pair.att1.alpha, pair.att1.delta);
  const ObservationBasis b2 = observation_basis(pair.att2.alpha, pair.att2.delta);
  CartesianState s1{body_position(pair.obs1.q, rho1, b1),
                    body_velocity(pair.obs1.qdot, rd1, rho1, pair.att1.alphadot, pair.att1.deltadot, b1,
                                  pair.att1.delta),
                    pair.att1.tbar};
  CartesianState s2{body_position(pair.obs2.q, rho2, b2),
                    body_velocity(pair.obs2.qdot, rd2, rho2, pair.att2.alphadot, pair.att2.deltadot, b2,
                                  pair.att2.delta),
                    pair.att2.tbar};
  return {s1, s2};
}

double lenz_residual(double rho1, double rho2, const OpticalPair& pair, double mu) {
  const ObservationBasis b2 = observation_basis(pair.att2.alpha, pair.att2.delta);
  const Vec3 v = b2.e_rho.cross(pair.obs2.q);
  if (!(v.norm() > kDegenerateRel * pair.obs2.q.norm()))
    fail(ErrorKind::Degenerate, "lenz_residual: zenith observation, e_rho2 x q2 = 0");
  const auto [s1, s2] = optical_states(rho1, rho2, pair);
  return (laplace_lenz(s1.r, s1.rdot, mu) - laplace_lenz(s2.r, s2.rdot, mu)).dot(v) / v.norm();
}

std::vector<Degeneracy> detect_degenerate_optical(const OpticalCoefficients& c1, const OpticalCoefficients& c2,
                                                 const OpticalAttributable& att2, const ObserverState& obs2) {
  std::vector<Degeneracy> flags;
  const Vec3 N = c1.D.cross(c2.D);
  const double dn = c1.D.norm() * c2.D.norm();
  if (!(N.norm() > kDegenerateRel * dn)) {
    flags.push_back(Degeneracy::CoincidentLinesOfSight);
  }
  const bool e1_flat = std::abs(c1.E.dot(N)) <= kDegenerateRel * c1.E.norm() * dn;
  const bool e2_flat = std::abs(c2.E.dot(N)) <= kDegenerateRel * c2.E.norm() * dn;
  if (e1_flat && e2_flat) flags.push_back(Degeneracy::QuadraticFormDegenerate);
  const ObservationBasis b2 = observation_basis(att2.alpha, att2.delta);
  if (!(b2.e_rho.cross(obs2.q).norm() > kDegenerateRel * obs2.q.norm())) flags.push_back(Degeneracy::Zenith);
  return flags;
}

Scaling canonical_scaling(const ObserverState& obs1, const ObserverState& obs2, double mu) {
  if (!(mu > 0.0)) fail(ErrorKind::Domain, "canonical_scaling: mu must be positive");
  Scaling s;
  const double l = 0.5 * (obs1.q.norm() + obs2.q.norm());
  s.length = l > 0.0 ? l : 1.0;
  s.time = std::sqrt(s.length * s.length * s.length / mu);
  return s;
}

OpticalPair scale_pair(const OpticalPair& pair, const Scaling& s) {
  OpticalPair out = pair;
  for (auto* att : {&out.att1, &out.att2}) {
    att->alphadot *= s.time;
    att->deltadot *= s.time;
  }
  for (auto* obs : {&out.obs1, &out.obs2}) {
    obs->q /= s.length;
    obs->qdot *= s.time / s.length;
  }
  return out;
}

OpticalLinkageReport link_optical_report(const OpticalPair& pair, const UnitSystem& units, const LinkageOptions& opts) {
  OpticalLinkageReport report;
  const Scaling sc = canonical_scaling(pair.obs1, pair.obs2, units.mu);
  report.length_scale = sc.length;
  report.time_scale = sc.time;
  const OpticalPair sp = scale_pair(pair, sc);

  const OpticalCoefficients c1 = compute_optical_coefficients(sp.att1, sp.obs1);
  const OpticalCoefficients c2 = compute_optical_coefficients(sp.att2, sp.obs2);
  const auto flags = detect_degenerate_optical(c1, c2, sp.att2, sp.obs2);
  if (!flags.empty()) {
    std::string msg = "optical linkage: degenerate configuration:";
    for (auto f : flags) msg += std::string(" ") + to_string(f);
    fail(ErrorKind::Degenerate, msg);
  }

  const BivariatePoly q = build_q_poly(c1, c2);
  const BivariatePoly p = build_p_poly(sp, 1.0);
  ResultantOptions ropts;
  ropts.fft_points = opts.fft_points;
  report.resultant = sylvester_resultant(p, q, ropts);
  const UnivariatePoly& res = report.resultant.resultant;
  if (res.is_zero()) fail(ErrorKind::Degenerate, "optical linkage: resultant vanishes identically");
  if (res.degree() < 1) return report;

  try {
    report.resultant_roots = aberth_roots(res);
  } catch (const RootFindingError& err) {
    report.resultant_roots = err.roots();
    report.warnings.emplace_back(err.what());
  }
  // the interpolant loses accuracy away from its node circle; the determinant itself does not
  report.resultant_roots = refine_determinant_roots(report.resultant.matrix, report.resultant_roots);

  const double b2 = q.coeff(0, 2), b1 = q.coeff(0, 1);
  for (double x : real_positive_roots(report.resultant_roots, opts.real_tol)) {
    const double b0 = q.coeff(2, 0) * x * x + q.coeff(1, 0) * x + q.coeff(0, 0);
    for (double y : real_quadratic_roots(b2, b1, b0)) {
      if (!(y > 0.0)) continue;
      LinkageCandidate cand;
      std::tie(cand.rho1, cand.rho2) = refine_pair(p, q, x, y);
      cand.lenz_residual = lenz_residual(cand.rho1, cand.rho2, sp, 1.0);
      cand.spurious = !(std::abs(cand.lenz_residual) < opts.spurious_tol);
      cand.rho1 *= sc.length;
      cand.rho2 *= sc.length;
      report.candidates.push_back(cand);
    }
  }

  const OpticalCoefficients oc1 = compute_optical_coefficients(pair.att1, pair.obs1);
  const OpticalCoefficients oc2 = compute_optical_coefficients(pair.att2, pair.obs2);
  const ObservationBasis eb2 = observation_basis(pair.att2.alpha, pair.att2.delta);
  for (const auto& cand : report.candidates) {
    if (cand.spurious) continue;
    if (cand.rho1 < units.min_rho || cand.rho2 < units.min_rho) continue;
    // a double root of the resultant can produce the same pair twice
    const bool duplicate = std::any_of(report.solutions.begin(), report.solutions.end(), [&](const auto& s) {
      return std::abs(s.rho1 - cand.rho1) <= 1e-9 * cand.rho1 && std::abs(s.rho2 - cand.rho2) <= 1e-9 * cand.rho2;
    });
    if (duplicate) continue;

    LinkageSolution sol;
    sol.kind = LinkageKind::Optical;
    sol.rho1 = cand.rho1;
    sol.rho2 = cand.rho2;
    std::tie(sol.rhodot1, sol.rhodot2) = radial_velocities(sol.rho1, sol.rho2, oc1, oc2);
    sol.alphadot1 = pair.att1.alphadot;
    sol.deltadot1 = pair.att1.deltadot;
    std::tie(sol.state1, sol.state2) = optical_states(sol.rho1, sol.rho2, pair);
    sol.state1.epoch = aberration_correct(pair.att1.tbar, sol.rho1, units);
    sol.state2.epoch = aberration_correct(pair.att2.tbar, sol.rho2, units);
    sol.lenz_residual = cand.lenz_residual;
    try {
      sol.elements1 = cartesian_to_keplerian(sol.state1, units.mu);
      sol.elements2 = cartesian_to_keplerian(sol.state2, units.mu);
      sol.compat = compatibility_residuals(sol.state1, sol.state2, eb2.e_rho, units.mu, units.time_units_per_day);
    } catch (const Error& err) {
      sol.warnings.emplace_back(err.what());
    }
    if (!sol.elements1) sol.warnings.emplace_back("non-elliptic preliminary orbit; excluded from chi4 selection");
    report.solutions.push_back(std::move(sol));
  }
  return report;
}

std::vector<LinkageSolution> link_optical(const OpticalPair& pair, const UnitSystem& units, const LinkageOptions& opts) {
  return link_optical_report(pair, units, opts).solutions;
}

}  // namespace keplink
