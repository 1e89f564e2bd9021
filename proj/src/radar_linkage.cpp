#include "keplink/radar_linkage.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "keplink/errors.hpp"

namespace keplink {

namespace {

constexpr double kDegenerateRel = 1e-10;

UnivariatePoly cu(double c) { return UnivariatePoly::constant(c); }
UnivariatePoly lin(double a, double b) { return UnivariatePoly(std::vector<double>{a, b}); }

Complex newton_polish(const std::vector<Complex>& c, Complex z, int steps) {
  auto eval = [&c](Complex x, Complex& d) {
    Complex p = 0.0;
    d = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) {
      d = d * x + p;
      p = p * x + *it;
    }
    return p;
  };
  Complex d;
  double f = std::abs(eval(z, d));
  for (int k = 0; k < steps && f > 0.0; ++k) {
    if (d == Complex(0.0)) break;
    const Complex next = z - eval(z, d) / d;
    Complex dn;
    const double fn = std::abs(eval(next, dn));
    if (!(fn < f)) break;
    z = next;
    f = fn;
    d = dn;
  }
  return z;
}

// Roots of a monic quadratic z^2 + b z + c.
std::vector<Complex> monic_quadratic(Complex b, Complex c) {
  const Complex sq = std::sqrt(b * b - 4.0 * c);
  // choose the sign that avoids cancellation
  const Complex t = std::real(std::conj(b) * sq) >= 0.0 ? -0.5 * (b + sq) : -0.5 * (b - sq);
  if (t == Complex(0.0)) return {0.0, 0.0};
  return {t, c / t};
}

// Roots of a monic cubic z^3 + a z^2 + b z + c (Cardano in complex arithmetic).
std::vector<Complex> monic_cubic(Complex a, Complex b, Complex c) {
  const Complex P = b - a * a / 3.0;
  const Complex Q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
  const Complex sq = std::sqrt(Q * Q / 4.0 + P * P * P / 27.0);
  Complex u3 = -Q / 2.0 + sq;
  if (std::abs(-Q / 2.0 - sq) > std::abs(u3)) u3 = -Q / 2.0 - sq;
  std::vector<Complex> t;
  if (u3 == Complex(0.0)) {
    t = {0.0, 0.0, 0.0};
  } else {
    const Complex u = std::pow(u3, 1.0 / 3.0);
    const Complex omega = std::polar(1.0, 2.0 * kPi / 3.0);
    for (int k = 0; k < 3; ++k) {
      const Complex uk = u * std::pow(omega, k);
      t.push_back(uk - P / (3.0 * uk));
    }
  }
  const std::vector<Complex> coeffs{c, b, a, 1.0};
  for (auto& z : t) z = newton_polish(coeffs, z - a / 3.0, 3);
  return t;
}

std::vector<Complex> monic_quartic(double a, double b, double c, double d) {
  // x = y - a/4: y^4 + p y^2 + q y + r
  const double p = b - 3.0 * a * a / 8.0;
  const double q = c - a * b / 2.0 + a * a * a / 8.0;
  const double r = d - a * c / 4.0 + a * a * b / 16.0 - 3.0 * a * a * a * a / 256.0;
  std::vector<Complex> y;
  const double scale = std::max({std::abs(p), std::sqrt(std::abs(r)), std::cbrt(std::abs(q)), 1e-300});
  if (std::abs(q) <= 1e-14 * scale * scale * scale) {
    for (const Complex& s : monic_quadratic(p, r)) {
      const Complex rt = std::sqrt(s);
      y.push_back(rt);
      y.push_back(-rt);
    }
  } else {
    // resolvent m^3 + p m^2 + (p^2/4 - r) m - q^2/8 = 0; take the root of largest modulus (nonzero since q != 0)
    const auto ms = monic_cubic(p, p * p / 4.0 - r, -q * q / 8.0);
    Complex m = ms[0];
    for (const auto& cand : ms)
      if (std::abs(cand) > std::abs(m)) m = cand;
    const Complex s = std::sqrt(2.0 * m);
    // (y^2 + p/2 + m)^2 = (s y - q/(2 s))^2
    for (const Complex& z : monic_quadratic(-s, p / 2.0 + m + q / (2.0 * s))) y.push_back(z);
    for (const Complex& z : monic_quadratic(s, p / 2.0 + m - q / (2.0 * s))) y.push_back(z);
  }
  for (auto& z : y) z -= a / 4.0;
  return y;
}

Scaling radar_scaling(const RadarOpticalPair& pair, double mu) { return canonical_scaling(pair.obs1, pair.obs2, mu); }

}  // namespace

RadarCoefficients radar_coefficients(const RadarAttributable& att, const ObserverState& obs) {
  if (!(att.rho > 0.0)) fail(ErrorKind::Domain, "radar_coefficients: rho must be positive");
  const ObservationBasis b = observation_basis(att.alpha, att.delta);
  const Vec3 r = body_position(obs.q, att.rho, b);
  return {r.cross(b.e_alpha), r.cross(b.e_delta), r.cross(obs.qdot) + att.rhodot * obs.q.cross(b.e_rho)};
}

EliminationQuadratics eliminate_linear(const RadarCoefficients& rc1, const OpticalCoefficients& oc2) {
  const Vec3 BxD = rc1.B.cross(oc2.D);
  const Vec3 AxD = rc1.A.cross(oc2.D);
  const Vec3 AxB = rc1.A.cross(rc1.B);
  const double det = rc1.A.dot(BxD);
  if (!(std::abs(det) > kDegenerateRel * rc1.A.norm() * rc1.B.norm() * oc2.D.norm()))
    fail(ErrorKind::Degenerate, "eliminate_linear: A1 . B1 x D2 vanishes");
  const double gamma = 1.0 / det;
  const Vec3 K0 = oc2.G - rc1.C;
  EliminationQuadratics out;
  out.X = {gamma * oc2.E.dot(BxD), gamma * oc2.F.dot(BxD), gamma * K0.dot(BxD)};
  out.Z = {-gamma * oc2.E.dot(AxD), -gamma * oc2.F.dot(AxD), -gamma * K0.dot(AxD)};
  out.R = {-gamma * oc2.E.dot(AxB), -gamma * oc2.F.dot(AxB), -gamma * K0.dot(AxB)};
  return out;
}

UnivariatePoly build_quartic(const RadarOpticalPair& pair, double mu) {
  const RadarCoefficients rc1 = radar_coefficients(pair.att1, pair.obs1);
  const OpticalCoefficients oc2 = compute_optical_coefficients(pair.att2, pair.obs2);
  const EliminationQuadratics el = eliminate_linear(rc1, oc2);

  const ObservationBasis b1 = observation_basis(pair.att1.alpha, pair.att1.delta);
  const ObservationBasis b2 = observation_basis(pair.att2.alpha, pair.att2.delta);
  const Vec3& q1 = pair.obs1.q;
  const Vec3& q2 = pair.obs2.q;
  const Vec3& qd2 = pair.obs2.qdot;
  const Vec3 r1 = q1 + pair.att1.rho * b1.e_rho;
  const Vec3 k = pair.att1.rhodot * b1.e_rho + pair.obs1.qdot;  // rdot1 = xi e_alpha + zeta e_delta + k
  const Vec3 v = b2.e_rho.cross(q2);
  const Vec3 w2 = pair.att2.alphadot * std::cos(pair.att2.delta) * b2.e_alpha + pair.att2.deltadot * b2.e_delta;

  const UnivariatePoly xi = el.X.poly();
  const UnivariatePoly zeta = el.Z.poly();
  const UnivariatePoly rhodot2 = el.R.poly();

  const UnivariatePoly rdot1_sq = xi * xi + zeta * zeta + 2.0 * k.dot(b1.e_alpha) * xi +
                                  2.0 * k.dot(b1.e_delta) * zeta + cu(k.squaredNorm());
  const UnivariatePoly rdot1_r1 = r1.dot(b1.e_alpha) * xi + r1.dot(b1.e_delta) * zeta + cu(k.dot(r1));
  const UnivariatePoly rdot1_v = v.dot(b1.e_alpha) * xi + v.dot(b1.e_delta) * zeta + cu(k.dot(v));
  const UnivariatePoly epoch1 =
      r1.dot(v) * (rdot1_sq - cu(mu / r1.norm())) - rdot1_r1 * rdot1_v;

  const UnivariatePoly rdot2_v = lin(qd2.dot(v), w2.dot(v));
  const UnivariatePoly rdot2_r2 = rhodot2 * lin(q2.dot(b2.e_rho), 1.0) + lin(qd2.dot(q2), qd2.dot(b2.e_rho) + w2.dot(q2));
  return epoch1 + rdot2_r2 * rdot2_v;
}

std::vector<Complex> solve_quartic(const UnivariatePoly& poly) {
  std::vector<double> c = poly.coefficients();
  double mx = 0.0;
  for (double v : c) mx = std::max(mx, std::abs(v));
  while (!c.empty() && std::abs(c.back()) <= 1e-12 * mx) c.pop_back();
  const int deg = static_cast<int>(c.size()) - 1;
  if (deg < 1) fail(ErrorKind::Domain, "solve_quartic: polynomial has no roots (degree 0)");
  if (deg > 4) fail(ErrorKind::Domain, "solve_quartic: degree above 4");
  const double lead = c.back();
  for (double& v : c) v /= lead;

  std::vector<Complex> roots;
  switch (deg) {
    case 1: roots = {Complex(-c[0])}; break;
    case 2: roots = monic_quadratic(c[1], c[0]); break;
    case 3: roots = monic_cubic(c[2], c[1], c[0]); break;
    default: roots = monic_quartic(c[3], c[2], c[1], c[0]); break;
  }
  const std::vector<Complex> cc(c.begin(), c.end());
  for (auto& z : roots) z = newton_polish(cc, z, 3);
  return roots;
}

std::vector<Degeneracy> detect_degenerate_radar(const RadarCoefficients& rc1, const OpticalCoefficients& oc2,
                                               const OpticalAttributable& att2, const ObserverState& obs2) {
  std::vector<Degeneracy> flags;
  const double det = rc1.A.dot(rc1.B.cross(oc2.D));
  if (!(std::abs(det) > kDegenerateRel * rc1.A.norm() * rc1.B.norm() * oc2.D.norm()))
    flags.push_back(Degeneracy::RadarTripleProduct);
  const ObservationBasis b2 = observation_basis(att2.alpha, att2.delta);
  if (!(b2.e_rho.cross(obs2.q).norm() > kDegenerateRel * obs2.q.norm())) flags.push_back(Degeneracy::Zenith);
  return flags;
}

RadarOpticalPair scale_pair(const RadarOpticalPair& pair, const Scaling& s) {
  RadarOpticalPair out = pair;
  out.att1.rho /= s.length;
  out.att1.rhodot *= s.time / s.length;
  out.att2.alphadot *= s.time;
  out.att2.deltadot *= s.time;
  for (auto* obs : {&out.obs1, &out.obs2}) {
    obs->q /= s.length;
    obs->qdot *= s.time / s.length;
  }
  return out;
}

RadarLinkageReport link_radar_optical_report(const RadarOpticalPair& pair, const UnitSystem& units,
                                             const LinkageOptions& opts) {
  RadarLinkageReport report;
  report.scaling = radar_scaling(pair, units.mu);
  const Scaling& sc = report.scaling;
  const RadarOpticalPair sp = scale_pair(pair, sc);

  const RadarCoefficients rc1 = radar_coefficients(sp.att1, sp.obs1);
  const OpticalCoefficients oc2 = compute_optical_coefficients(sp.att2, sp.obs2);
  const auto flags = detect_degenerate_radar(rc1, oc2, sp.att2, sp.obs2);
  if (!flags.empty()) {
    std::string msg = "radar-optical linkage: degenerate configuration:";
    for (auto f : flags) msg += std::string(" ") + to_string(f);
    fail(ErrorKind::Degenerate, msg);
  }
  const EliminationQuadratics el = eliminate_linear(rc1, oc2);
  report.quartic = build_quartic(sp, 1.0);
  if (report.quartic.degree() < 1) return report;
  report.roots = solve_quartic(report.quartic);

  const ObservationBasis b1 = observation_basis(pair.att1.alpha, pair.att1.delta);
  const ObservationBasis b2 = observation_basis(pair.att2.alpha, pair.att2.delta);
  const double cosd1 = std::cos(pair.att1.delta);
  const double speed = sc.length / sc.time;
  for (double y : real_positive_roots(report.roots, opts.real_tol)) {
    y = polish_real_root(report.quartic, y, opts.polish_steps);
    LinkageSolution sol;
    sol.kind = LinkageKind::RadarOptical;
    sol.rho1 = pair.att1.rho;
    sol.rhodot1 = pair.att1.rhodot;
    sol.rho2 = y * sc.length;
    if (sol.rho2 < units.min_rho) continue;
    sol.rhodot2 = el.R(y) * speed;
    const double xi = el.X(y) * speed;
    const double zeta = el.Z(y) * speed;
    if (!(cosd1 > 1e-9) || !(sol.rho1 > 1e-9 * sc.length))
      fail(ErrorKind::Domain, "radar-optical linkage: cannot convert (xi, zeta) to angular rates");
    sol.alphadot1 = xi / (sol.rho1 * cosd1);
    sol.deltadot1 = zeta / sol.rho1;

    sol.state1 = {body_position(pair.obs1.q, sol.rho1, b1),
                  body_velocity(pair.obs1.qdot, sol.rhodot1, sol.rho1, sol.alphadot1, sol.deltadot1, b1,
                                pair.att1.delta),
                  aberration_correct(pair.att1.tbar, sol.rho1, units)};
    sol.state2 = {body_position(pair.obs2.q, sol.rho2, b2),
                  body_velocity(pair.obs2.qdot, sol.rhodot2, sol.rho2, pair.att2.alphadot, pair.att2.deltadot, b2,
                                pair.att2.delta),
                  aberration_correct(pair.att2.tbar, sol.rho2, units)};
    const Vec3 v = b2.e_rho.cross(pair.obs2.q);
    sol.lenz_residual = (laplace_lenz(sol.state1.r, sol.state1.rdot, units.mu) -
                         laplace_lenz(sol.state2.r, sol.state2.rdot, units.mu))
                            .dot(v) / v.norm();
    try {
      sol.elements1 = cartesian_to_keplerian(sol.state1, units.mu);
      sol.elements2 = cartesian_to_keplerian(sol.state2, units.mu);
      sol.compat = compatibility_residuals(sol.state1, sol.state2, b2.e_rho, units.mu, units.time_units_per_day);
    } catch (const Error& err) {
      sol.warnings.emplace_back(err.what());
    }
    if (!sol.elements1) sol.warnings.emplace_back("non-elliptic preliminary orbit; excluded from chi4 selection");
    report.solutions.push_back(std::move(sol));
  }
  return report;
}

std::vector<LinkageSolution> link_radar_optical(const RadarOpticalPair& pair, const UnitSystem& units,
                                                const LinkageOptions& opts) {
  return link_radar_optical_report(pair, units, opts).solutions;
}

}  // namespace keplink
