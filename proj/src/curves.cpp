#include "keplink/curves.hpp"

#include <cmath>
#include <array>
#include <fstream>
#include <limits>
#include <iomanip>

#include "keplink/errors.hpp"

namespace keplink {

namespace {

std::vector<double> axis(double lo, double hi, int n) {
  std::vector<double> out;
  for (int k = 0; k < n; ++k) out.push_back(n == 1 ? lo : lo + (hi - lo) * k / (n - 1));
  return out;
}

// Positive real roots of q(rho1, .) in increasing order, with a slot per branch.
std::array<double, 2> q_branches(const BivariatePoly& q, double rho1) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double a = q.coeff(0, 2);
  const double b = q.coeff(1, 1) * rho1 + q.coeff(0, 1);
  const double c = q.coeff(2, 0) * rho1 * rho1 + q.coeff(1, 0) * rho1 + q.coeff(0, 0);
  if (a == 0.0) return {b != 0.0 ? -c / b : nan, nan};
  const double disc = b * b - 4 * a * c;
  if (disc < 0.0) return {nan, nan};
  const double s = std::sqrt(disc);
  const double t = -0.5 * (b + std::copysign(s, b));
  double r1 = t / a, r2 = t != 0.0 ? c / t : -b / a;
  if (r1 > r2) std::swap(r1, r2);
  return {r1, r2};
}

}  // namespace

const char* to_string(CurveKind k) {
  switch (k) {
    case CurveKind::Q: return "q";
    case CurveKind::P: return "p";
    case CurveKind::Lenz: return "lenz";
    case CurveKind::Energy: return "energy";
  }
  return "?";
}

double curve_value(CurveKind kind, double rho1, double rho2, const OpticalPair& pair, double mu) {
  const OpticalCoefficients c1 = compute_optical_coefficients(pair.att1, pair.obs1);
  const OpticalCoefficients c2 = compute_optical_coefficients(pair.att2, pair.obs2);
  switch (kind) {
    case CurveKind::Q: return build_q_poly(c1, c2)(rho1, rho2);
    case CurveKind::P: return build_p_poly(pair, mu)(rho1, rho2);
    default: break;
  }
  const auto [s1, s2] = optical_states(rho1, rho2, pair);
  if (kind == CurveKind::Lenz) {
    const ObservationBasis b2 = observation_basis(pair.att2.alpha, pair.att2.delta);
    const Vec3 v = b2.e_rho.cross(pair.obs2.q);
    return mu * (laplace_lenz(s1.r, s1.rdot, mu) - laplace_lenz(s2.r, s2.rdot, mu)).dot(v);
  }
  // |rdot1|^2/2 - mu/|r1| = |rdot2|^2/2 - mu/|r2| with a = (|rdot1|^2 - |rdot2|^2)/2:
  // |r2|(mu - a|r1|) = mu|r1|, squared twice to remove |r1| and |r2|.
  const double a = 0.5 * (s1.rdot.squaredNorm() - s2.rdot.squaredNorm());
  const double R1 = s1.r.squaredNorm(), R2 = s2.r.squaredNorm();
  const double lhs = R2 * (mu * mu + a * a * R1) - mu * mu * R1;
  return lhs * lhs - 4.0 * a * a * mu * mu * R1 * R2 * R2;
}

std::vector<CurveTable> emit_curve_samples(const OpticalPair& pair, double mu, const CurveGrid& grid) {
  std::vector<CurveTable> out;
  const auto x = axis(grid.rho1_min, grid.rho1_max, std::max(grid.n1, 0));
  const auto y = axis(grid.rho2_min, grid.rho2_max, std::max(grid.n2, 0));
  const OpticalCoefficients c1 = compute_optical_coefficients(pair.att1, pair.obs1);
  const OpticalCoefficients c2 = compute_optical_coefficients(pair.att2, pair.obs2);
  const BivariatePoly q = build_q_poly(c1, c2);
  const BivariatePoly p = build_p_poly(pair, mu);
  for (CurveKind kind : {CurveKind::Q, CurveKind::P, CurveKind::Lenz, CurveKind::Energy}) {
    CurveTable t;
    t.kind = kind;
    t.rho1 = x;
    t.rho2 = y;
    t.value.reserve(x.size() * y.size());
    for (double r1 : x)
      for (double r2 : y) {
        if (kind == CurveKind::Q)
          t.value.push_back(q(r1, r2));
        else if (kind == CurveKind::P)
          t.value.push_back(p(r1, r2));
        else
          t.value.push_back(curve_value(kind, r1, r2, pair, mu));
      }
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<CurveIntersection> q_intersections(const OpticalPair& pair, double mu, const CurveGrid& grid,
                                               int samples) {
  std::vector<CurveIntersection> out;
  if (samples < 2 || grid.n1 < 1 || grid.n2 < 1) return out;
  const OpticalCoefficients c1 = compute_optical_coefficients(pair.att1, pair.obs1);
  const OpticalCoefficients c2 = compute_optical_coefficients(pair.att2, pair.obs2);
  const BivariatePoly q = build_q_poly(c1, c2);
  const BivariatePoly p = build_p_poly(pair, mu);
  auto eval = [&](CurveKind k, double r1, double r2) {
    return k == CurveKind::P ? p(r1, r2) : curve_value(k, r1, r2, pair, mu);
  };
  auto inside = [&](double r2) { return std::isfinite(r2) && r2 >= grid.rho2_min && r2 <= grid.rho2_max && r2 > 0.0; };

  const auto xs = axis(grid.rho1_min, grid.rho1_max, samples);
  for (CurveKind kind : {CurveKind::P, CurveKind::Lenz, CurveKind::Energy}) {
    for (int branch = 0; branch < 2; ++branch) {
      double px = 0.0, py = 0.0, pf = 0.0;
      bool have = false;
      for (double r1 : xs) {
        const double r2 = q_branches(q, r1)[static_cast<std::size_t>(branch)];
        if (!inside(r2)) {
          have = false;
          continue;
        }
        const double f = eval(kind, r1, r2);
        if (have && ((pf < 0.0 && f >= 0.0) || (pf > 0.0 && f <= 0.0))) {
          const double s = pf / (pf - f);
          out.push_back({kind, px + s * (r1 - px), py + s * (r2 - py)});
        }
        px = r1;
        py = r2;
        pf = f;
        have = true;
      }
    }
  }
  return out;
}

void write_curve_csv(const CurveTable& table, const std::string& path) {
  std::ofstream f(path);
  if (!f) fail(ErrorKind::Input, "cannot write " + path);
  f << "rho1,rho2,value\n" << std::setprecision(17);
  std::size_t k = 0;
  for (double r1 : table.rho1)
    for (double r2 : table.rho2) f << r1 << ',' << r2 << ',' << table.value[k++] << '\n';
}

}  // namespace keplink
