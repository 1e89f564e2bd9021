#pragma once

#include <vector>

#include "keplink/optical_linkage.hpp"

namespace keplink {

// c_rad(xi, zeta) = A xi + B zeta + C with xi = rho alphadot cos(delta), zeta = rho deltadot.
struct RadarCoefficients {
  Vec3 A = Vec3::Zero();
  Vec3 B = Vec3::Zero();
  Vec3 C = Vec3::Zero();
};

// c2 x^2 + c1 x + c0
struct Quadratic {
  double c2 = 0.0;
  double c1 = 0.0;
  double c0 = 0.0;
  [[nodiscard]] double operator()(double x) const { return (c2 * x + c1) * x + c0; }
  [[nodiscard]] UnivariatePoly poly() const { return UnivariatePoly(std::vector<double>{c0, c1, c2}); }
};

// xi1, zeta1 and rhodot2 as quadratics in rho2.
struct EliminationQuadratics {
  Quadratic X;
  Quadratic Z;
  Quadratic R;
};

[[nodiscard]] RadarCoefficients radar_coefficients(const RadarAttributable& att, const ObserverState& obs);

// Solves A1 xi1 + B1 zeta1 - D2 rhodot2 = E2 rho2^2 + F2 rho2 + G2 - C1 by
// Cramer's rule. Throws Degenerate when A1 . B1 x D2 vanishes.
[[nodiscard]] EliminationQuadratics eliminate_linear(const RadarCoefficients& rc1, const OpticalCoefficients& oc2);

// mu (L_rad - L_opt) . v as a polynomial of degree <= 4 in rho2.
[[nodiscard]] UnivariatePoly build_quartic(const RadarOpticalPair& pair, double mu);

// Closed-form roots of a polynomial of degree 1..4 (Ferrari for quartics),
// each refined by Newton steps on the input. Leading coefficients below
// 1e-12 * max|coeff| are deflated first. Multiple roots are repeated.
[[nodiscard]] std::vector<Complex> solve_quartic(const UnivariatePoly& poly);

[[nodiscard]] std::vector<Degeneracy> detect_degenerate_radar(const RadarCoefficients& rc1,
                                                             const OpticalCoefficients& oc2,
                                                             const OpticalAttributable& att2,
                                                             const ObserverState& obs2);

[[nodiscard]] RadarOpticalPair scale_pair(const RadarOpticalPair& pair, const Scaling& s);

struct RadarLinkageReport {
  std::vector<LinkageSolution> solutions;
  UnivariatePoly quartic;  // scaled units
  std::vector<Complex> roots;
  Scaling scaling;
};

[[nodiscard]] RadarLinkageReport link_radar_optical_report(const RadarOpticalPair& pair, const UnitSystem& units,
                                                           const LinkageOptions& opts = {});
[[nodiscard]] std::vector<LinkageSolution> link_radar_optical(const RadarOpticalPair& pair, const UnitSystem& units,
                                                              const LinkageOptions& opts = {});

}  // namespace keplink
