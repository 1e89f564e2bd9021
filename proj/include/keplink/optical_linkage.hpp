#pragma once

#include <utility>
#include <vector>

#include "keplink/polynomial.hpp"
#include "keplink/solution.hpp"
#include "keplink/units.hpp"

namespace keplink {

// c(rho, rhodot) = D rhodot + E rho^2 + F rho + G at one epoch.
struct OpticalCoefficients {
  Vec3 D = Vec3::Zero();
  Vec3 E = Vec3::Zero();
  Vec3 F = Vec3::Zero();
  Vec3 G = Vec3::Zero();
};

[[nodiscard]] OpticalCoefficients compute_optical_coefficients(const OpticalAttributable& att, const ObserverState& obs);

// q(rho1, rho2) = D1 x D2 . J(rho1, rho2). Throws Degenerate when D1 x D2 vanishes.
[[nodiscard]] BivariatePoly build_q_poly(const OpticalCoefficients& c1, const OpticalCoefficients& c2);

// (rhodot1, rhodot2) from the angular-momentum equality.
[[nodiscard]] std::pair<double, double> radial_velocities(double rho1, double rho2, const OpticalCoefficients& c1,
                                                          const OpticalCoefficients& c2);

// Radial velocities as polynomials in (rho1, rho2).
[[nodiscard]] std::pair<BivariatePoly, BivariatePoly> radial_velocity_polys(const OpticalCoefficients& c1,
                                                                            const OpticalCoefficients& c2);

// Squared Laplace-Lenz projection p(rho1, rho2), total degree 10, degree 8 in rho2.
[[nodiscard]] BivariatePoly build_p_poly(const OpticalPair& pair, double mu);

// Cartesian states at both epochs for trial distances, rhodot from radial_velocities.
[[nodiscard]] std::pair<CartesianState, CartesianState> optical_states(double rho1, double rho2,
                                                                       const OpticalPair& pair);

// (L1 - L2) . v / |v| with v = e_rho2 x q2: zero on genuine solutions, O(1) on
// roots introduced by squaring. Throws Degenerate at zenith.
[[nodiscard]] double lenz_residual(double rho1, double rho2, const OpticalPair& pair, double mu);

[[nodiscard]] std::vector<Degeneracy> detect_degenerate_optical(const OpticalCoefficients& c1,
                                                               const OpticalCoefficients& c2,
                                                               const OpticalAttributable& att2,
                                                               const ObserverState& obs2);

struct LinkageOptions {
  double spurious_tol = 1e-6;
  double real_tol = 1e-6;
  int fft_points = 32;
  int polish_steps = 3;
};

// A positive (rho1, rho2) pair on q = 0 with rho1 a root of the resultant.
struct LinkageCandidate {
  double rho1 = 0.0;
  double rho2 = 0.0;
  double lenz_residual = 0.0;
  bool spurious = false;
};

struct OpticalLinkageReport {
  std::vector<LinkageSolution> solutions;
  std::vector<LinkageCandidate> candidates;
  ResultantResult resultant;  // in the internal scaled units (see link_optical)
  std::vector<Complex> resultant_roots;
  double length_scale = 1.0;
  double time_scale = 1.0;
  std::vector<std::string> warnings;
};

// Full pipeline: p, q, resultant in rho2, roots, rho2 from q, spurious discard,
// radial velocities, aberration-corrected states and elements. The polynomial
// stage runs in units with mu = 1 and the mean observer distance as length
// unit. Throws Degenerate when any degeneracy flag is raised.
[[nodiscard]] OpticalLinkageReport link_optical_report(const OpticalPair& pair, const UnitSystem& units,
                                                       const LinkageOptions& opts = {});
[[nodiscard]] std::vector<LinkageSolution> link_optical(const OpticalPair& pair, const UnitSystem& units,
                                                        const LinkageOptions& opts = {});

// Length and time units that make mu = 1 with lengths of order |q|.
struct Scaling {
  double length = 1.0;
  double time = 1.0;
};
[[nodiscard]] Scaling canonical_scaling(const ObserverState& obs1, const ObserverState& obs2, double mu);
[[nodiscard]] OpticalPair scale_pair(const OpticalPair& pair, const Scaling& s);

}  // namespace keplink
