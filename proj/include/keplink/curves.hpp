#pragma once

#include <string>
#include <vector>

#include "keplink/optical_linkage.hpp"

namespace keplink {

// Rectangle in (rho1, rho2) sampled with n1 x n2 nodes (n = 1 gives the lower bound only).
struct CurveGrid {
  double rho1_min = 0.01;
  double rho1_max = 2.0;
  double rho2_min = 0.01;
  double rho2_max = 2.0;
  int n1 = 100;
  int n2 = 100;
};

enum class CurveKind { Q, P, Lenz, Energy };
[[nodiscard]] const char* to_string(CurveKind k);

// Values of one curve function on the grid, row-major in rho1.
struct CurveTable {
  CurveKind kind = CurveKind::Q;
  std::vector<double> rho1;
  std::vector<double> rho2;
  std::vector<double> value;  // size rho1.size() * rho2.size()
};

// A sign change of a curve function along a branch of q = 0.
struct CurveIntersection {
  CurveKind kind = CurveKind::P;
  double rho1 = 0.0;
  double rho2 = 0.0;
};

// Curve functions in the original units of the pair:
//   q       angular-momentum compatibility (quadratic form)
//   p       squared Laplace-Lenz projection
//   Lenz    unsquared projection mu (L1 - L2) . v
//   Energy  energy equality, rationalized by squaring twice
// with rhodot1, rhodot2 from the radial-velocity equations.
[[nodiscard]] double curve_value(CurveKind kind, double rho1, double rho2, const OpticalPair& pair, double mu);

[[nodiscard]] std::vector<CurveTable> emit_curve_samples(const OpticalPair& pair, double mu, const CurveGrid& grid);

// Intersections of the P, Lenz and Energy curves with the positive branches of
// q = 0, found by tracing q = 0 over `samples` values of rho1 in the grid range.
[[nodiscard]] std::vector<CurveIntersection> q_intersections(const OpticalPair& pair, double mu,
                                                             const CurveGrid& grid, int samples = 4000);

// CSV with header "rho1,rho2,value".
void write_curve_csv(const CurveTable& table, const std::string& path);

}  // namespace keplink
