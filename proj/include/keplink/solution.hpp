#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "keplink/attributable.hpp"
#include "keplink/geometry.hpp"
#include "keplink/kepler.hpp"

namespace keplink {

enum class LinkageKind { Optical, RadarOptical };

// Two optical attributables with the observer state at each mean epoch.
struct OpticalPair {
  OpticalAttributable att1;
  OpticalAttributable att2;
  ObserverState obs1;
  ObserverState obs2;
};

// Radar attributable at the first epoch, optical at the second.
struct RadarOpticalPair {
  RadarAttributable att1;
  OpticalAttributable att2;
  ObserverState obs1;
  ObserverState obs2;
};

struct SolutionCovariance {
  Eigen::Matrix<double, 4, 8> dY_dA = Eigen::Matrix<double, 4, 8>::Zero();
  Mat6 gamma_car1 = Mat6::Zero();
  Mat6 gamma_car2 = Mat6::Zero();
  double condition_number = 0.0;
  bool ill_conditioned = false;
};

struct LinkageSolution {
  LinkageKind kind = LinkageKind::Optical;
  double rho1 = 0.0;
  double rhodot1 = 0.0;
  double rho2 = 0.0;
  double rhodot2 = 0.0;
  // Angular rates at epoch 1: copied from the optical attributable, solved for radar.
  double alphadot1 = 0.0;
  double deltadot1 = 0.0;

  CartesianState state1;  // at t1 = tbar1 - rho1 / c
  CartesianState state2;  // at t2 = tbar2 - rho2 / c
  std::optional<KeplerianElements> elements1;
  std::optional<KeplerianElements> elements2;

  double lenz_residual = 0.0;  // (L1 - L2) . v / |v|
  CompatibilityResiduals compat;

  std::optional<SolutionCovariance> covariance;
  std::optional<Mat6> element_covariance1;
  std::optional<double> chi4;
  bool accepted = false;
  std::vector<std::string> warnings;

  // Unknown vector Y: (rho1, rhodot1, rho2, rhodot2) or (alphadot1, deltadot1, rho2, rhodot2).
  [[nodiscard]] Eigen::Vector4d unknowns() const {
    if (kind == LinkageKind::Optical) return {rho1, rhodot1, rho2, rhodot2};
    return {alphadot1, deltadot1, rho2, rhodot2};
  }
  [[nodiscard]] bool elliptic() const { return elements1.has_value(); }
};

enum class Degeneracy {
  QuadraticFormDegenerate,  // E1 . D1 x D2 = E2 . D1 x D2 = 0
  CoincidentLinesOfSight,   // D1 x D2 = 0
  Zenith,                   // e_rho2 x q2 = 0
  RadarTripleProduct,       // A1 . B1 x D2 = 0
};

[[nodiscard]] const char* to_string(Degeneracy d);

}  // namespace keplink
