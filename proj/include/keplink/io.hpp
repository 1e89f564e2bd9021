#pragma once

#include <optional>
#include <string>
#include <vector>

#include "keplink/ephemeris.hpp"
#include "keplink/solution.hpp"
#include "keplink/synthesis.hpp"
#include <nlohmann/json.hpp>

namespace keplink {

using Json = nlohmann::json;

// One line of an attributable .jsonl file:
// {kind, tbar_mjd, values[4], cov[16 row-major], station, frame, units, observer?}
// Angles in rad, rates and speeds per internal time unit. `observer`
// ({q[3], qdot[3]}) is optional and used when no ephemeris is configured.
struct AttributableRecord {
  std::string kind = "optical";  // "optical" | "radar"
  double tbar = 0.0;
  Vec4 values = Vec4::Zero();
  Mat4 cov = Mat4::Zero();
  std::string station;
  std::string frame = "ecliptic-J2000";
  std::string units;
  std::optional<ObserverState> observer;

  [[nodiscard]] OpticalAttributable optical() const;  // throws Input for a radar record
  [[nodiscard]] RadarAttributable radar() const;      // throws Input for an optical record
  [[nodiscard]] static AttributableRecord from(const OpticalAttributable& a, const std::string& units);
  [[nodiscard]] static AttributableRecord from(const RadarAttributable& a, const std::string& units);
};

[[nodiscard]] Json to_json(const AttributableRecord& r);
[[nodiscard]] AttributableRecord attributable_from_json(const Json& j);

[[nodiscard]] std::vector<AttributableRecord> read_attributables(const std::string& path);
void write_attributables(const std::string& path, const std::vector<AttributableRecord>& records);

// CSV "mjd,qx,qy,qz,vx,vy,vz".
[[nodiscard]] TabulatedEphemeris read_ephemeris_csv(const std::string& path, double time_units_per_day);
void write_ephemeris_csv(const std::string& path, const TabulatedEphemeris& tab);

// CSV "mjd,ra_deg,dec_deg[,rho]"; sigmas applied to every row.
[[nodiscard]] ObservationArc read_arc_csv(const std::string& path, double sigma_angle, double sigma_rho = 0.0);

// {"a", "e", "i_deg", "Omega_deg", "omega_deg", "M_deg", "epoch_mjd"}
[[nodiscard]] KeplerianElements elements_from_json(const Json& j);
[[nodiscard]] Json to_json(const KeplerianElements& el);

[[nodiscard]] Json to_json(const LinkageSolution& sol);
[[nodiscard]] Json to_json(const SyntheticTruth& truth);
[[nodiscard]] Json to_json(const ObserverState& obs);
[[nodiscard]] ObserverState observer_from_json(const Json& j);
[[nodiscard]] Json matrix_to_json(const Eigen::MatrixXd& m);  // row-major flat array
[[nodiscard]] Eigen::MatrixXd matrix_from_json(const Json& j, int rows, int cols);

[[nodiscard]] Json read_json(const std::string& path);
// Writes via a temporary file and rename.
void write_text_atomic(const std::string& path, const std::string& text);
[[nodiscard]] std::string dump_json(const Json& j);

}  // namespace keplink
