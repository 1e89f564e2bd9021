#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "keplink/curves.hpp"
#include "keplink/io.hpp"
#include "keplink/selection.hpp"
#include "keplink/synthesis.hpp"

namespace keplink {

enum ExitCode : int { kExitOk = 0, kExitInput = 2, kExitDegenerate = 3, kExitNumerical = 4 };

struct RunConfig {
  UnitSystem units = UnitSystem::heliocentric();
  LinkageOptions linkage;
  double chi4_threshold = kDefaultChi4Threshold;
  std::optional<std::string> ephemeris_path;
  std::uint64_t seed = 0;
  CurveGrid grid;

  // Throws Input when mu <= 0 or fft_points is not a power of two >= 32.
  void validate() const;
};

// "au-day" or "km-s"; throws Input otherwise.
[[nodiscard]] UnitSystem units_from_name(const std::string& name);
[[nodiscard]] std::string units_label(const UnitSystem& units);

// "N" (N x N on [0.01, 2]^2) or "r1min,r1max,r2min,r2max,n1,n2".
[[nodiscard]] CurveGrid parse_grid(const std::string& spec);

// Observer model: --ephemeris table, else the analytic default of the unit system.
[[nodiscard]] EphemerisModel ephemeris_for(const RunConfig& cfg);

// Observer at the record's epoch: --ephemeris wins, then the record's embedded
// observer, then the analytic default.
[[nodiscard]] ObserverState resolve_observer(const RunConfig& cfg, const AttributableRecord& rec);

// Links, attaches covariances, selects by chi4. Returns the solutions document.
[[nodiscard]] Json run_link_optical(const AttributableRecord& r1, const AttributableRecord& r2, const RunConfig& cfg);
[[nodiscard]] Json run_link_radar_optical(const AttributableRecord& rad, const AttributableRecord& opt,
                                          const RunConfig& cfg);

// chi4 of every solution in a solutions document, recomputed from the stored
// elements, element covariance and second attributable.
[[nodiscard]] std::vector<std::optional<double>> recompute_chi4(const Json& doc);

struct SynthOptions {
  double tbar1 = 0.0;
  double tbar2 = 0.0;
  NoiseSpec noise;
  LinkageKind kind = LinkageKind::Optical;
};

// Command entry points: write their outputs and return an ExitCode. Errors are
// reported on `err` and, for the link commands, as a diagnostic JSON in `out`.
int cmd_link_optical(const std::string& att1, const std::string& att2, const std::string& out, const RunConfig& cfg,
                     std::ostream& err);
int cmd_link_radar_optical(const std::string& rad, const std::string& opt, const std::string& out,
                           const RunConfig& cfg, std::ostream& err);
// Writes <prefix>_att1.jsonl, <prefix>_att2.jsonl and <prefix>_truth.json.
int cmd_synth(const std::string& elements_json, const SynthOptions& opts, const std::string& prefix,
              const RunConfig& cfg, std::ostream& err);
// Writes q.csv, p.csv, lenz.csv, energy.csv and intersections.json into `out_dir`.
int cmd_curves(const std::string& att1, const std::string& att2, const std::string& out_dir, const RunConfig& cfg,
               std::ostream& err);
// Random noiseless optical pairs (circular 1 AU observer); writes a success-rate report.
int cmd_batch(int count, const std::string& out, const RunConfig& cfg, std::ostream& err);

}  // namespace keplink
