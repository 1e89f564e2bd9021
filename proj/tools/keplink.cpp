#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "keplink/cli.hpp"
#include "keplink/errors.hpp"

using namespace keplink;

namespace {

struct GlobalFlags {
  std::string units = "au-day";
  double mu = 0.0;
  double c_light = -1.0;
  std::string ephemeris;
  double spurious_tol = 1e-6;
  double real_tol = 1e-6;
  double chi4_threshold = kDefaultChi4Threshold;
  int fft_points = 32;
  std::uint64_t seed = 0;
  std::string grid = "100";
};

void add_common(CLI::App* cmd, GlobalFlags& g) {
  cmd->add_option("--units", g.units, "unit system: au-day (heliocentric) or km-s (geocentric)")
      ->capture_default_str();
  cmd->add_option("--mu", g.mu, "gravitational parameter (overrides the unit system)");
  cmd->add_option("--c-light", g.c_light, "speed of light in run units; 0 disables light-time");
  cmd->add_option("--ephemeris", g.ephemeris, "observer ephemeris CSV (mjd,qx,qy,qz,vx,vy,vz)");
  cmd->add_option("--spurious-tol", g.spurious_tol, "normalized Laplace-Lenz residual bound")->capture_default_str();
  cmd->add_option("--real-tol", g.real_tol, "imaginary-part tolerance for real roots")->capture_default_str();
  cmd->add_option("--chi4-threshold", g.chi4_threshold, "acceptance threshold on chi4")->capture_default_str();
  cmd->add_option("--fft-points", g.fft_points, "FFT nodes for the resultant (power of two >= 32)")
      ->capture_default_str();
  cmd->add_option("--seed", g.seed, "random seed")->capture_default_str();
  cmd->add_option("--grid", g.grid, "curve grid: N or r1min,r1max,r2min,r2max,n1,n2")->capture_default_str();
}

RunConfig make_config(const GlobalFlags& g) {
  RunConfig cfg;
  cfg.units = units_from_name(g.units);
  if (g.mu != 0.0) cfg.units.mu = g.mu;
  if (g.c_light >= 0.0) cfg.units.c_light = g.c_light;
  if (!g.ephemeris.empty()) cfg.ephemeris_path = g.ephemeris;
  cfg.linkage.spurious_tol = g.spurious_tol;
  cfg.linkage.real_tol = g.real_tol;
  cfg.linkage.fft_points = g.fft_points;
  cfg.chi4_threshold = g.chi4_threshold;
  cfg.seed = g.seed;
  cfg.grid = parse_grid(g.grid);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Preliminary orbits from pairs of attributables"};
  app.require_subcommand(1);
  GlobalFlags g;

  std::string in1, in2, out = "solutions.json";
  auto* link = app.add_subcommand("link-optical", "link two optical attributables");
  link->add_option("att1", in1, "first attributable (.jsonl)")->required();
  link->add_option("att2", in2, "second attributable (.jsonl)")->required();
  link->add_option("-o,--out", out, "solutions JSON")->capture_default_str();
  add_common(link, g);

  auto* radar = app.add_subcommand("link-radar-optical", "link a radar and an optical attributable");
  radar->add_option("radar", in1, "radar attributable (.jsonl)")->required();
  radar->add_option("optical", in2, "optical attributable (.jsonl)")->required();
  radar->add_option("-o,--out", out, "solutions JSON")->capture_default_str();
  add_common(radar, g);

  SynthOptions so;
  std::string elements, prefix = "synth", kind = "optical";
  double sigma_arcsec = 0.5, arc_hours = 24.0;
  auto* synth = app.add_subcommand("synth", "synthesize an attributable pair from known elements");
  synth->add_option("elements", elements, "elements JSON (a, e, i_deg, Omega_deg, omega_deg, M_deg, epoch_mjd)")
      ->required();
  synth->add_option("--t1", so.tbar1, "first mean epoch (MJD)")->required();
  synth->add_option("--t2", so.tbar2, "second mean epoch (MJD)")->required();
  synth->add_option("--kind", kind, "optical or radar")->check(CLI::IsMember({"optical", "radar"}));
  synth->add_option("--sigma-arcsec", sigma_arcsec, "angular noise per observation")->capture_default_str();
  synth->add_option("--sigma-rho", so.noise.sigma_rho, "range noise per observation")->capture_default_str();
  synth->add_option("--n-obs", so.noise.n_obs, "observations per arc")->capture_default_str();
  synth->add_option("--arc-hours", arc_hours, "arc length")->capture_default_str();
  synth->add_flag("--perturb", so.noise.perturb, "add Gaussian noise to the attributable values");
  synth->add_option("-o,--out-prefix", prefix, "output prefix")->capture_default_str();
  add_common(synth, g);

  std::string out_dir = "curves";
  auto* curves = app.add_subcommand("curves", "sample the q, p, Lenz and energy curves on a grid");
  curves->add_option("att1", in1, "first attributable (.jsonl)")->required();
  curves->add_option("att2", in2, "second attributable (.jsonl)")->required();
  curves->add_option("-o,--out-dir", out_dir, "output directory")->capture_default_str();
  add_common(curves, g);

  int count = 100;
  std::string report = "batch.json";
  auto* batch = app.add_subcommand("batch", "noiseless synthesis/linkage success rate on random orbits");
  batch->add_option("-n,--count", count, "number of orbits")->capture_default_str();
  batch->add_option("-o,--out", report, "report JSON")->capture_default_str();
  add_common(batch, g);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitInput;
  }

  RunConfig cfg;
  try {
    cfg = make_config(g);
  } catch (const Error& e) {
    std::cerr << "error (input): " << e.what() << '\n';
    return kExitInput;
  }

  if (*link) return cmd_link_optical(in1, in2, out, cfg, std::cerr);
  if (*radar) return cmd_link_radar_optical(in1, in2, out, cfg, std::cerr);
  if (*synth) {
    so.kind = kind == "radar" ? LinkageKind::RadarOptical : LinkageKind::Optical;
    so.noise.sigma_angle = sigma_arcsec * kArcsec;
    so.noise.arc_length_days = arc_hours / 24.0;
    return cmd_synth(elements, so, prefix, cfg, std::cerr);
  }
  if (*curves) return cmd_curves(in1, in2, out_dir, cfg, std::cerr);
  return cmd_batch(count, report, cfg, std::cerr);
}
