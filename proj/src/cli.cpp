#include "keplink/cli.hpp"

#include <cmath>
#include <filesystem>
#include <ostream>
#include <random>
#include <sstream>

#include "keplink/errors.hpp"
#include "keplink/radar_linkage.hpp"

namespace keplink {

namespace {

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::Input:
    case ErrorKind::Domain: return kExitInput;
    case ErrorKind::Degenerate: return kExitDegenerate;
    case ErrorKind::Numerical: return kExitNumerical;
  }
  return kExitNumerical;
}

Json error_doc(const Error& e) {
  return {{"status", "error"}, {"code", exit_code(e.kind())}, {"kind", to_string(e.kind())}, {"message", e.what()}};
}

// Runs `body`, mapping library errors to exit codes; `out` (if non-empty)
// receives a diagnostic JSON on failure.
template <class F>
int guarded(const std::string& out, std::ostream& err, F&& body) {
  try {
    body();
    return kExitOk;
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    if (!out.empty()) {
      try {
        write_text_atomic(out, dump_json(error_doc(e)) + "\n");
      } catch (const Error&) {
      }
    }
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
}

Json units_json(const UnitSystem& u) {
  return {{"name", units_label(u)}, {"mu", u.mu}, {"c_light", u.c_light}, {"time_units_per_day", u.time_units_per_day}};
}

UnitSystem units_from_json(const Json& j) {
  UnitSystem u = units_from_name(j.at("name").get<std::string>());
  u.mu = j.at("mu").get<double>();
  u.c_light = j.at("c_light").get<double>();
  u.time_units_per_day = j.at("time_units_per_day").get<double>();
  return u;
}

void check_units(const AttributableRecord& r, const RunConfig& cfg) {
  if (!r.units.empty() && r.units != units_label(cfg.units))
    fail(ErrorKind::Input, "attributable units '" + r.units + "' do not match run units '" + units_label(cfg.units) + "'");
}

void finish_solutions(std::vector<LinkageSolution>& sols, const AttributablePair& ap, const OpticalAttributable& att2,
                      const ObserverState& obs2, const RunConfig& cfg) {
  for (auto& s : sols) {
    try {
      attach_covariance(ap, s, cfg.units.mu);
    } catch (const Error& e) {
      s.warnings.emplace_back(std::string("covariance unavailable: ") + e.what());
    }
  }
  (void)select_solutions(sols, att2, obs2, cfg.chi4_threshold, cfg.units);
}

Json solutions_doc(const char* kind, const std::vector<LinkageSolution>& sols, const AttributableRecord& rec2,
                   const ObserverState& obs2, const RunConfig& cfg) {
  Json arr = Json::array();
  for (const auto& s : sols) arr.push_back(to_json(s));
  return {{"status", "ok"},
          {"kind", kind},
          {"units", units_json(cfg.units)},
          {"chi4_threshold", cfg.chi4_threshold},
          {"attributable2", to_json(rec2)},
          {"observer2", to_json(obs2)},
          {"degeneracy_flags", Json::array()},
          {"solutions", arr}};
}

AttributableRecord first_record(const std::string& path) { return read_attributables(path).front(); }

}  // namespace

void RunConfig::validate() const {
  if (!(units.mu > 0.0)) fail(ErrorKind::Input, "mu must be positive");
  const int n = linkage.fft_points;
  if (n < 32 || (n & (n - 1)) != 0) fail(ErrorKind::Input, "fft-points must be a power of two >= 32");
  if (!(linkage.spurious_tol > 0.0)) fail(ErrorKind::Input, "spurious-tol must be positive");
  if (!(chi4_threshold >= 0.0)) fail(ErrorKind::Input, "chi4-threshold must be non-negative");
}

UnitSystem units_from_name(const std::string& name) {
  if (name == "au-day") return UnitSystem::heliocentric();
  if (name == "km-s") return UnitSystem::geocentric();
  fail(ErrorKind::Input, "unknown unit system '" + name + "' (expected au-day or km-s)");
}

std::string units_label(const UnitSystem& units) {
  return units.time_units_per_day == 1.0 ? "au-day" : "km-s";
}

CurveGrid parse_grid(const std::string& spec) {
  std::vector<double> v;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      v.push_back(std::stod(tok));
    } catch (const std::exception&) {
      fail(ErrorKind::Input, "bad grid spec '" + spec + "'");
    }
  }
  CurveGrid g;
  if (v.size() == 1) {
    g.n1 = g.n2 = static_cast<int>(v[0]);
  } else if (v.size() == 6) {
    g = {v[0], v[1], v[2], v[3], static_cast<int>(v[4]), static_cast<int>(v[5])};
  } else {
    fail(ErrorKind::Input, "grid spec must be N or r1min,r1max,r2min,r2max,n1,n2");
  }
  if (g.n1 < 0 || g.n2 < 0 || !(g.rho1_max >= g.rho1_min) || !(g.rho2_max >= g.rho2_min))
    fail(ErrorKind::Input, "invalid grid '" + spec + "'");
  return g;
}

EphemerisModel ephemeris_for(const RunConfig& cfg) {
  if (cfg.ephemeris_path) return read_ephemeris_csv(*cfg.ephemeris_path, cfg.units.time_units_per_day);
  if (units_label(cfg.units) == "km-s") return geocentric_station();
  AnalyticEphemeris m = circular_earth();
  m.mu = cfg.units.mu;
  return m;
}

ObserverState resolve_observer(const RunConfig& cfg, const AttributableRecord& rec) {
  if (!cfg.ephemeris_path && rec.observer) return *rec.observer;
  return observer_state(ephemeris_for(cfg), rec.tbar);
}

Json run_link_optical(const AttributableRecord& r1, const AttributableRecord& r2, const RunConfig& cfg) {
  cfg.validate();
  check_units(r1, cfg);
  check_units(r2, cfg);
  const OpticalPair pair{r1.optical(), r2.optical(), resolve_observer(cfg, r1), resolve_observer(cfg, r2)};
  const OpticalLinkageReport rep = link_optical_report(pair, cfg.units, cfg.linkage);
  std::vector<LinkageSolution> sols = rep.solutions;
  finish_solutions(sols, AttributablePair::from(pair), pair.att2, pair.obs2, cfg);
  Json doc = solutions_doc("optical", sols, r2, pair.obs2, cfg);
  Json cands = Json::array();
  for (const auto& c : rep.candidates)
    cands.push_back({{"rho1", c.rho1}, {"rho2", c.rho2}, {"lenz_residual", c.lenz_residual}, {"spurious", c.spurious}});
  doc["candidates"] = cands;
  doc["resultant"] = {{"degree", rep.resultant.resultant.degree()},
                      {"degree_bound", rep.resultant.degree_bound},
                      {"fft_points", rep.resultant.fft_points},
                      {"imag_ratio", rep.resultant.imag_ratio},
                      {"tail_ratio", rep.resultant.tail_ratio}};
  doc["warnings"] = rep.warnings;
  return doc;
}

Json run_link_radar_optical(const AttributableRecord& rad, const AttributableRecord& opt, const RunConfig& cfg) {
  cfg.validate();
  check_units(rad, cfg);
  check_units(opt, cfg);
  const RadarOpticalPair pair{rad.radar(), opt.optical(), resolve_observer(cfg, rad), resolve_observer(cfg, opt)};
  const RadarLinkageReport rep = link_radar_optical_report(pair, cfg.units, cfg.linkage);
  std::vector<LinkageSolution> sols = rep.solutions;
  finish_solutions(sols, AttributablePair::from(pair), pair.att2, pair.obs2, cfg);
  Json doc = solutions_doc("radar_optical", sols, opt, pair.obs2, cfg);
  doc["quartic"] = rep.quartic.coefficients();
  return doc;
}

std::vector<std::optional<double>> recompute_chi4(const Json& doc) {
  const UnitSystem units = units_from_json(doc.at("units"));
  const OpticalAttributable att2 = attributable_from_json(doc.at("attributable2")).optical();
  const ObserverState obs2 = observer_from_json(doc.at("observer2"));
  std::vector<std::optional<double>> out;
  for (const auto& s : doc.at("solutions")) {
    if (s.at("elements1").is_null() || s.at("element_covariance1").is_null()) {
      out.emplace_back();
      continue;
    }
    const KeplerianElements el = elements_from_json(s.at("elements1"));
    const Mat6 g = matrix_from_json(s.at("element_covariance1"), 6, 6);
    const PredictedAttributable pred = predict_attributable(el, g, obs2, att2.tbar, units);
    out.push_back(identification_penalty(att2.values(), att2.cov, pred));
  }
  return out;
}

int cmd_link_optical(const std::string& att1, const std::string& att2, const std::string& out, const RunConfig& cfg,
                     std::ostream& err) {
  return guarded(out, err, [&] {
    const Json doc = run_link_optical(first_record(att1), first_record(att2), cfg);
    write_text_atomic(out, doc.dump(2) + "\n");
  });
}

int cmd_link_radar_optical(const std::string& rad, const std::string& opt, const std::string& out,
                           const RunConfig& cfg, std::ostream& err) {
  return guarded(out, err, [&] {
    const Json doc = run_link_radar_optical(first_record(rad), first_record(opt), cfg);
    write_text_atomic(out, doc.dump(2) + "\n");
  });
}

int cmd_synth(const std::string& elements_json, const SynthOptions& opts, const std::string& prefix,
              const RunConfig& cfg, std::ostream& err) {
  return guarded("", err, [&] {
    cfg.validate();
    const KeplerianElements el = elements_from_json(read_json(elements_json));
    const EphemerisModel model = ephemeris_for(cfg);
    NoiseSpec noise = opts.noise;
    noise.seed = cfg.seed;
    const SyntheticPair sp = synthesize_attributables(el, opts.tbar1, opts.tbar2, model, noise, opts.kind, cfg.units);
    const std::string label = units_label(cfg.units);
    AttributableRecord r1 = opts.kind == LinkageKind::Optical ? AttributableRecord::from(sp.opt1, label)
                                                              : AttributableRecord::from(sp.rad1, label);
    AttributableRecord r2 = AttributableRecord::from(sp.opt2, label);
    r1.observer = sp.obs1;
    r2.observer = sp.obs2;
    write_attributables(prefix + "_att1.jsonl", {r1});
    write_attributables(prefix + "_att2.jsonl", {r2});
    Json truth = to_json(sp.truth);
    truth["kind"] = opts.kind == LinkageKind::Optical ? "optical" : "radar_optical";
    truth["seed"] = cfg.seed;
    truth["perturbed"] = noise.perturb;
    write_text_atomic(prefix + "_truth.json", truth.dump(2) + "\n");
  });
}

int cmd_curves(const std::string& att1, const std::string& att2, const std::string& out_dir, const RunConfig& cfg,
               std::ostream& err) {
  return guarded("", err, [&] {
    cfg.validate();
    const AttributableRecord r1 = first_record(att1);
    const AttributableRecord r2 = first_record(att2);
    check_units(r1, cfg);
    check_units(r2, cfg);
    const OpticalPair pair{r1.optical(), r2.optical(), resolve_observer(cfg, r1), resolve_observer(cfg, r2)};
    std::filesystem::create_directories(out_dir);
    for (const auto& t : emit_curve_samples(pair, cfg.units.mu, cfg.grid))
      write_curve_csv(t, (std::filesystem::path(out_dir) / (std::string(to_string(t.kind)) + ".csv")).string());

    Json inter = Json::object();
    for (const char* k : {"p", "lenz", "energy"}) inter[k] = Json::array();
    for (const auto& x : q_intersections(pair, cfg.units.mu, cfg.grid))
      inter[to_string(x.kind)].push_back({x.rho1, x.rho2});
    Json sols = Json::array();
    for (const auto& s : link_optical(pair, cfg.units, cfg.linkage)) sols.push_back({s.rho1, s.rho2});
    const Json doc = {{"grid",
                       {{"rho1", {cfg.grid.rho1_min, cfg.grid.rho1_max, cfg.grid.n1}},
                        {"rho2", {cfg.grid.rho2_min, cfg.grid.rho2_max, cfg.grid.n2}}}},
                      {"q_intersections", inter},
                      {"solver_solutions", sols}};
    write_text_atomic((std::filesystem::path(out_dir) / "intersections.json").string(), doc.dump(2) + "\n");
  });
}

int cmd_batch(int count, const std::string& out, const RunConfig& cfg, std::ostream& err) {
  return guarded(out, err, [&] {
    cfg.validate();
    if (count < 1) fail(ErrorKind::Input, "batch count must be positive");
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const UnitSystem& units = cfg.units;
    AnalyticEphemeris earth = circular_earth();
    earth.mu = units.mu;
    int found = 0, degenerate = 0, missed = 0, failed = 0;
    for (int k = 0; k < count; ++k) {
      const KeplerianElements el{0.7 + 2.3 * U(rng), 0.6 * U(rng),      0.5 * U(rng), kTwoPi * U(rng),
                                 kTwoPi * U(rng),    kTwoPi * U(rng), 55000.0};
      const double gap = 30.0 + 270.0 * U(rng);
      try {
        const SyntheticPair sp =
            synthesize_attributables(el, 55000.0, 55000.0 + gap, earth, NoiseSpec{}, LinkageKind::Optical, units);
        bool hit = false;
        for (const auto& s : link_optical(sp.optical(), units, cfg.linkage))
          hit = hit || (std::abs(s.rho1 / sp.truth.rho[0] - 1.0) < 1e-6 && std::abs(s.rho2 / sp.truth.rho[1] - 1.0) < 1e-6);
        hit ? ++found : ++missed;
      } catch (const Error& e) {
        e.kind() == ErrorKind::Degenerate ? ++degenerate : ++failed;
      }
    }
    const int usable = count - degenerate;
    const Json report = {{"count", count},       {"found", found},   {"missed", missed},
                         {"degenerate", degenerate}, {"failed", failed},
                         {"success_rate", usable > 0 ? static_cast<double>(found) / usable : 0.0},
                         {"seed", cfg.seed}};
    write_text_atomic(out, report.dump(2) + "\n");
  });
}

}  // namespace keplink
