#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "keplink/attributable.hpp"
#include "keplink/geometry.hpp"
#include "keplink/io.hpp"
#include "keplink/optical_linkage.hpp"
#include "support.hpp"

using namespace keplink;
using testsupport::Gen;

namespace {

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "keplink_test_attributable";
  std::filesystem::create_directories(dir);
  return dir / name;
}

// Exact topocentric state of a Keplerian body seen from the circular observer (no light-time).
TopocentricState seen(const KeplerianElements& el, const AnalyticEphemeris& earth, double mjd, double mu) {
  const CartesianState b = propagate_kepler(el, mjd, mu);
  const ObserverState o = observer_state(earth, mjd);
  return topocentric_from_relative(b.r - o.q, b.rdot - o.qdot);
}

// m observations over `arc_days` centered on tc, with optional Gaussian noise.
ObservationArc kepler_arc(const KeplerianElements& el, double tc, double arc_days, int m, double sigma, bool radar,
                          double sigma_rho, std::mt19937_64* rng) {
  const auto earth = circular_earth();
  const double mu = kGaussK * kGaussK;
  std::normal_distribution<double> n01;
  ObservationArc arc;
  for (int k = 0; k < m; ++k) {
    const double t = tc + (static_cast<double>(k) / (m - 1) - 0.5) * arc_days;
    const TopocentricState s = seen(el, earth, t, mu);
    Observation o;
    o.t = t;
    o.alpha = s.alpha + (rng ? sigma / std::cos(s.delta) * n01(*rng) : 0.0);
    o.delta = s.delta + (rng ? sigma * n01(*rng) : 0.0);
    o.sigma_angle = sigma;
    if (radar) {
      o.rho = s.rho + (rng ? sigma_rho * n01(*rng) : 0.0);
      o.sigma_rho = sigma_rho;
    }
    arc.observations.push_back(o);
  }
  return arc;
}

ObservationArc polynomial_arc(const std::vector<double>& t, double a0, double a1, double a2, double d0, double d1,
                              double d2, double sigma) {
  ObservationArc arc;
  for (double tk : t) {
    Observation o;
    o.t = tk;
    const double u = tk - 55000.0;
    o.alpha = a0 + a1 * u + a2 * u * u;
    o.delta = d0 + d1 * u + d2 * u * u;
    o.sigma_angle = sigma;
    arc.observations.push_back(o);
  }
  return arc;
}

}  // namespace

TEST_CASE("optical attributable from exact data") {
  SUBCASE("two points on a line") {
    const double sigma = 1e-5, delta = 0.4;
    const auto arc = polynomial_arc({55000.0, 55000.5}, 1.0, 0.02, 0.0, delta, -0.01, 0.0, sigma);
    const auto att = fit_optical_attributable(arc);
    CHECK(att.tbar == doctest::Approx(55000.25));
    CHECK(att.alphadot == doctest::Approx(0.02).epsilon(1e-12));
    CHECK(att.deltadot == doctest::Approx(-0.01).epsilon(1e-12));
    CHECK(att.alpha == doctest::Approx(1.0 + 0.02 * 0.25).epsilon(1e-12));
    // degree 1 at points +-h: var(value) = s^2 / 2, var(rate) = s^2 / (2 h^2)
    const double h = 0.25;
    const double sa = sigma / std::cos(arc.observations[0].delta);
    const double sa2 = sigma / std::cos(arc.observations[1].delta);
    const double wa = 1 / (sa * sa) + 1 / (sa2 * sa2);
    CHECK(att.cov(2, 2) == doctest::Approx(1.0 / (wa * h * h)).epsilon(1e-9));
    CHECK(att.cov(1, 1) == doctest::Approx(sigma * sigma / 2).epsilon(1e-9));
    CHECK(att.cov(3, 3) == doctest::Approx(sigma * sigma / (2 * h * h)).epsilon(1e-9));
    CHECK(att.cov(1, 3) == doctest::Approx(0.0).scale(1e-20));
  }
  SUBCASE("quadratic data, five points") {
    const auto arc = polynomial_arc({54999.9, 54999.95, 55000.0, 55000.07, 55000.1}, -2.0, 0.031, -0.2, 0.3, 0.012,
                                    0.05, 1e-6);
    const auto att = fit_optical_attributable(arc);
    const double u = att.tbar - 55000.0;
    CHECK(std::abs(att.alphadot - (0.031 - 0.4 * u)) < 1e-12);
    CHECK(std::abs(att.deltadot - (0.012 + 0.1 * u)) < 1e-12);
    CHECK(std::abs(att.alpha - (-2.0 + 0.031 * u - 0.2 * u * u)) < 1e-12);
  }
  SUBCASE("branch cut in right ascension") {
    const auto arc = polynomial_arc({55000.0, 55000.02, 55000.04}, kPi - 0.001, 0.1, 0.0, 0.1, 0.0, 0.0, 1e-6);
    ObservationArc wrapped = arc;
    for (auto& o : wrapped.observations) o.alpha = wrap_pi(o.alpha);
    const auto att = fit_optical_attributable(wrapped);
    CHECK(att.alphadot == doctest::Approx(0.1).epsilon(1e-9));
    CHECK(att.alpha >= -kPi);
    CHECK(att.alpha < kPi);
  }
  SUBCASE("rates per internal time unit") {
    const auto arc = polynomial_arc({55000.0, 55000.5}, 1.0, 0.02, 0.0, 0.1, 0.0, 0.0, 1e-6);
    const auto att = fit_optical_attributable(arc, kSecondsPerDay);
    CHECK(att.alphadot == doctest::Approx(0.02 / kSecondsPerDay).epsilon(1e-12));
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS((void)fit_optical_attributable(polynomial_arc({55000.0}, 0, 0, 0, 0, 0, 0, 1e-6)), Error);
    CHECK_THROWS_AS((void)fit_optical_attributable(polynomial_arc({55000.0, 55000.0, 55001.0}, 0, 0, 0, 0, 0, 0, 1e-6)),
                    Error);
    CHECK_THROWS_AS((void)fit_optical_attributable(polynomial_arc({55001.0, 55000.0}, 0, 0, 0, 0, 0, 0, 1e-6)), Error);
    CHECK_THROWS_AS((void)fit_radar_attributable(polynomial_arc({55000.0, 55001.0}, 0, 0, 0, 0, 0, 0, 1e-6)), Error);
  }
}

TEST_CASE("radar attributable from exact data") {
  SUBCASE("linear range") {
    auto arc = polynomial_arc({55000.0, 55000.2}, 0.5, 0.0, 0.0, 0.2, 0.0, 0.0, 1e-6);
    arc.observations[0].rho = 0.1;
    arc.observations[1].rho = 0.1 + 0.2 * 0.003;
    for (auto& o : arc.observations) o.sigma_rho = 1e-9;
    const auto att = fit_radar_attributable(arc);
    CHECK(att.rhodot == doctest::Approx(0.003).epsilon(1e-10));
    CHECK(att.rho == doctest::Approx(0.1003).epsilon(1e-12));
  }
  SUBCASE("quadratic range, four points") {
    auto arc = polynomial_arc({54999.9, 55000.0, 55000.05, 55000.1}, 0.5, 0.0, 0.0, 0.2, 0.0, 0.0, 1e-6);
    for (auto& o : arc.observations) {
      const double u = o.t - 55000.0;
      o.rho = 0.05 - 0.002 * u + 0.01 * u * u;
      o.sigma_rho = 1e-9;
    }
    const auto att = fit_radar_attributable(arc);
    const double u = att.tbar - 55000.0;
    CHECK(std::abs(att.rho - (0.05 - 0.002 * u + 0.01 * u * u)) < 1e-12);
    CHECK(std::abs(att.rhodot - (-0.002 + 0.02 * u)) < 1e-12);
    CHECK(att.cov(2, 2) > 0.0);
  }
}

TEST_CASE("fits on a Keplerian arc are consistent with their covariance") {
  Gen g(501);
  std::mt19937_64 rng(502);
  const double sigma = 0.5 * kArcsec;
  const double sigma_rho = 1e-9;  // about 150 m
  const double radar_arc = 2.0 / 24.0;
  const int trials = 1000;
  int opt_within[4] = {0, 0, 0, 0}, rad_within[4] = {0, 0, 0, 0};
  for (int k = 0; k < trials; ++k) {
    const auto el = g.elements(0.8, 2.5, 0.4, 0.4);
    const double tc = 55000.0 + g.uniform(0.0, 300.0);
    const auto truth = seen(el, circular_earth(), tc, kGaussK * kGaussK);
    if (std::abs(truth.delta) > 1.2) {
      for (int j = 0; j < 4; ++j) ++opt_within[j], ++rad_within[j];
      continue;
    }
    const auto att = fit_optical_attributable(kepler_arc(el, tc, 1.0, 5, sigma, false, 0.0, &rng));
    const Vec4 d(wrap_pi(att.alpha - truth.alpha), att.delta - truth.delta, att.alphadot - truth.alphadot,
                 att.deltadot - truth.deltadot);
    for (int j = 0; j < 4; ++j)
      if (std::abs(d(j)) <= 3.0 * std::sqrt(att.cov(j, j))) ++opt_within[j];

    const auto rad = fit_radar_attributable(kepler_arc(el, tc, radar_arc, 5, sigma, true, sigma_rho, &rng));
    const Vec4 r(wrap_pi(rad.alpha - truth.alpha), rad.delta - truth.delta, rad.rho - truth.rho,
                 rad.rhodot - truth.rhodot);
    for (int j = 0; j < 4; ++j)
      if (std::abs(r(j)) <= 3.0 * std::sqrt(rad.cov(j, j))) ++rad_within[j];
  }
  for (int j = 0; j < 4; ++j) {
    CHECK(opt_within[j] >= 0.99 * trials);
    CHECK(rad_within[j] >= 0.99 * trials);
  }
}

TEST_CASE("fit covariance shrinks as 1/m") {
  auto variances = [](int m) {
    std::vector<double> tau, sig;
    for (int k = 0; k < m; ++k) tau.push_back(static_cast<double>(k) / (m - 1) - 0.5);
    sig.assign(tau.size(), 1e-6);
    return polynomial_fit_covariance(tau, sig, 2).diagonal().eval();
  };
  const Eigen::Vector2d v4 = variances(4), v16 = variances(16), v64 = variances(64);
  for (int j = 0; j < 2; ++j) {
    CHECK(v16(j) / v4(j) == doctest::Approx(0.25).epsilon(0.2));
    CHECK(v64(j) / v16(j) == doctest::Approx(0.25).epsilon(0.2));
  }
}

TEST_CASE("observer ephemeris") {
  const auto earth = circular_earth();
  const double period = kTwoPi / kGaussK;
  SUBCASE("analytic model is periodic") {
    const auto a = observer_state(earth, 55000.0), b = observer_state(earth, 55000.0 + period);
    CHECK((a.q - b.q).norm() < 1e-12);
    CHECK((a.qdot - b.qdot).norm() < 1e-14);
    CHECK(a.q.norm() == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("table reproduces nodes and interpolates") {
    const auto tab = tabulate(earth, 55000.0, 55002.0, 1.0 / 24.0);
    const EphemerisModel model = tab;
    for (std::size_t k = 0; k < tab.mjd.size(); k += 7) {
      const auto s = observer_state(model, tab.mjd[k]);
      CHECK((s.q - tab.q[k]).norm() == 0.0);
      CHECK((s.qdot - tab.qdot[k]).norm() < 1e-17);
    }
    Gen g(503);
    double worst = 0.0;
    for (int k = 0; k < 500; ++k) {
      const double t = g.uniform(55000.0, 55002.0);
      worst = std::max(worst, (observer_state(model, t).q - observer_state(earth, t).q).norm());
    }
    CHECK(worst < 1e-9);
  }
  SUBCASE("queries outside the table") {
    const EphemerisModel model = tabulate(earth, 55000.0, 55001.0, 0.5);
    CHECK_THROWS_AS((void)observer_state(model, 54999.9), Error);
    CHECK_THROWS_AS((void)observer_state(model, 55001.1), Error);
  }
  SUBCASE("geocentric station rotates with the Earth") {
    const auto st = geocentric_station();
    const auto s = observer_state(st, 51544.5);
    CHECK(s.q.norm() == doctest::Approx(6378.137));
    CHECK(s.qdot.norm() == doctest::Approx(6378.137 * 7.2921159e-5));
    CHECK(std::abs(s.q.dot(s.qdot)) < 1e-9);
  }
}

TEST_CASE("aberration correction") {
  const auto units = UnitSystem::heliocentric();
  CHECK(aberration_correct(55000.0, 0.0, units) == 55000.0);
  CHECK(55000.0 - aberration_correct(55000.0, 1.0, units) == doctest::Approx(0.00577552).epsilon(1e-6));
  const double once = aberration_correct(55000.0, 0.8, units);
  const double twice = aberration_correct(aberration_correct(55000.0, 0.4, units), 0.4, units);
  CHECK(once == doctest::Approx(twice).epsilon(1e-15));
  CHECK_THROWS_AS((void)aberration_correct(55000.0, -1.0, units), Error);
  // km-s: the correction is still returned in days
  const auto geo = UnitSystem::geocentric();
  CHECK(55000.0 - aberration_correct(55000.0, kLightKmPerSec, geo) == doctest::Approx(1.0 / kSecondsPerDay));
}

TEST_CASE("synthetic attributables") {
  const auto units = UnitSystem::heliocentric();
  Gen g(504);
  SUBCASE("swapping the epochs swaps the truth") {
    for (int k = 0; k < 20; ++k) {
      const auto el = g.elements(0.7, 2.5, 0.5, 0.5);
      const double gap = g.uniform(30.0, 300.0);
      const auto a = synthesize_attributables(el, 55000.0, 55000.0 + gap, circular_earth(), {}, LinkageKind::Optical,
                                              units);
      const auto b = synthesize_attributables(el, 55000.0 + gap, 55000.0, circular_earth(), {}, LinkageKind::Optical,
                                              units);
      CHECK(a.truth.rho[0] == b.truth.rho[1]);
      CHECK(a.truth.rho[1] == b.truth.rho[0]);
      CHECK(a.truth.rhodot[0] == b.truth.rhodot[1]);
      CHECK((a.opt1.values() - b.opt2.values()).norm() == 0.0);
      CHECK((a.truth.state[0].r - b.truth.state[1].r).norm() == 0.0);
    }
  }
  SUBCASE("truth is consistent with the attributables") {
    for (int k = 0; k < 20; ++k) {
      const auto sp = testsupport::random_pair(g);
      for (int e = 0; e < 2; ++e) {
        const auto& att = e == 0 ? sp.opt1 : sp.opt2;
        const auto& obs = e == 0 ? sp.obs1 : sp.obs2;
        const auto basis = observation_basis(att.alpha, att.delta);
        CHECK((body_position(obs.q, sp.truth.rho[e], basis) - sp.truth.state[e].r).norm() < 1e-12);
        CHECK(sp.truth.epoch[e] == doctest::Approx(aberration_correct(sp.truth.tbar[e], sp.truth.rho[e], units)));
      }
      CHECK(sp.truth.xi == doctest::Approx(sp.truth.rho[0] * sp.opt1.alphadot * std::cos(sp.opt1.delta)));
    }
  }
  SUBCASE("noise matches the attached covariance") {
    const auto exact = testsupport::apophis_like_pair();
    const int n = 400;
    double m1 = 0.0, m2 = 0.0;
    for (int k = 0; k < n; ++k) {
      NoiseSpec noise;
      noise.perturb = true;
      noise.seed = 600 + k;
      const auto sp = testsupport::apophis_like_pair(noise);
      const Vec4 d1 = sp.opt1.values() - exact.opt1.values(), d2 = sp.opt2.values() - exact.opt2.values();
      m1 += d1.dot(sp.opt1.cov.ldlt().solve(d1)) / n;
      m2 += d2.dot(sp.opt2.cov.ldlt().solve(d2)) / n;
    }
    CHECK(m1 == doctest::Approx(4.0).epsilon(0.15));
    CHECK(m2 == doctest::Approx(4.0).epsilon(0.15));
  }
  SUBCASE("seeded noise is reproducible") {
    NoiseSpec noise;
    noise.perturb = true;
    noise.seed = 42;
    const auto a = testsupport::apophis_like_pair(noise), b = testsupport::apophis_like_pair(noise);
    CHECK((a.opt1.values() - b.opt1.values()).norm() == 0.0);
    noise.seed = 43;
    CHECK((a.opt1.values() - testsupport::apophis_like_pair(noise).opt1.values()).norm() > 0.0);
  }
  SUBCASE("distance error under realistic noise") {
    const auto exact = testsupport::apophis_like_pair();
    double sq = 0.0;
    const int n = 100;
    for (int k = 0; k < n; ++k) {
      NoiseSpec noise;
      noise.perturb = true;
      noise.seed = 9000 + k;
      const auto sp = testsupport::apophis_like_pair(noise);
      double best = 1e9;
      for (const auto& s : link_optical(sp.optical(), units))
        best = std::min(best, std::abs(s.rho1 - exact.truth.rho[0]));
      sq += best * best / n;
    }
    CHECK(std::sqrt(sq) < 1e-3);
  }
  SUBCASE("errors") {
    KeplerianElements hyper{1.0, 1.5, 0.1, 0.0, 0.0, 0.0, 55000.0};
    CHECK_THROWS_AS((void)synthesize_attributables(hyper, 55000.0, 55100.0, circular_earth(), {}, LinkageKind::Optical,
                                                   units),
                    Error);
    NoiseSpec bad;
    bad.n_obs = 1;
    CHECK_THROWS_AS((void)synthesize_attributables(testsupport::apophis_like(), 54000.0, 54182.0, circular_earth(),
                                                   bad, LinkageKind::Optical, units),
                    Error);
  }
}

TEST_CASE("file formats round-trip") {
  Gen g(505);
  SUBCASE("attributable records") {
    std::vector<AttributableRecord> recs;
    for (int k = 0; k < 5; ++k) {
      const auto sp = testsupport::random_pair(g, k % 2 ? LinkageKind::RadarOptical : LinkageKind::Optical);
      auto r = k % 2 ? AttributableRecord::from(sp.rad1, "au-day") : AttributableRecord::from(sp.opt1, "au-day");
      if (k == 2) r.observer = sp.obs1;
      recs.push_back(r);
    }
    const auto path = scratch("atts.jsonl").string();
    write_attributables(path, recs);
    const auto back = read_attributables(path);
    REQUIRE(back.size() == recs.size());
    for (std::size_t k = 0; k < recs.size(); ++k) {
      CHECK(back[k].kind == recs[k].kind);
      CHECK(back[k].tbar == recs[k].tbar);
      CHECK((back[k].values - recs[k].values).norm() == 0.0);
      CHECK((back[k].cov - recs[k].cov).norm() == 0.0);
      CHECK(back[k].observer.has_value() == recs[k].observer.has_value());
    }
    CHECK((back[2].observer->q - recs[2].observer->q).norm() == 0.0);
    CHECK_THROWS_AS((void)back[1].optical(), Error);
    CHECK_THROWS_AS((void)back[0].radar(), Error);
  }
  SUBCASE("malformed records") {
    const Json good = to_json(AttributableRecord::from(testsupport::apophis_like_pair().opt1, "au-day"));
    CHECK_NOTHROW((void)attributable_from_json(good));
    Json j = good;
    j["kind"] = "infrared";
    CHECK_THROWS_AS((void)attributable_from_json(j), Error);
    j = good;
    j.erase("values");
    CHECK_THROWS_AS((void)attributable_from_json(j), Error);
    j = good;
    j["values"] = {1.0, 2.0};
    CHECK_THROWS_AS((void)attributable_from_json(j), Error);
    j = good;
    j["cov"][1] = 1.0;
    CHECK_THROWS_AS((void)attributable_from_json(j), Error);
    j = good;
    j["values"][1] = 2.0;
    CHECK_THROWS_AS((void)attributable_from_json(j), Error);

    const auto path = scratch("broken.jsonl").string();
    std::ofstream(path) << "{not json\n";
    CHECK_THROWS_AS((void)read_attributables(path), Error);
    CHECK_THROWS_AS((void)read_attributables(scratch("missing.jsonl").string()), Error);
  }
  SUBCASE("ephemeris table") {
    const auto tab = tabulate(circular_earth(), 55000.0, 55010.0, 0.25);
    const auto path = scratch("eph.csv").string();
    write_ephemeris_csv(path, tab);
    const auto back = read_ephemeris_csv(path, 1.0);
    REQUIRE(back.mjd.size() == tab.mjd.size());
    for (std::size_t k = 0; k < tab.mjd.size(); ++k) {
      CHECK(back.mjd[k] == tab.mjd[k]);
      CHECK((back.q[k] - tab.q[k]).norm() == 0.0);
      CHECK((back.qdot[k] - tab.qdot[k]).norm() == 0.0);
    }
    std::ofstream(path) << "mjd,qx,qy,qz,vx,vy,vz\n55000,1,0,0,0,0.017,0\n54999,1,0,0,0,0.017,0\n";
    CHECK_THROWS_AS((void)read_ephemeris_csv(path, 1.0), Error);
  }
  SUBCASE("observation arc") {
    const auto path = scratch("arc.csv").string();
    std::ofstream(path) << "mjd,ra_deg,dec_deg\n55000.0,10.0,-5.0\n55000.1,10.1,-4.9\n55000.2,10.2,-4.8\n";
    const auto arc = read_arc_csv(path, kArcsec);
    REQUIRE(arc.observations.size() == 3);
    CHECK(arc.observations[1].alpha == doctest::Approx(10.1 * kDeg));
    const auto att = fit_optical_attributable(arc);
    CHECK(att.alphadot == doctest::Approx(kDeg).epsilon(1e-9));
  }
  SUBCASE("elements") {
    const auto el = testsupport::apophis_like();
    const auto back = elements_from_json(to_json(el));
    CHECK((back.as_vector() - el.as_vector()).norm() < 1e-15);
    CHECK(back.epoch == el.epoch);
    Json j = to_json(el);
    j["e"] = 1.2;
    CHECK_THROWS_AS((void)elements_from_json(j), Error);
  }
}
