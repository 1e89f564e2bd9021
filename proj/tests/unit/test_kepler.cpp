#include "doctest.h"
#include "keplink/errors.hpp"
#include "keplink/kepler.hpp"
#include "support.hpp"

using namespace keplink;
using testsupport::Gen;

namespace {

double angle_diff(double a, double b) { return std::abs(wrap_pi(a - b)); }

}  // namespace

TEST_CASE("angular momentum") {
  CHECK((angular_momentum(Vec3(1, 0, 0), Vec3(0, 1, 0)) - Vec3(0, 0, 1)).norm() == 0.0);
  CHECK(angular_momentum(Vec3(1, 2, 3), Vec3(2, 4, 6)).norm() == 0.0);
  Gen g(21);
  for (int k = 0; k < 100; ++k) {
    const Vec3 r = g.vec(), v = g.vec();
    const Vec3 c = angular_momentum(r, v);
    CHECK(c.x() == doctest::Approx(r.y() * v.z() - r.z() * v.y()));
    CHECK(c.y() == doctest::Approx(r.z() * v.x() - r.x() * v.z()));
    CHECK(c.z() == doctest::Approx(r.x() * v.y() - r.y() * v.x()));
  }
}

TEST_CASE("Laplace-Lenz vector") {
  const double mu = 0.3;
  CHECK(laplace_lenz(Vec3(1, 0, 0), Vec3(0, std::sqrt(mu), 0), mu).norm() < 1e-15);
  for (double v : {0.3, 0.9, 1.2}) {
    const Vec3 L = laplace_lenz(Vec3(1, 0, 0), Vec3(0, v, 0), 1.0);
    CHECK(L.x() == doctest::Approx(v * v - 1));
    CHECK(std::abs(L.y()) < 1e-15);
  }
  CHECK_THROWS_AS((void)laplace_lenz(Vec3::Zero(), Vec3(1, 0, 0), 1.0), Error);

  Gen g(22);
  for (int k = 0; k < 10000; ++k) {
    const Vec3 r = g.vec(), v = g.vec();
    const double mu = g.uniform(0.1, 3);
    const Vec3 c = r.cross(v);
    const Vec3 L = laplace_lenz(r, v, mu);
    // the two algebraic forms
    const Vec3 alt = (v.cross(c) - mu * r / r.norm()) / mu;
    REQUIRE((L - alt).norm() <= 1e-12 * std::max(1.0, L.norm()));
    REQUIRE(std::abs(L.dot(c)) <= 1e-12 * std::max(1e-300, L.norm() * c.norm()));
  }
}

TEST_CASE("two-body energy") {
  CHECK(two_body_energy(Vec3(1, 0, 0), Vec3(0, 1, 0), 1.0) == doctest::Approx(-0.5));
  CHECK(std::abs(two_body_energy(Vec3(2, 0, 0), Vec3(0, 1, 0), 1.0)) < 1e-15);
  Gen g(23);
  for (int k = 0; k < 200; ++k) {
    const auto s = g.bound_state();
    const auto el = cartesian_to_keplerian(s, 1.0);
    REQUIRE(el);
    CHECK(testsupport::rel_err(two_body_energy(s.r, s.rdot, 1.0), -1.0 / (2 * el->a)) < 1e-12);
  }
}

TEST_CASE("Kepler equation") {
  Gen g(24);
  for (int k = 0; k < 2000; ++k) {
    const double e = g.uniform(0, 0.99), M = g.uniform(-10, 10);
    const double E = solve_kepler(M, e);
    REQUIRE(angle_diff(E - e * std::sin(E), M) < 1e-13);
  }
}

TEST_CASE("cartesian to keplerian conversion") {
  SUBCASE("circular equatorial") {
    const auto el = cartesian_to_keplerian({Vec3(1, 0, 0), Vec3(0, 1, 0), 0.0}, 1.0);
    REQUIRE(el);
    CHECK(el->a == doctest::Approx(1.0));
    CHECK(el->e < 1e-14);
    CHECK(el->i < 1e-14);
    CHECK(el->Omega == 0.0);
    CHECK(el->omega == 0.0);
  }
  SUBCASE("non-elliptic and rectilinear") {
    CHECK_FALSE(cartesian_to_keplerian({Vec3(1, 0, 0), Vec3(0, 1.5, 0), 0.0}, 1.0));
    CHECK_THROWS_AS((void)cartesian_to_keplerian({Vec3(1, 0, 0), Vec3(0.1, 0, 0), 0.0}, 1.0), Error);
  }
  SUBCASE("round trip from elements") {
    Gen g(25);
    for (int k = 0; k < 2000; ++k) {
      const KeplerianElements el{g.uniform(0.3, 5), g.uniform(0.0, 0.95), g.uniform(0.01, kPi - 0.01),
                                 g.uniform(0, kTwoPi), g.uniform(0, kTwoPi), g.uniform(0, kTwoPi), 100.0};
      const auto s = keplerian_to_cartesian(el, 0.7);
      const auto back = cartesian_to_keplerian(s, 0.7);
      REQUIRE(back);
      CHECK(testsupport::rel_err(back->a, el.a) < 1e-10);
      CHECK(std::abs(back->e - el.e) < 1e-10);
      CHECK(std::abs(back->i - el.i) < 1e-10);
      CHECK(angle_diff(back->Omega, el.Omega) < 1e-10);
      if (el.e > 1e-6) {
        CHECK(angle_diff(back->omega, el.omega) < 1e-10 / el.e + 1e-10);
        CHECK(angle_diff(back->ell, el.ell) < 1e-10 / el.e + 1e-10);
      }
      const auto s2 = keplerian_to_cartesian(*back, 0.7);
      CHECK((s2.r - s.r).norm() < 1e-10 * s.r.norm());
      CHECK((s2.rdot - s.rdot).norm() < 1e-10 * s.rdot.norm());
    }
  }
}

TEST_CASE("keplerian to cartesian") {
  const auto s = keplerian_to_cartesian({1, 0, 0, 0, 0, 0, 0.0}, 1.0);
  CHECK((s.r - Vec3(1, 0, 0)).norm() < 1e-15);
  CHECK((s.rdot - Vec3(0, 1, 0)).norm() < 1e-15);
  CHECK_THROWS_AS((void)keplerian_to_cartesian({1, 1.0, 0, 0, 0, 0, 0.0}, 1.0), Error);
  Gen g(26);
  for (int k = 0; k < 500; ++k) {
    auto el = g.elements(0.3, 4, 0.95, kPi);
    const double mu = g.uniform(0.2, 2);
    const auto st = keplerian_to_cartesian(el, mu);
    CHECK(testsupport::rel_err(st.r.cross(st.rdot).norm(), std::sqrt(mu * el.a * (1 - el.e * el.e))) < 1e-12);
    CHECK(testsupport::rel_err(two_body_energy(st.r, st.rdot, mu), -mu / (2 * el.a)) < 1e-12);
    el.ell = 0.0;
    CHECK(testsupport::rel_err(keplerian_to_cartesian(el, mu).r.norm(), el.a * (1 - el.e)) < 1e-13);
  }
}

TEST_CASE("Kepler propagation") {
  const double mu = kGaussK * kGaussK;
  const KeplerianElements el = testsupport::apophis_like();
  const auto s0 = keplerian_to_cartesian(el, mu);

  SUBCASE("zero interval and full period") {
    const auto a = propagate_kepler(el, el.epoch, mu);
    CHECK((a.r - s0.r).norm() < 1e-15);
    const double period = kTwoPi / el.mean_motion(mu);
    const auto b = propagate_kepler(el, el.epoch + period, mu);
    CHECK((b.r - s0.r).norm() < 1e-10 * s0.r.norm());
    CHECK((b.rdot - s0.rdot).norm() < 1e-10 * s0.rdot.norm());
  }
  SUBCASE("agrees with numerical integration over 181.86 days") {
    const auto num = testsupport::rk4_propagate(s0, 181.86, mu, 40000);
    const auto kep = propagate_kepler(el, el.epoch + 181.86, mu);
    CHECK((kep.r - num.r).norm() < 1e-9 * num.r.norm());
    CHECK((kep.rdot - num.rdot).norm() < 1e-9 * num.rdot.norm());
  }
  SUBCASE("conserves the first integrals over ten periods") {
    Gen g(27);
    for (int k = 0; k < 500; ++k) {
      const auto e = g.elements(0.5, 3, 0.9, kPi);
      const auto a = keplerian_to_cartesian(e, 1.0);
      const double period = kTwoPi / e.mean_motion(1.0);
      const auto b = propagate_kepler(e, e.epoch + g.uniform(0, 10) * period, 1.0);
      const Vec3 c0 = a.r.cross(a.rdot), c1 = b.r.cross(b.rdot);
      REQUIRE((c1 - c0).norm() < 1e-12 * c0.norm());
      REQUIRE((laplace_lenz(b.r, b.rdot, 1.0) - laplace_lenz(a.r, a.rdot, 1.0)).norm() < 1e-12);
      REQUIRE(testsupport::rel_err(two_body_energy(b.r, b.rdot, 1.0), two_body_energy(a.r, a.rdot, 1.0)) < 1e-12);
    }
  }
}

TEST_CASE("propagation Jacobian") {
  const double mu = 1.0;
  const KeplerianElements el{1.3, 0.2, 0.3, 1.0, 2.0, 0.5, 10.0};
  CHECK((propagation_jacobian(el, el.epoch, mu) - Mat6::Identity()).norm() == 0.0);
  const double dt = 7.3;
  const Mat6 J = propagation_jacobian(el, el.epoch + dt, mu);
  CHECK(J(5, 0) == doctest::Approx(-1.5 * el.mean_motion(mu) / el.a * dt));

  auto f = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    const auto p = propagate_elements(KeplerianElements::from_vector(x, el.epoch), el.epoch + dt, mu);
    Eigen::VectorXd v = p.as_vector();
    v(5) = wrap_pi(v(5) - el.ell);  // keep the mean anomaly continuous
    return v;
  };
  const Eigen::MatrixXd fd = testsupport::central_jacobian(f, el.as_vector(), 1e-7);
  CHECK((fd - J).norm() < 1e-6 * J.norm());
}

TEST_CASE("element Jacobians") {
  Gen g(28);
  for (int k = 0; k < 20; ++k) {
    const auto el = g.elements(0.5, 3, 0.8, 2.5);
    const Mat6 K = keplerian_to_cartesian_jacobian(el, 1.0);
    auto f = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
      const auto s = keplerian_to_cartesian(KeplerianElements::from_vector(x, el.epoch), 1.0);
      Eigen::VectorXd v(6);
      v << s.r, s.rdot;
      return v;
    };
    const Eigen::MatrixXd fd = testsupport::central_jacobian(f, el.as_vector(), 1e-7);
    CHECK((fd - K).norm() < 1e-6 * K.norm());
    CHECK((cartesian_to_keplerian_jacobian(el, 1.0) * K - Mat6::Identity()).norm() < 1e-9);
  }
}

TEST_CASE("compatibility residuals") {
  const double mu = 1.0;
  const KeplerianElements el{1.2, 0.3, 0.4, 0.1, 0.2, 0.3, 0.0};
  const auto s1 = propagate_kepler(el, 1.0, mu);
  const auto s2 = propagate_kepler(el, 4.0, mu);
  const auto r = compatibility_residuals(s1, s2, Vec3(0.6, 0.8, 0.0), mu);
  CHECK(std::abs(r.lenz_line_of_sight) < 1e-9);
  REQUIRE(r.mean_anomaly);
  CHECK(std::abs(*r.mean_anomaly) < 1e-9);

  // a full revolution between the epochs still wraps to zero
  const double period = kTwoPi / el.mean_motion(mu);
  const auto s3 = propagate_kepler(el, 1.0 + period + 0.5, mu);
  const auto w = compatibility_residuals(s1, s3, Vec3(0, 0, 1), mu);
  CHECK(std::abs(*w.mean_anomaly) < 1e-9);

  const auto h = compatibility_residuals(s1, {Vec3(1, 0, 0), Vec3(0, 2, 0), 2.0}, Vec3(0, 0, 1), mu);
  CHECK_FALSE(h.mean_anomaly);
}
