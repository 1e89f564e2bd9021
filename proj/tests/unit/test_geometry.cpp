#include "doctest.h"
#include "keplink/errors.hpp"
#include "keplink/geometry.hpp"
#include "support.hpp"

using namespace keplink;
using testsupport::Gen;

TEST_CASE("observation basis at axis-aligned angles") {
  const auto b = observation_basis(0.0, 0.0);
  CHECK((b.e_rho - Vec3(1, 0, 0)).norm() < 1e-15);
  CHECK((b.e_alpha - Vec3(0, 1, 0)).norm() < 1e-15);
  CHECK((b.e_delta - Vec3(0, 0, 1)).norm() < 1e-15);

  const auto q = observation_basis(kPi / 2, 0.0);
  CHECK((q.e_rho - Vec3(0, 1, 0)).norm() < 1e-15);
  CHECK((q.e_alpha - Vec3(-1, 0, 0)).norm() < 1e-15);
  CHECK((q.e_delta - Vec3(0, 0, 1)).norm() < 1e-15);
}

TEST_CASE("observation basis matches the partial derivatives of e_rho") {
  Gen g(11);
  auto e_rho = [](double a, double d) { return Vec3(std::cos(d) * std::cos(a), std::cos(d) * std::sin(a), std::sin(d)); };
  for (int k = 0; k < 200; ++k) {
    const double a = g.uniform(-kPi, kPi), d = g.uniform(-1.5, 1.5), h = 1e-6;
    const auto b = observation_basis(a, d);
    const Vec3 da = (e_rho(a + h, d) - e_rho(a - h, d)) / (2 * h) / std::cos(d);
    const Vec3 dd = (e_rho(a, d + h) - e_rho(a, d - h)) / (2 * h);
    CHECK((b.e_rho - e_rho(a, d)).norm() < 1e-15);
    CHECK((b.e_alpha - da).norm() < 1e-9);
    CHECK((b.e_delta - dd).norm() < 1e-9);
  }
}

TEST_CASE("observation basis is orthonormal and positively oriented") {
  Gen g(12);
  for (int k = 0; k < 10000; ++k) {
    const auto b = observation_basis(g.uniform(-kPi, kPi), g.uniform(-1.57, 1.57));
    REQUIRE(std::abs(b.e_rho.norm() - 1) < 1e-12);
    REQUIRE(std::abs(b.e_alpha.norm() - 1) < 1e-12);
    REQUIRE(std::abs(b.e_delta.norm() - 1) < 1e-12);
    REQUIRE(std::abs(b.e_rho.dot(b.e_alpha)) < 1e-12);
    REQUIRE(std::abs(b.e_rho.dot(b.e_delta)) < 1e-12);
    REQUIRE(std::abs(b.e_alpha.dot(b.e_delta)) < 1e-12);
    REQUIRE((b.e_rho.cross(b.e_alpha) - b.e_delta).norm() < 1e-12);
  }
}

TEST_CASE("observation basis rejects the poles") {
  CHECK_THROWS_AS((void)observation_basis(0.0, kPi / 2), Error);
  CHECK_THROWS_AS((void)observation_basis(0.0, -kPi / 2 + 1e-10), Error);
  CHECK_NOTHROW((void)observation_basis(0.0, kPi / 2 - 1e-6));
}

TEST_CASE("body position") {
  CHECK((body_position(Vec3::Zero(), 1.0, observation_basis(0, 0)) - Vec3(1, 0, 0)).norm() < 1e-15);
  CHECK((body_position(Vec3(1, 0, 0), 2.0, observation_basis(kPi / 2, 0)) - Vec3(1, 2, 0)).norm() < 1e-15);
  CHECK_THROWS_AS((void)body_position(Vec3::Zero(), 0.0, observation_basis(0, 0)), Error);
  Gen g(13);
  for (int k = 0; k < 100; ++k) {
    const Vec3 q = g.vec();
    const double rho = g.uniform(0.01, 5);
    CHECK(std::abs((body_position(q, rho, observation_basis(g.uniform(-3, 3), g.uniform(-1.5, 1.5))) - q).norm() - rho) <
          1e-14 * (1 + rho));
  }
}

TEST_CASE("body velocity") {
  const auto b = observation_basis(0.3, 0.2);
  CHECK(body_velocity(Vec3::Zero(), 0, 1, 0, 0, b, 0.2).norm() == 0.0);
  CHECK((body_velocity(Vec3::Zero(), 1, 1, 0, 0, b, 0.2) - b.e_rho).norm() < 1e-15);
  Gen g(14);
  for (int k = 0; k < 100; ++k) {
    const double a = g.uniform(-3, 3), d = g.uniform(-1.5, 1.5), rho = g.uniform(0.1, 3), rd = g.normal(),
                 ad = g.normal(), dd = g.normal();
    const auto bb = observation_basis(a, d);
    const Vec3 qd = g.vec();
    const Vec3 rel = body_velocity(qd, rd, rho, ad, dd, bb, d) - qd;
    CHECK(std::abs(rel.dot(bb.e_rho) - rd) < 1e-13);
    CHECK(std::abs(rel.dot(bb.e_alpha) - rho * ad * std::cos(d)) < 1e-13);
    CHECK(std::abs(rel.dot(bb.e_delta) - rho * dd) < 1e-13);
  }
}

TEST_CASE("position and velocity are linear in rho and rhodot") {
  Gen g(15);
  for (int k = 0; k < 100; ++k) {
    const double d = g.uniform(-1.4, 1.4), ad = g.normal(), dd = g.normal();
    const auto b = observation_basis(g.uniform(-3, 3), d);
    const Vec3 q = g.vec(), qd = g.vec();
    const double r1 = g.uniform(0.1, 2), r2 = g.uniform(0.1, 2), v1 = g.normal(), v2 = g.normal();
    const Vec3 sum = body_position(q, r1 + r2, b) - q;
    CHECK((sum - (body_position(q, r1, b) - q) - (body_position(q, r2, b) - q)).norm() < 1e-14);
    const Vec3 vs = body_velocity(qd, v1 + v2, r1 + r2, ad, dd, b, d) - qd;
    const Vec3 va = body_velocity(qd, v1, r1, ad, dd, b, d) - qd;
    const Vec3 vb = body_velocity(qd, v2, r2, ad, dd, b, d) - qd;
    CHECK((vs - va - vb).norm() < 1e-13);
  }
}

TEST_CASE("hat map") {
  CHECK(hat_map(Vec3::Zero()).m.isZero());
  CHECK(((hat_map(Vec3(0, 0, 1)) * Vec3(1, 0, 0)) - Vec3(0, 1, 0)).norm() == 0.0);
  const Mat3 m = hat_map(Vec3(1, 2, 3)).m;
  CHECK(m(0, 1) == -3.0);
  CHECK(m(0, 2) == 2.0);
  CHECK(m(1, 2) == -1.0);
  Gen g(16);
  for (int k = 0; k < 1000; ++k) {
    const Vec3 u = g.vec(), w = g.vec();
    const Mat3 h = hat_map(u).m;
    REQUIRE((h + h.transpose()).isZero(0.0));
    REQUIRE((h * w - u.cross(w)).norm() <= 1e-15 * (1 + u.norm() * w.norm()));
  }
}

TEST_CASE("topocentric_from_relative inverts position and velocity composition") {
  Gen g(17);
  for (int k = 0; k < 200; ++k) {
    const double a = g.uniform(-kPi, kPi), d = g.uniform(-1.4, 1.4), rho = g.uniform(0.05, 4), rd = g.normal(),
                 ad = g.normal(), dd = g.normal();
    const auto b = observation_basis(a, d);
    const TopocentricState t = topocentric_from_relative(rho * b.e_rho, body_velocity(Vec3::Zero(), rd, rho, ad, dd, b, d));
    CHECK(std::abs(wrap_pi(t.alpha - a)) < 1e-13);
    CHECK(std::abs(t.delta - d) < 1e-13);
    CHECK(std::abs(t.rho - rho) < 1e-13 * rho);
    CHECK(std::abs(t.rhodot - rd) < 1e-12);
    CHECK(std::abs(t.alphadot - ad) < 1e-11);
    CHECK(std::abs(t.deltadot - dd) < 1e-12);
  }
}

TEST_CASE("angle wrapping") {
  CHECK(wrap_pi(kPi) == doctest::Approx(-kPi));
  CHECK(wrap_pi(3 * kPi + 0.1) == doctest::Approx(-kPi + 0.1));
  CHECK(wrap_two_pi(-0.5) == doctest::Approx(kTwoPi - 0.5));
  CHECK(wrap_two_pi(kTwoPi) == doctest::Approx(0.0));
}
