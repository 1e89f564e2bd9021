#pragma once

#include <cmath>
#include <functional>
#include <random>

#include <Eigen/Core>

#include "keplink/ephemeris.hpp"
#include "keplink/kepler.hpp"
#include "keplink/synthesis.hpp"

namespace testsupport {

using keplink::Vec3;

// Seeded generator with the handful of distributions the property tests need.
struct Gen {
  std::mt19937_64 eng;
  explicit Gen(std::uint64_t seed) : eng(seed) {}

  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(eng); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(eng); }
  int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(eng); }
  Vec3 vec(double scale = 1.0) { return Vec3(normal(), normal(), normal()) * scale; }
  Vec3 unit() { return vec().normalized(); }

  keplink::KeplerianElements elements(double a_min = 0.6, double a_max = 3.0, double e_max = 0.6,
                                      double i_max = 0.6, double epoch = 55000.0) {
    return {uniform(a_min, a_max), uniform(0.0, e_max), uniform(0.0, i_max), uniform(0.0, keplink::kTwoPi),
            uniform(0.0, keplink::kTwoPi), uniform(0.0, keplink::kTwoPi), epoch};
  }

  // Bound Cartesian state around mu = 1 with |r| ~ 1.
  keplink::CartesianState bound_state() {
    for (;;) {
      const Vec3 r = vec().normalized() * uniform(0.5, 2.0);
      const Vec3 v = vec(0.4) + r.cross(unit()).normalized() * uniform(0.3, 1.0);
      if (keplink::two_body_energy(r, v, 1.0) < -0.05 && r.cross(v).norm() > 0.1) return {r, v, 0.0};
    }
  }
};

// Fixed-step classical Runge-Kutta for the two-body problem (independent of the Kepler solver).
inline keplink::CartesianState rk4_propagate(const keplink::CartesianState& s0, double dt, double mu, int steps) {
  using State = Eigen::Matrix<double, 6, 1>;
  auto f = [mu](const State& y) {
    State d;
    const Vec3 r = y.head<3>();
    d.head<3>() = y.tail<3>();
    d.tail<3>() = -mu * r / std::pow(r.norm(), 3);
    return d;
  };
  State y;
  y << s0.r, s0.rdot;
  const double h = dt / steps;
  for (int k = 0; k < steps; ++k) {
    const State k1 = f(y), k2 = f(y + 0.5 * h * k1), k3 = f(y + 0.5 * h * k2), k4 = f(y + h * k3);
    y += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return {y.head<3>(), y.tail<3>(), s0.epoch + dt};
}

// Central finite-difference Jacobian of f at x with per-component steps h * max(1, |x_k|).
inline Eigen::MatrixXd central_jacobian(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
                                        const Eigen::VectorXd& x, double h) {
  const Eigen::VectorXd f0 = f(x);
  Eigen::MatrixXd J(f0.size(), x.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    const double step = h * std::max(1.0, std::abs(x(k)));
    Eigen::VectorXd xp = x, xm = x;
    xp(k) += step;
    xm(k) -= step;
    J.col(k) = (f(xp) - f(xm)) / (2 * step);
  }
  return J;
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// Apophis-like truth seen from a circular 1 AU observer, 182 days apart.
inline keplink::KeplerianElements apophis_like() {
  return {0.92, 0.19, 3.33 * keplink::kDeg, 204.4 * keplink::kDeg, 126.4 * keplink::kDeg, 30.0 * keplink::kDeg,
          54000.0};
}

inline keplink::SyntheticPair apophis_like_pair(const keplink::NoiseSpec& noise = {}) {
  return keplink::synthesize_attributables(apophis_like(), 54000.0, 54182.0, keplink::circular_earth(), noise,
                                           keplink::LinkageKind::Optical, keplink::UnitSystem::heliocentric());
}

// Random optical pair from the same family as the acceptance suite; resamples
// until the generator's geometry is not near-degenerate.
inline keplink::SyntheticPair random_pair(Gen& g, keplink::LinkageKind kind = keplink::LinkageKind::Optical,
                                          const keplink::NoiseSpec& noise = {}) {
  const keplink::UnitSystem units = keplink::UnitSystem::heliocentric();
  for (;;) {
    const auto el = g.elements(0.7, 3.0, 0.6, 0.5);
    const double gap = g.uniform(30.0, 300.0);
    try {
      auto sp = keplink::synthesize_attributables(el, 55000.0, 55000.0 + gap, keplink::circular_earth(), noise, kind,
                                                  units);
      const double d1 = std::abs(sp.kind == keplink::LinkageKind::Optical ? sp.opt1.delta : sp.rad1.delta);
      if (d1 < 1.3 && std::abs(sp.opt2.delta) < 1.3 && sp.truth.rho[0] > 0.02 && sp.truth.rho[1] > 0.02) return sp;
    } catch (const std::exception&) {
    }
  }
}

}  // namespace testsupport
