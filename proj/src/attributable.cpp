#include "keplink/attributable.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include "keplink/errors.hpp"

namespace keplink {

namespace {

struct FitResult {
  double value = 0.0;
  double rate = 0.0;
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
};

double time_scale(const std::vector<double>& tau) {
  double s = 0.0;
  for (double t : tau) s = std::max(s, std::abs(t));
  return s > 0.0 ? s : 1.0;
}

// Columns are powers of tau / scale so the normal matrix stays well scaled in any time unit.
Eigen::MatrixXd design(const std::vector<double>& tau, int degree, double scale) {
  Eigen::MatrixXd X(static_cast<Eigen::Index>(tau.size()), degree + 1);
  for (std::size_t k = 0; k < tau.size(); ++k) {
    const double u = tau[k] / scale;
    double pw = 1.0;
    for (int d = 0; d <= degree; ++d) {
      X(static_cast<Eigen::Index>(k), d) = pw;
      pw *= u;
    }
  }
  return X;
}

Eigen::MatrixXd normal_inverse(const Eigen::MatrixXd& X, const Eigen::VectorXd& w) {
  const Eigen::MatrixXd N = X.transpose() * w.asDiagonal() * X;
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(N);
  if (!lu.isInvertible() || lu.rcond() < 1e-14) fail(ErrorKind::Input, "attributable fit: singular normal matrix");
  return lu.inverse();
}

FitResult weighted_fit(const std::vector<double>& tau, const std::vector<double>& y, const std::vector<double>& sigma,
                       int degree) {
  const double scale = time_scale(tau);
  const Eigen::MatrixXd X = design(tau, degree, scale);
  Eigen::VectorXd w(static_cast<Eigen::Index>(tau.size()));
  Eigen::VectorXd Y(static_cast<Eigen::Index>(tau.size()));
  for (std::size_t k = 0; k < tau.size(); ++k) {
    // Zero sigma means exact data; weight uniformly so the fit stays defined.
    w(static_cast<Eigen::Index>(k)) = sigma[k] > 0.0 ? 1.0 / (sigma[k] * sigma[k]) : 1.0;
    Y(static_cast<Eigen::Index>(k)) = y[k];
  }
  const Eigen::MatrixXd Ninv = normal_inverse(X, w);
  const Eigen::VectorXd coef = Ninv * (X.transpose() * w.asDiagonal() * Y);
  FitResult out;
  out.value = coef(0);
  out.rate = coef(1) / scale;
  bool exact = true;
  for (double s : sigma) exact = exact && s == 0.0;
  const Eigen::Matrix2d unscale = Eigen::Vector2d(1.0, 1.0 / scale).asDiagonal();
  if (!exact) out.cov = unscale * Ninv.topLeftCorner(2, 2) * unscale;
  return out;
}

struct Prepared {
  double tbar = 0.0;
  int degree = 1;
  std::vector<double> tau, alpha, delta, sig_alpha, sig_delta;
};

Prepared prepare(const ObservationArc& arc, double time_units_per_day) {
  const auto& obs = arc.observations;
  if (obs.size() < 2) fail(ErrorKind::Input, "attributable fit: at least 2 observations required");
  Prepared p;
  for (std::size_t k = 0; k < obs.size(); ++k) {
    if (k > 0 && !(obs[k].t > obs[k - 1].t)) fail(ErrorKind::Input, "attributable fit: times must be strictly increasing");
    p.tbar += obs[k].t;
  }
  p.tbar /= static_cast<double>(obs.size());
  p.degree = obs.size() >= 3 ? 2 : 1;
  double prev_alpha = obs.front().alpha;
  for (const auto& o : obs) {
    p.tau.push_back((o.t - p.tbar) * time_units_per_day);
    // unwrap right ascension across the branch cut
    const double a = prev_alpha + wrap_pi(o.alpha - prev_alpha);
    prev_alpha = a;
    p.alpha.push_back(a);
    p.delta.push_back(o.delta);
    p.sig_alpha.push_back(o.sigma_angle / std::cos(o.delta));
    p.sig_delta.push_back(o.sigma_angle);
  }
  return p;
}

}  // namespace

Eigen::Matrix2d polynomial_fit_covariance(const std::vector<double>& tau, const std::vector<double>& sigma,
                                          int degree) {
  const double scale = time_scale(tau);
  const Eigen::MatrixXd X = design(tau, degree, scale);
  Eigen::VectorXd w(static_cast<Eigen::Index>(tau.size()));
  for (std::size_t k = 0; k < tau.size(); ++k) w(static_cast<Eigen::Index>(k)) = 1.0 / (sigma[k] * sigma[k]);
  const Eigen::Matrix2d unscale = Eigen::Vector2d(1.0, 1.0 / scale).asDiagonal();
  return unscale * normal_inverse(X, w).topLeftCorner(2, 2) * unscale;
}

OpticalAttributable fit_optical_attributable(const ObservationArc& arc, double time_units_per_day) {
  const Prepared p = prepare(arc, time_units_per_day);
  const FitResult fa = weighted_fit(p.tau, p.alpha, p.sig_alpha, p.degree);
  const FitResult fd = weighted_fit(p.tau, p.delta, p.sig_delta, p.degree);
  OpticalAttributable att;
  att.alpha = wrap_pi(fa.value);
  att.delta = fd.value;
  att.alphadot = fa.rate;
  att.deltadot = fd.rate;
  att.tbar = p.tbar;
  att.station = arc.station;
  att.cov(0, 0) = fa.cov(0, 0);
  att.cov(0, 2) = att.cov(2, 0) = fa.cov(0, 1);
  att.cov(2, 2) = fa.cov(1, 1);
  att.cov(1, 1) = fd.cov(0, 0);
  att.cov(1, 3) = att.cov(3, 1) = fd.cov(0, 1);
  att.cov(3, 3) = fd.cov(1, 1);
  return att;
}

RadarAttributable fit_radar_attributable(const ObservationArc& arc, double time_units_per_day) {
  const Prepared p = prepare(arc, time_units_per_day);
  std::vector<double> rho, sig_rho;
  for (const auto& o : arc.observations) {
    if (!o.rho) fail(ErrorKind::Input, "radar attributable fit: observation without range");
    rho.push_back(*o.rho);
    sig_rho.push_back(o.sigma_rho);
  }
  const FitResult fa = weighted_fit(p.tau, p.alpha, p.sig_alpha, p.degree);
  const FitResult fd = weighted_fit(p.tau, p.delta, p.sig_delta, p.degree);
  const FitResult fr = weighted_fit(p.tau, rho, sig_rho, p.degree);
  if (!(fr.value > 0.0)) fail(ErrorKind::Input, "radar attributable fit: non-positive range at mean epoch");
  RadarAttributable att;
  att.alpha = wrap_pi(fa.value);
  att.delta = fd.value;
  att.rho = fr.value;
  att.rhodot = fr.rate;
  att.tbar = p.tbar;
  att.station = arc.station;
  // angle values and the range pair are the only quantities kept; angular
  // rates are discarded so their correlation with the angles drops out
  att.cov(0, 0) = fa.cov(0, 0);
  att.cov(1, 1) = fd.cov(0, 0);
  att.cov.bottomRightCorner<2, 2>() = fr.cov;
  return att;
}

double aberration_correct(double tbar, double rho, const UnitSystem& units) {
  if (!(rho >= 0.0)) fail(ErrorKind::Domain, "aberration_correct: rho must be non-negative");
  return tbar - units.light_time_days(rho);
}

}  // namespace keplink
