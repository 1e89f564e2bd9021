#include "keplink/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <Eigen/LU>

namespace keplink {

namespace {

constexpr double kTrimRel = 1e-13;

void trim(std::vector<double>& c) {
  double mx = 0.0;
  for (double v : c) mx = std::max(mx, std::abs(v));
  const double thr = kTrimRel * mx;
  while (!c.empty() && std::abs(c.back()) <= thr) c.pop_back();
}

}  // namespace

// ---------------------------------------------------------------------------
// UnivariatePoly

UnivariatePoly::UnivariatePoly(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) { trim(coeffs_); }

UnivariatePoly UnivariatePoly::monomial(int power, double c) {
  std::vector<double> v(static_cast<std::size_t>(power) + 1, 0.0);
  v.back() = c;
  return UnivariatePoly(std::move(v));
}

UnivariatePoly UnivariatePoly::from_roots(const std::vector<double>& roots) {
  UnivariatePoly p = constant(1.0);
  for (double r : roots) p = p * UnivariatePoly(std::vector<double>{-r, 1.0});
  return p;
}

double UnivariatePoly::coefficient(int power) const {
  return power >= 0 && power < static_cast<int>(coeffs_.size()) ? coeffs_[static_cast<std::size_t>(power)] : 0.0;
}

double UnivariatePoly::max_abs_coefficient() const {
  double mx = 0.0;
  for (double v : coeffs_) mx = std::max(mx, std::abs(v));
  return mx;
}

double UnivariatePoly::operator()(double x) const {
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

Complex UnivariatePoly::operator()(Complex x) const {
  Complex acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

UnivariatePoly UnivariatePoly::derivative() const {
  if (coeffs_.size() <= 1) return {};
  std::vector<double> d(coeffs_.size() - 1);
  for (std::size_t k = 1; k < coeffs_.size(); ++k) d[k - 1] = static_cast<double>(k) * coeffs_[k];
  return UnivariatePoly(std::move(d));
}

UnivariatePoly& UnivariatePoly::operator+=(const UnivariatePoly& o) {
  if (o.coeffs_.size() > coeffs_.size()) coeffs_.resize(o.coeffs_.size(), 0.0);
  for (std::size_t k = 0; k < o.coeffs_.size(); ++k) coeffs_[k] += o.coeffs_[k];
  trim(coeffs_);
  return *this;
}

UnivariatePoly& UnivariatePoly::operator-=(const UnivariatePoly& o) {
  if (o.coeffs_.size() > coeffs_.size()) coeffs_.resize(o.coeffs_.size(), 0.0);
  for (std::size_t k = 0; k < o.coeffs_.size(); ++k) coeffs_[k] -= o.coeffs_[k];
  trim(coeffs_);
  return *this;
}

UnivariatePoly& UnivariatePoly::operator*=(double s) {
  for (double& v : coeffs_) v *= s;
  trim(coeffs_);
  return *this;
}

UnivariatePoly operator+(UnivariatePoly a, const UnivariatePoly& b) { return a += b; }
UnivariatePoly operator-(UnivariatePoly a, const UnivariatePoly& b) { return a -= b; }
UnivariatePoly operator*(double s, UnivariatePoly a) { return a *= s; }

UnivariatePoly operator*(const UnivariatePoly& a, const UnivariatePoly& b) {
  if (a.is_zero() || b.is_zero()) return {};
  const auto& ca = a.coefficients();
  const auto& cb = b.coefficients();
  std::vector<double> out(ca.size() + cb.size() - 1, 0.0);
  for (std::size_t i = 0; i < ca.size(); ++i)
    for (std::size_t j = 0; j < cb.size(); ++j) out[i + j] += ca[i] * cb[j];
  return UnivariatePoly(std::move(out));
}

// ---------------------------------------------------------------------------
// BivariatePoly

BivariatePoly::BivariatePoly(Eigen::MatrixXd coeffs) : c_(std::move(coeffs)) {
  if (c_.size() == 0) c_ = Eigen::MatrixXd::Zero(1, 1);
}

BivariatePoly BivariatePoly::constant(double c) { return BivariatePoly(Eigen::MatrixXd::Constant(1, 1, c)); }

BivariatePoly BivariatePoly::x() {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2, 1);
  m(1, 0) = 1.0;
  return BivariatePoly(m);
}

BivariatePoly BivariatePoly::y() {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(1, 2);
  m(0, 1) = 1.0;
  return BivariatePoly(m);
}

BivariatePoly BivariatePoly::in_x(const UnivariatePoly& p) {
  if (p.is_zero()) return constant(0.0);
  Eigen::MatrixXd m(p.degree() + 1, 1);
  for (int k = 0; k <= p.degree(); ++k) m(k, 0) = p.coefficient(k);
  return BivariatePoly(m);
}

BivariatePoly BivariatePoly::in_y(const UnivariatePoly& p) {
  if (p.is_zero()) return constant(0.0);
  Eigen::MatrixXd m(1, p.degree() + 1);
  for (int k = 0; k <= p.degree(); ++k) m(0, k) = p.coefficient(k);
  return BivariatePoly(m);
}

double BivariatePoly::coeff(int i, int j) const {
  return i >= 0 && j >= 0 && i < c_.rows() && j < c_.cols() ? c_(i, j) : 0.0;
}

int BivariatePoly::degree_x(double rel_tol) const {
  const double thr = rel_tol * max_abs_coefficient();
  for (int i = static_cast<int>(c_.rows()) - 1; i >= 0; --i)
    for (int j = 0; j < c_.cols(); ++j)
      if (std::abs(c_(i, j)) > thr) return i;
  return -1;
}

int BivariatePoly::degree_y(double rel_tol) const {
  const double thr = rel_tol * max_abs_coefficient();
  for (int j = static_cast<int>(c_.cols()) - 1; j >= 0; --j)
    for (int i = 0; i < c_.rows(); ++i)
      if (std::abs(c_(i, j)) > thr) return j;
  return -1;
}

int BivariatePoly::total_degree(double rel_tol) const {
  const double thr = rel_tol * max_abs_coefficient();
  int deg = -1;
  for (int i = 0; i < c_.rows(); ++i)
    for (int j = 0; j < c_.cols(); ++j)
      if (std::abs(c_(i, j)) > thr) deg = std::max(deg, i + j);
  return deg;
}

double BivariatePoly::operator()(double x, double y) const {
  double acc = 0.0;
  for (int i = static_cast<int>(c_.rows()) - 1; i >= 0; --i) {
    double row = 0.0;
    for (int j = static_cast<int>(c_.cols()) - 1; j >= 0; --j) row = row * y + c_(i, j);
    acc = acc * x + row;
  }
  return acc;
}

BivariatePoly BivariatePoly::derivative_x() const {
  if (c_.rows() <= 1) return constant(0.0);
  Eigen::MatrixXd d(c_.rows() - 1, c_.cols());
  for (int i = 1; i < c_.rows(); ++i) d.row(i - 1) = static_cast<double>(i) * c_.row(i);
  return BivariatePoly(d);
}

BivariatePoly BivariatePoly::derivative_y() const {
  if (c_.cols() <= 1) return constant(0.0);
  Eigen::MatrixXd d(c_.rows(), c_.cols() - 1);
  for (int j = 1; j < c_.cols(); ++j) d.col(j - 1) = static_cast<double>(j) * c_.col(j);
  return BivariatePoly(d);
}

BivariatePoly& BivariatePoly::operator+=(const BivariatePoly& o) {
  const auto rows = std::max(c_.rows(), o.c_.rows());
  const auto cols = std::max(c_.cols(), o.c_.cols());
  if (rows != c_.rows() || cols != c_.cols()) c_.conservativeResizeLike(Eigen::MatrixXd::Zero(rows, cols));
  c_.topLeftCorner(o.c_.rows(), o.c_.cols()) += o.c_;
  return *this;
}

BivariatePoly& BivariatePoly::operator-=(const BivariatePoly& o) { return *this += (-1.0) * o; }

BivariatePoly& BivariatePoly::operator*=(double s) {
  c_ *= s;
  return *this;
}

BivariatePoly operator+(BivariatePoly a, const BivariatePoly& b) { return a += b; }
BivariatePoly operator-(BivariatePoly a, const BivariatePoly& b) { return a -= b; }
BivariatePoly operator*(double s, BivariatePoly a) { return a *= s; }

BivariatePoly operator*(const BivariatePoly& a, const BivariatePoly& b) {
  const auto& ca = a.coefficients();
  const auto& cb = b.coefficients();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(ca.rows() + cb.rows() - 1, ca.cols() + cb.cols() - 1);
  for (int i = 0; i < ca.rows(); ++i)
    for (int j = 0; j < ca.cols(); ++j) {
      const double v = ca(i, j);
      if (v == 0.0) continue;
      out.block(i, j, cb.rows(), cb.cols()) += v * cb;
    }
  return BivariatePoly(out);
}

std::vector<UnivariatePoly> coeffs_in_second_var(const BivariatePoly& p) {
  const auto& c = p.coefficients();
  std::vector<UnivariatePoly> out;
  const int deg = p.degree_y();
  for (int j = 0; j <= deg; ++j) {
    std::vector<double> col(static_cast<std::size_t>(c.rows()));
    for (int i = 0; i < c.rows(); ++i) col[static_cast<std::size_t>(i)] = c(i, j);
    out.emplace_back(std::move(col));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sylvester matrix, FFT evaluation-interpolation

Eigen::MatrixXcd PolyMatrix::evaluate(Complex x) const {
  Eigen::MatrixXcd m(size, size);
  for (int r = 0; r < size; ++r)
    for (int c = 0; c < size; ++c) m(r, c) = (*this)(r, c)(x);
  return m;
}

int PolyMatrix::determinant_degree_bound() const {
  int by_rows = 0, by_cols = 0;
  for (int r = 0; r < size; ++r) {
    int mr = -1, mc = -1;
    for (int c = 0; c < size; ++c) {
      mr = std::max(mr, (*this)(r, c).degree());
      mc = std::max(mc, (*this)(c, r).degree());
    }
    // A zero row or column makes the determinant identically zero.
    if (mr < 0 || mc < 0) return 0;
    by_rows += mr;
    by_cols += mc;
  }
  return std::min(by_rows, by_cols);
}

PolyMatrix sylvester_matrix(const std::vector<UnivariatePoly>& a, const std::vector<UnivariatePoly>& b) {
  const int m = static_cast<int>(a.size()) - 1;
  const int n = static_cast<int>(b.size()) - 1;
  PolyMatrix s(m + n);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i <= m; ++i) s(k + i, k) = a[static_cast<std::size_t>(m - i)];
  for (int k = 0; k < m; ++k)
    for (int j = 0; j <= n; ++j) s(k + j, n + k) = b[static_cast<std::size_t>(n - j)];
  return s;
}

void fft(std::vector<Complex>& data, bool inverse) {
  const std::size_t n = data.size();
  if (n == 0 || (n & (n - 1)) != 0) fail(ErrorKind::Domain, "fft: size must be a power of two");
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(data[i], data[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = (inverse ? -2.0 : 2.0) * std::numbers::pi / static_cast<double>(len);
    for (std::size_t start = 0; start < n; start += len) {
      for (std::size_t k = 0; k < len / 2; ++k) {
        // Exact twiddles from polar() avoid accumulated rotation error.
        const Complex w = std::polar(1.0, ang * static_cast<double>(k));
        const Complex u = data[start + k];
        const Complex v = data[start + k + len / 2] * w;
        data[start + k] = u + v;
        data[start + k + len / 2] = u - v;
      }
    }
  }
  if (inverse)
    for (auto& v : data) v /= static_cast<double>(n);
}

InterpolationResult fft_evaluation_interpolation(const PolyMatrix& entries, int n_points, double radius) {
  if (n_points <= 0 || (n_points & (n_points - 1)) != 0)
    fail(ErrorKind::Domain, "fft_evaluation_interpolation: n_points must be a power of two");
  if (!(radius > 0.0)) fail(ErrorKind::Domain, "fft_evaluation_interpolation: radius must be positive");

  // Values at x_k = R exp(2 pi i k / N) are sum_j (c_j R^j) exp(2 pi i j k / N),
  // a forward DFT of the scaled coefficients; the inverse transform recovers them.
  std::vector<Complex> values(static_cast<std::size_t>(n_points));
  bool all_zero = true;
  for (int k = 0; k < n_points; ++k) {
    const Complex node = std::polar(radius, 2.0 * std::numbers::pi * k / n_points);
    const Eigen::MatrixXcd m = entries.evaluate(node);
    const Complex det = entries.size == 0 ? Complex(1.0) : Eigen::PartialPivLU<Eigen::MatrixXcd>(m).determinant();
    values[static_cast<std::size_t>(k)] = det;
    if (det != Complex(0.0)) all_zero = false;
  }

  InterpolationResult out;
  out.radius = radius;
  out.coefficients.assign(static_cast<std::size_t>(n_points), 0.0);
  if (all_zero) {
    out.identically_zero = true;
    return out;
  }
  fft(values, true);

  double max_re = 0.0, max_im = 0.0;
  for (const auto& v : values) {
    max_re = std::max(max_re, std::abs(v.real()));
    max_im = std::max(max_im, std::abs(v.imag()));
  }
  out.imag_ratio = max_re > 0.0 ? max_im / max_re : std::numeric_limits<double>::infinity();
  if (out.imag_ratio > 1e-9) {
    fail(ErrorKind::Numerical, "fft_evaluation_interpolation: imaginary residue " + std::to_string(out.imag_ratio) +
                                   " above conditioning threshold");
  }
  double scale = 1.0;
  for (int j = 0; j < n_points; ++j) {
    out.coefficients[static_cast<std::size_t>(j)] = values[static_cast<std::size_t>(j)].real() / scale;
    scale *= radius;
  }
  return out;
}

namespace {

int next_pow2_above(int bound) {
  int n = 1;
  while (n <= bound) n <<= 1;
  return n;
}

// Geometric mean of the root moduli, (|c_low| / |c_high|)^(1/(high-low)).
double root_scale(const std::vector<double>& c, int degree_bound) {
  double mx = 0.0;
  for (int j = 0; j <= degree_bound && j < static_cast<int>(c.size()); ++j) mx = std::max(mx, std::abs(c[j]));
  const double thr = 1e-12 * mx;
  int lo = -1, hi = -1;
  for (int j = 0; j <= degree_bound && j < static_cast<int>(c.size()); ++j) {
    if (std::abs(c[j]) > thr) {
      if (lo < 0) lo = j;
      hi = j;
    }
  }
  if (lo < 0 || hi <= lo) return 1.0;
  return std::pow(std::abs(c[lo]) / std::abs(c[hi]), 1.0 / (hi - lo));
}

}  // namespace

ResultantResult sylvester_resultant(const BivariatePoly& p, const BivariatePoly& q, const ResultantOptions& opts) {
  const auto a = coeffs_in_second_var(p);
  const auto b = coeffs_in_second_var(q);
  if (a.empty() || b.empty()) fail(ErrorKind::Degenerate, "sylvester_resultant: zero polynomial");
  if (a.size() == 1 && b.size() == 1)
    fail(ErrorKind::Degenerate, "sylvester_resultant: neither polynomial depends on the eliminated variable");

  const PolyMatrix s = sylvester_matrix(a, b);
  ResultantResult out;
  out.degree_bound = s.determinant_degree_bound();
  const int bezout = p.total_degree() * q.total_degree();
  if (bezout >= 0) out.degree_bound = std::min(out.degree_bound, bezout);
  out.fft_points = std::max(opts.fft_points, next_pow2_above(out.degree_bound));

  double radius = opts.radius;
  InterpolationResult interp;
  bool have = false;
  for (int pass = 0;; ++pass) {
    bool ok = true;
    try {
      interp = fft_evaluation_interpolation(s, out.fft_points, radius);
      have = true;
    } catch (const Error&) {
      if (!opts.auto_radius || (pass >= 3 && !have)) throw;
      ok = false;
    }
    // a rescaled circle failed the residue check; keep the earlier interpolation
    if (!ok && have) break;
    if (!opts.auto_radius || pass >= 3) break;
    if (ok) {
      if (interp.identically_zero) break;
      const double scale = root_scale(interp.coefficients, out.degree_bound);
      if (scale >= 0.5 * radius && scale <= 2.0 * radius) break;
      radius = scale;
    } else {
      radius = radius >= 1.0 ? radius * 8.0 : radius / 8.0;
    }
  }

  out.matrix = s;
  out.radius = interp.radius;
  out.imag_ratio = interp.imag_ratio;
  out.raw_coefficients = interp.coefficients;
  if (interp.identically_zero) return out;

  // compare on the evaluation circle, where the interpolation noise is uniform
  double max_in = 0.0, max_tail = 0.0;
  for (int j = 0; j < out.fft_points; ++j) {
    const double v = std::abs(interp.coefficients[static_cast<std::size_t>(j)]) * std::pow(interp.radius, j);
    double& slot = j <= out.degree_bound ? max_in : max_tail;
    slot = std::max(slot, v);
  }
  out.tail_ratio = max_in > 0.0 ? max_tail / max_in : 0.0;
  out.resultant = UnivariatePoly(std::vector<double>(interp.coefficients.begin(),
                                                     interp.coefficients.begin() + out.degree_bound + 1));
  return out;
}

// ---------------------------------------------------------------------------
// Roots

namespace {

// Initial radii from the upper convex hull of (k, log|c_k|).
std::vector<Complex> aberth_initial_guesses(const std::vector<double>& c) {
  const int n = static_cast<int>(c.size()) - 1;
  std::vector<int> hull;
  for (int k = 0; k <= n; ++k) {
    if (c[static_cast<std::size_t>(k)] == 0.0) continue;
    const double yk = std::log(std::abs(c[static_cast<std::size_t>(k)]));
    while (hull.size() >= 2) {
      const int i = hull[hull.size() - 2], j = hull.back();
      const double yi = std::log(std::abs(c[static_cast<std::size_t>(i)]));
      const double yj = std::log(std::abs(c[static_cast<std::size_t>(j)]));
      // drop j if it lies on or below the segment i -> k
      if ((yj - yi) * (k - i) <= (yk - yi) * (j - i)) hull.pop_back();
      else break;
    }
    hull.push_back(k);
  }
  constexpr double kGolden = 2.39996322972865332;  // golden angle
  std::vector<Complex> z;
  z.reserve(static_cast<std::size_t>(n));
  double offset = 0.4;
  for (std::size_t e = 1; e < hull.size(); ++e) {
    const int i = hull[e - 1], j = hull[e];
    const int count = j - i;
    const double u = std::pow(std::abs(c[static_cast<std::size_t>(i)]) / std::abs(c[static_cast<std::size_t>(j)]),
                              1.0 / count);
    for (int k = 0; k < count; ++k) z.push_back(std::polar(u, 2.0 * std::numbers::pi * k / count + offset));
    offset += kGolden;
  }
  return z;
}

}  // namespace

std::vector<Complex> aberth_roots(const UnivariatePoly& poly, double tol, int max_iter) {
  if (poly.degree() < 1) fail(ErrorKind::Domain, "aberth_roots: degree must be at least 1");
  std::vector<double> c = poly.coefficients();
  std::vector<Complex> roots;
  std::size_t zeros = 0;
  while (zeros < c.size() && c[zeros] == 0.0) ++zeros;
  roots.assign(zeros, Complex(0.0));
  c.erase(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(zeros));
  const int n = static_cast<int>(c.size()) - 1;
  if (n == 0) return roots;
  if (n == 1) {
    roots.emplace_back(-c[0] / c[1]);
    return roots;
  }

  const UnivariatePoly p(c);
  const UnivariatePoly dp = p.derivative();
  std::vector<double> cabs(c.size());
  for (std::size_t k = 0; k < c.size(); ++k) cabs[k] = std::abs(c[k]);
  const UnivariatePoly pabs(cabs);
  const double eps = std::numeric_limits<double>::epsilon();

  std::vector<Complex> z = aberth_initial_guesses(c);
  std::vector<bool> done(static_cast<std::size_t>(n), false);
  int remaining = n;
  for (int iter = 0; iter < max_iter && remaining > 0; ++iter) {
    for (int i = 0; i < n; ++i) {
      if (done[static_cast<std::size_t>(i)]) continue;
      const Complex zi = z[static_cast<std::size_t>(i)];
      const Complex pv = p(zi);
      // at the rounding floor: take this last correction, then freeze
      const bool floor = std::abs(pv) <= 4.0 * n * eps * pabs(std::abs(zi));
      const Complex ratio = pv / dp(zi);
      Complex sum = 0.0;
      for (int j = 0; j < n; ++j)
        if (j != i) sum += 1.0 / (zi - z[static_cast<std::size_t>(j)]);
      const Complex w = ratio / (1.0 - ratio * sum);
      if (std::isfinite(w.real()) && std::isfinite(w.imag())) z[static_cast<std::size_t>(i)] = zi - w;
      if (floor || std::abs(w) <= tol * std::abs(z[static_cast<std::size_t>(i)])) {
        done[static_cast<std::size_t>(i)] = true;
        --remaining;
      }
    }
  }
  roots.insert(roots.end(), z.begin(), z.end());
  if (remaining > 0) {
    std::vector<int> missing;
    for (int i = 0; i < n; ++i)
      if (!done[static_cast<std::size_t>(i)]) missing.push_back(static_cast<int>(zeros) + i);
    throw RootFindingError("aberth_roots: " + std::to_string(remaining) + " roots did not converge", roots, missing);
  }
  return roots;
}

std::vector<Complex> refine_determinant_roots(const PolyMatrix& m, std::vector<Complex> roots, double tol,
                                              int max_sweeps) {
  const int n = static_cast<int>(roots.size());
  if (n == 0 || m.size == 0) return roots;
  PolyMatrix dm(m.size);
  for (std::size_t k = 0; k < m.entries.size(); ++k) dm.entries[k] = m.entries[k].derivative();

  // det M(z) and d/dz log det M(z) = tr(M^-1 M')
  auto eval = [&](Complex z, Complex& det, Complex& logd) {
    const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(m.evaluate(z));
    det = lu.determinant();
    if (det == Complex(0.0)) return;
    logd = lu.solve(dm.evaluate(z)).trace();
  };

  const std::vector<Complex> start = roots;
  // conjugate-symmetric seeds stay symmetric under the iteration; a tiny rotation lets pairs split onto the real axis
  for (auto& z : roots) z *= std::polar(1.0, 1e-7);
  std::vector<bool> done(static_cast<std::size_t>(n), false);
  int remaining = n;
  for (int sweep = 0; sweep < max_sweeps && remaining > 0; ++sweep) {
    for (int i = 0; i < n; ++i) {
      if (done[static_cast<std::size_t>(i)]) continue;
      const Complex zi = roots[static_cast<std::size_t>(i)];
      Complex det, logd;
      eval(zi, det, logd);
      if (det == Complex(0.0)) {
        done[static_cast<std::size_t>(i)] = true;
        --remaining;
        continue;
      }
      Complex sum = 0.0;
      for (int j = 0; j < n; ++j)
        if (j != i) sum += 1.0 / (zi - roots[static_cast<std::size_t>(j)]);
      const Complex w = 1.0 / (logd - sum);
      if (!(std::isfinite(w.real()) && std::isfinite(w.imag()))) {
        done[static_cast<std::size_t>(i)] = true;
        --remaining;
        continue;
      }
      roots[static_cast<std::size_t>(i)] = zi - w;
      if (std::abs(w) <= tol * std::max(1.0, std::abs(zi))) {
        done[static_cast<std::size_t>(i)] = true;
        --remaining;
      }
    }
  }
  // keep whichever of the seed and the refined value has the smaller determinant
  for (int i = 0; i < n; ++i) {
    Complex d_new, d_old, unused;
    eval(roots[static_cast<std::size_t>(i)], d_new, unused);
    eval(start[static_cast<std::size_t>(i)], d_old, unused);
    if (!(std::abs(d_new) <= std::abs(d_old))) roots[static_cast<std::size_t>(i)] = start[static_cast<std::size_t>(i)];
  }
  return roots;
}

std::vector<double> real_positive_roots(const std::vector<Complex>& roots, double real_tol) {
  std::vector<double> xs;
  for (const auto& r : roots)
    if (std::abs(r.imag()) < real_tol * std::max(1.0, std::abs(r.real())) && r.real() > 0.0) xs.push_back(r.real());
  std::sort(xs.begin(), xs.end());
  std::vector<double> out;
  for (double x : xs) {
    if (!out.empty() && std::abs(x - out.back()) <= 1e-9 * std::max(std::abs(x), std::abs(out.back()))) continue;
    out.push_back(x);
  }
  return out;
}

double polish_real_root(const UnivariatePoly& poly, double x, int steps) {
  const UnivariatePoly dp = poly.derivative();
  double fx = std::abs(poly(x));
  for (int k = 0; k < steps && fx > 0.0; ++k) {
    const double d = dp(x);
    if (d == 0.0) break;
    const double next = x - poly(x) / d;
    const double fn = std::abs(poly(next));
    if (!(fn < fx)) break;
    x = next;
    fx = fn;
  }
  return x;
}

}  // namespace keplink
