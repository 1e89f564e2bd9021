#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "keplink/errors.hpp"

namespace keplink {

using Complex = std::complex<double>;

// Dense real polynomial, ascending coefficients. Trailing coefficients below
// 1e-13 * max|coeff| are trimmed on construction; the zero polynomial has
// degree -1 and no coefficients.
class UnivariatePoly {
 public:
  UnivariatePoly() = default;
  explicit UnivariatePoly(std::vector<double> coeffs);
  static UnivariatePoly constant(double c) { return UnivariatePoly(std::vector<double>{c}); }
  static UnivariatePoly monomial(int power, double c = 1.0);
  // Monic polynomial with the given real roots.
  static UnivariatePoly from_roots(const std::vector<double>& roots);

  [[nodiscard]] int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  [[nodiscard]] bool is_zero() const { return coeffs_.empty(); }
  [[nodiscard]] const std::vector<double>& coefficients() const { return coeffs_; }
  [[nodiscard]] double coefficient(int power) const;
  [[nodiscard]] double leading() const { return coeffs_.empty() ? 0.0 : coeffs_.back(); }
  [[nodiscard]] double max_abs_coefficient() const;

  [[nodiscard]] double operator()(double x) const;
  [[nodiscard]] Complex operator()(Complex x) const;
  [[nodiscard]] UnivariatePoly derivative() const;

  UnivariatePoly& operator+=(const UnivariatePoly& o);
  UnivariatePoly& operator-=(const UnivariatePoly& o);
  UnivariatePoly& operator*=(double s);

 private:
  std::vector<double> coeffs_;
};

[[nodiscard]] UnivariatePoly operator+(UnivariatePoly a, const UnivariatePoly& b);
[[nodiscard]] UnivariatePoly operator-(UnivariatePoly a, const UnivariatePoly& b);
[[nodiscard]] UnivariatePoly operator*(const UnivariatePoly& a, const UnivariatePoly& b);
[[nodiscard]] UnivariatePoly operator*(double s, UnivariatePoly a);

// Dense polynomial in two variables (x, y) = (rho1, rho2); coeff(i, j) multiplies x^i y^j.
class BivariatePoly {
 public:
  BivariatePoly() : c_(Eigen::MatrixXd::Zero(1, 1)) {}
  explicit BivariatePoly(Eigen::MatrixXd coeffs);
  static BivariatePoly constant(double c);
  static BivariatePoly x();
  static BivariatePoly y();
  // Embed a univariate polynomial in the first (x) or second (y) variable.
  static BivariatePoly in_x(const UnivariatePoly& p);
  static BivariatePoly in_y(const UnivariatePoly& p);

  [[nodiscard]] const Eigen::MatrixXd& coefficients() const { return c_; }
  [[nodiscard]] double coeff(int i, int j) const;
  [[nodiscard]] double max_abs_coefficient() const { return c_.cwiseAbs().maxCoeff(); }

  // Degrees ignore coefficients below rel_tol * max|coeff|.
  [[nodiscard]] int degree_x(double rel_tol = 0.0) const;
  [[nodiscard]] int degree_y(double rel_tol = 0.0) const;
  [[nodiscard]] int total_degree(double rel_tol = 0.0) const;

  [[nodiscard]] double operator()(double x, double y) const;
  [[nodiscard]] BivariatePoly derivative_x() const;
  [[nodiscard]] BivariatePoly derivative_y() const;

  BivariatePoly& operator+=(const BivariatePoly& o);
  BivariatePoly& operator-=(const BivariatePoly& o);
  BivariatePoly& operator*=(double s);

 private:
  Eigen::MatrixXd c_;
};

[[nodiscard]] BivariatePoly operator+(BivariatePoly a, const BivariatePoly& b);
[[nodiscard]] BivariatePoly operator-(BivariatePoly a, const BivariatePoly& b);
[[nodiscard]] BivariatePoly operator*(const BivariatePoly& a, const BivariatePoly& b);
[[nodiscard]] BivariatePoly operator*(double s, BivariatePoly a);

// p(x, y) = sum_j a_j(x) y^j; returns a_0 .. a_degY.
[[nodiscard]] std::vector<UnivariatePoly> coeffs_in_second_var(const BivariatePoly& p);

// Square matrix whose entries are polynomials in one variable.
struct PolyMatrix {
  int size = 0;
  std::vector<UnivariatePoly> entries;  // row-major

  explicit PolyMatrix(int n = 0) : size(n), entries(static_cast<std::size_t>(n * n)) {}
  UnivariatePoly& operator()(int r, int c) { return entries[static_cast<std::size_t>(r * size + c)]; }
  const UnivariatePoly& operator()(int r, int c) const { return entries[static_cast<std::size_t>(r * size + c)]; }
  [[nodiscard]] Eigen::MatrixXcd evaluate(Complex x) const;
  // Upper bound on deg det: min of the row-wise and column-wise max-degree sums.
  [[nodiscard]] int determinant_degree_bound() const;
};

// Sylvester matrix of p = sum a_i y^i (deg m) and q = sum b_j y^j (deg n), (m+n) x (m+n).
// Column k < n holds a_m..a_0 starting at row k; column n+k holds b_n..b_0 starting at row k.
[[nodiscard]] PolyMatrix sylvester_matrix(const std::vector<UnivariatePoly>& a, const std::vector<UnivariatePoly>& b);

struct InterpolationResult {
  std::vector<double> coefficients;  // n_points entries, already divided by radius^j
  double imag_ratio = 0.0;           // max |Im| / max |coeff| before zeroing
  double radius = 1.0;
  bool identically_zero = false;
};

// Evaluates det(entries) at radius * w^k, w = exp(2 pi i / n_points), with a
// complex partial-pivot LU per node, then recovers the coefficients by inverse FFT.
// Throws Numerical when the imaginary residue exceeds 1e-9 * max|coeff|.
[[nodiscard]] InterpolationResult fft_evaluation_interpolation(const PolyMatrix& entries, int n_points,
                                                               double radius = 1.0);

struct ResultantOptions {
  int fft_points = 32;
  double radius = 1.0;
  bool auto_radius = true;
};

struct ResultantResult {
  UnivariatePoly resultant;
  std::vector<double> raw_coefficients;  // every interpolated coefficient, including the tail
  int degree_bound = 0;
  int fft_points = 0;
  double radius = 1.0;
  double imag_ratio = 0.0;
  double tail_ratio = 0.0;  // max |c_j| radius^j beyond degree_bound relative to the max within it
  PolyMatrix matrix;        // the Sylvester matrix whose determinant was interpolated
};

// Res_y(p, q)(x) as det of the Sylvester matrix. Throws Degenerate when neither
// polynomial depends on y or either is zero.
[[nodiscard]] ResultantResult sylvester_resultant(const BivariatePoly& p, const BivariatePoly& q,
                                                  const ResultantOptions& opts = {});

// In-place radix-2 FFT; `inverse` applies the conjugate transform scaled by 1/n.
void fft(std::vector<Complex>& data, bool inverse);

class RootFindingError : public Error {
 public:
  RootFindingError(const std::string& what, std::vector<Complex> roots, std::vector<int> unconverged)
      : Error(ErrorKind::Numerical, what), roots_(std::move(roots)), unconverged_(std::move(unconverged)) {}
  [[nodiscard]] const std::vector<Complex>& roots() const { return roots_; }
  [[nodiscard]] const std::vector<int>& unconverged() const { return unconverged_; }

 private:
  std::vector<Complex> roots_;
  std::vector<int> unconverged_;
};

// All complex roots by Ehrlich-Aberth iteration. Throws RootFindingError with
// the partial result when some root has not converged after max_iter sweeps.
[[nodiscard]] std::vector<Complex> aberth_roots(const UnivariatePoly& poly, double tol = 1e-14, int max_iter = 200);

// Aberth sweeps on det M(x) evaluated directly rather than on its interpolant,
// seeded with approximate roots. Each root keeps whichever of seed and refined
// value gives the smaller |det|.
[[nodiscard]] std::vector<Complex> refine_determinant_roots(const PolyMatrix& m, std::vector<Complex> roots,
                                                            double tol = 1e-14, int max_sweeps = 50);

// Positive real roots: |Im| < real_tol * max(1, |Re|) and Re > 0, merged when
// within 1e-9 relative, ascending.
[[nodiscard]] std::vector<double> real_positive_roots(const std::vector<Complex>& roots, double real_tol = 1e-6);

// Newton refinement of a real root; a step is kept only if it lowers |p|.
[[nodiscard]] double polish_real_root(const UnivariatePoly& poly, double x, int steps = 3);

}  // namespace keplink
