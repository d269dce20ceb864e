// Multilinear maps of the unit cube and transport of forms along them.

#pragma once

#include "cubeforms/forms.hpp"

#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cubeforms {

/// Raised for floating-point failures (singular Jacobians, rank-deficient
/// local systems). `element()` is -1 when no mesh element is involved.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what, int element = -1)
      : std::runtime_error(what), element_(element) {}
  int element() const { return element_; }

 private:
  int element_;
};

/// F(x) = sum_alpha c_alpha prod_i x_i^alpha_i over corner multi-indices
/// alpha in {0,1}^n. Corner alpha is addressed by the bitmask with bit i set
/// iff alpha_i = 1.
class MultilinearMap {
 public:
  MultilinearMap() = default;

  static MultilinearMap identity(int n);
  static MultilinearMap dilation(int n, const Rational& h);
  /// x -> A x + b, A row-major n x n.
  static MultilinearMap affine(int n, std::span<const Rational> a,
                               std::span<const Rational> b);
  /// Multilinear interpolation of 2^n corner positions (index = bitmask).
  static MultilinearMap from_vertices(int n, const std::vector<std::vector<Rational>>& vertices);
  /// Doubles are converted exactly to rationals.
  static MultilinearMap from_vertices(int n, const std::vector<std::vector<double>>& vertices);

  int n() const { return n_; }
  bool is_affine() const;
  /// Coefficient vector c_alpha.
  const std::vector<Rational>& coefficient(unsigned alpha) const { return coeffs_[alpha]; }
  /// F^i as an exact polynomial in n variables.
  const Polynomial& component(int i) const { return components_[i]; }
  const std::vector<Polynomial>& components() const { return components_; }

  /// G o F for an affine outer map G.
  MultilinearMap compose_affine(std::span<const Rational> a,
                                std::span<const Rational> b) const;

  void eval(std::span<const double> xhat, std::span<double> x) const;
  /// Row-major DF(xhat): J[i*n + j] = dF^i / dxhat^j.
  void jacobian_at(std::span<const double> xhat, std::span<double> jac) const;

 private:
  void finalize();

  int n_ = 0;
  std::vector<std::vector<Rational>> coeffs_;  // [alpha][component]
  std::vector<double> coeffs_f_;               // [alpha * n + component]
  std::vector<Polynomial> components_;
};

struct JacobianPoly {
  int n = 0;
  std::vector<Polynomial> entries;  // row-major, entries[i*n + j] = dF^i/dxhat^j
  Polynomial det;

  const Polynomial& operator()(int i, int j) const { return entries[i * n + j]; }
};

MultilinearMap map_from_vertices(int n, const std::vector<std::vector<Rational>>& vertices);
JacobianPoly jacobian(const MultilinearMap& f);
/// Positive Jacobian determinant at the corners and on a 5^n grid (exact).
bool check_diffeo(const MultilinearMap& f);
/// Exact F^* v for a polynomial form v on the image coordinates.
DiffForm pullback_polynomial(const MultilinearMap& f, const DiffForm& v);
/// Components of (F^{-1})^* w at F(xhat), computed pointwise from DF(xhat).
std::map<IndexMap, double> pushforward_eval(const MultilinearMap& f, const DiffForm& w,
                                            std::span<const double> xhat);

/// Exact determinant of a square matrix of polynomials (Laplace expansion).
Polynomial polynomial_det(std::span<const Polynomial> m, int size);

/// Floating-point helpers shared with the numerical pipeline.
double small_det(std::span<const double> m, int size);
/// Inverse of a small row-major matrix; throws NumericalError if det <= tiny.
std::vector<double> small_inverse(std::span<const double> m, int size, double* det_out);
/// Matrix of k x k minors: out[t * M + s] = det(m[tau_t rows, sigma_s cols]),
/// M = binomial(n, k), index maps in enumerate_sigma order.
std::vector<double> compound_matrix(std::span<const double> m, int n, int k);

}  // namespace cubeforms
