// Exact polynomial differential forms on coordinate boxes.
//
// Coefficients are arbitrary-precision rationals (GMP). Coordinates and
// index maps are stored 0-based; printed forms use the usual 1-based
// x1, dx1 notation.

#pragma once

#include <gmpxx.h>

#include <map>
#include <span>
#include <string>
#include <vector>

namespace cubeforms {

using Rational = mpq_class;

/// num/den in lowest terms; mpq_class(num, den) alone leaves the fraction as given.
inline Rational ratio(long num, long den) {
  Rational q(num, den);
  q.canonicalize();
  return q;
}

/// Increasing map sigma: {1..k} -> {1..n}, selecting the basis form dx^sigma.
struct IndexMap {
  std::vector<int> entries;  // strictly increasing, 0-based
  int n = 0;

  int degree() const { return static_cast<int>(entries.size()); }
  bool contains(int i) const;
  std::string to_string() const;  // "dx1^dx3", "1" for the empty map

  bool operator==(const IndexMap& o) const { return entries == o.entries; }
  bool operator<(const IndexMap& o) const { return entries < o.entries; }
};

/// All increasing maps of length k into {0..n-1} in lexicographic order.
/// This order is the canonical component order used throughout the library.
std::vector<IndexMap> enumerate_sigma(int k, int n);

struct Monomial {
  std::vector<int> exponents;

  int nvars() const { return static_cast<int>(exponents.size()); }
  int total_degree() const;
  int degree_in(int i) const { return exponents[i]; }
  std::string to_string() const;

  auto operator<=>(const Monomial&) const = default;
};

/// Sparse polynomial with exact rational coefficients and no stored zeros.
class Polynomial {
 public:
  using Terms = std::map<Monomial, Rational>;

  explicit Polynomial(int nvars = 0) : nvars_(nvars) {}

  static Polynomial constant(int nvars, const Rational& c);
  static Polynomial variable(int nvars, int i);
  static Polynomial monomial(const Monomial& m, const Rational& c = 1);

  int nvars() const { return nvars_; }
  bool is_zero() const { return terms_.empty(); }
  const Terms& terms() const { return terms_; }

  void add_term(const Monomial& m, const Rational& c);

  int total_degree() const;  // -1 for the zero polynomial
  int degree_in(int i) const;

  Polynomial derivative(int i) const;
  /// Substitute fixed[i] for every variable i with fixed[i] >= 0 and renumber
  /// the remaining variables in the order given by `free_vars`.
  Polynomial restrict(std::span<const int> free_vars,
                      std::span<const int> fixed) const;
  /// p(subs[0], ..., subs[m-1]); every substitute must share one nvars.
  Polynomial compose(std::span<const Polynomial> subs) const;

  Rational evaluate(std::span<const Rational> x) const;
  double evaluate(std::span<const double> x) const;
  /// Exact integral over [0,1]^nvars.
  Rational integrate_unit_cube() const;

  std::string to_string() const;

  Polynomial& operator+=(const Polynomial& o);
  Polynomial& operator-=(const Polynomial& o);
  Polynomial& operator*=(const Rational& c);
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(Polynomial a, const Rational& c) { return a *= c; }
  friend Polynomial operator*(const Rational& c, Polynomial a) { return a *= c; }
  Polynomial operator-() const;

  bool operator==(const Polynomial& o) const {
    return nvars_ == o.nvars_ && terms_ == o.terms_;
  }

 private:
  int nvars_;
  Terms terms_;
};

/// f = sum_sigma f_sigma dx^sigma, canonical (no zero components).
class DiffForm {
 public:
  using Components = std::map<IndexMap, Polynomial>;

  /// Zero k-form on R^n. k > n is allowed and only ever holds zero.
  DiffForm(int n, int k);

  static DiffForm scalar(const Polynomial& p);
  static DiffForm basis(const IndexMap& sigma, const Polynomial& p);
  /// The volume form dx1^...^dxn times p.
  static DiffForm top(const Polynomial& p);

  int n() const { return n_; }
  int k() const { return k_; }
  bool is_zero() const { return components_.empty(); }
  const Components& components() const { return components_; }
  /// Component for sigma, or the zero polynomial.
  Polynomial component(const IndexMap& sigma) const;

  void add(const IndexMap& sigma, const Polynomial& p);

  /// Largest total degree over all component polynomials (-1 if zero).
  int total_degree() const;

  std::string to_string() const;

  DiffForm& operator+=(const DiffForm& o);
  DiffForm& operator-=(const DiffForm& o);
  DiffForm& operator*=(const Rational& c);
  friend DiffForm operator+(DiffForm a, const DiffForm& b) { return a += b; }
  friend DiffForm operator-(DiffForm a, const DiffForm& b) { return a -= b; }
  friend DiffForm operator*(const Rational& c, DiffForm a) { return a *= c; }
  /// Multiply every component by a 0-form coefficient.
  friend DiffForm operator*(const Polynomial& p, const DiffForm& f);

  bool operator==(const DiffForm& o) const {
    return n_ == o.n_ && k_ == o.k_ && components_ == o.components_;
  }

 private:
  int n_;
  int k_;
  Components components_;
};

/// A face of [0,1]^n: some coordinates fixed to 0 or 1, the rest free.
struct Face {
  int n = 0;
  std::vector<int> free;          // increasing, 0-based
  std::map<int, int> fixed;       // coordinate -> value in {0,1}

  int dim() const { return static_cast<int>(free.size()); }
  /// Per-coordinate view: -1 for free coordinates, else the fixed value.
  std::vector<int> pattern() const;
  std::string to_string() const;

  bool operator==(const Face&) const = default;
};

DiffForm wedge(const DiffForm& f, const DiffForm& g);
DiffForm exterior_derivative(const DiffForm& f);
/// Pullback under the inclusion of `face`; the result lives on the face's
/// free coordinates (renumbered 0..d-1).
DiffForm trace(const DiffForm& f, const Face& face);
/// Exact L2 inner product over the unit cube of dimension f.n().
Rational l2_inner_reference(const DiffForm& f, const DiffForm& g);
/// Exact integral of a top-degree form over [0,1]^n (n = 0: point value).
Rational integrate_unit_cube(const DiffForm& top_form);
std::map<IndexMap, double> evaluate(const DiffForm& f,
                                    std::span<const double> point);

/// Sign of the permutation sorting the concatenation of two disjoint
/// increasing sequences; 0 if they intersect.
int merge_sign(std::span<const int> a, std::span<const int> b,
               std::vector<int>& merged);

}  // namespace cubeforms
