// Test-only generators and independent oracles.
#pragma once

#include "cubeforms/forms.hpp"
#include "cubeforms/mapping.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace cftest {

using cubeforms::DiffForm;
using cubeforms::IndexMap;
using cubeforms::Monomial;
using cubeforms::Polynomial;
using cubeforms::Rational;
using cubeforms::ratio;

// Small rationals p/q with |p| <= 5, 1 <= q <= 4.
inline Rational random_rational(std::mt19937& gen) {
  std::uniform_int_distribution<int> num(-5, 5), den(1, 4);
  return ratio(num(gen), den(gen));
}

inline Polynomial random_polynomial(std::mt19937& gen, int nvars, int max_exp, int terms) {
  std::uniform_int_distribution<int> e(0, max_exp);
  Polynomial p(nvars);
  for (int t = 0; t < terms; ++t) {
    std::vector<int> exps(nvars);
    for (auto& x : exps) x = e(gen);
    p.add_term(Monomial{exps}, random_rational(gen));
  }
  return p;
}

inline DiffForm random_form(std::mt19937& gen, int n, int k, int max_exp = 2, int terms = 3) {
  DiffForm f(n, k);
  for (const auto& sigma : cubeforms::enumerate_sigma(k, n))
    f.add(sigma, random_polynomial(gen, n, max_exp, terms));
  return f;
}

// Exact integral of a polynomial over the box [0,h]^n, monomial by monomial.
inline Rational integrate_box(const Polynomial& p, const Rational& h) {
  Rational total = 0;
  for (const auto& [m, c] : p.terms()) {
    Rational term = c;
    for (int a : m.exponents) {
      Rational power = 1;
      for (int i = 0; i < a + 1; ++i) power *= h;
      term *= power / (a + 1);
    }
    total += term;
  }
  return total;
}

// Distance in L2(0,1) from x^2 to linear functions: the x^2 coefficient of
// the shifted Legendre P2(x) = 6x^2 - 6x + 1 is 6, so the residual is P2/6
// and its norm is (1/6) / sqrt(5).
inline double legendre_distance_x2_to_p1() { return 1.0 / (6.0 * std::sqrt(5.0)); }

// Composite Simpson rule on [0,1]^2 with m (even) panels per axis.
template <class F>
double simpson_2d(F&& f, int m) {
  const double h = 1.0 / m;
  auto w = [&](int i) { return (i == 0 || i == m) ? 1.0 : (i % 2 ? 4.0 : 2.0); };
  double s = 0.0;
  for (int i = 0; i <= m; ++i)
    for (int j = 0; j <= m; ++j) s += w(i) * w(j) * f(i * h, j * h);
  return s * h * h / 9.0;
}

}  // namespace cftest
