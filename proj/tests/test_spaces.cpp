#include "cubeforms/spaces.hpp"
#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <set>

using namespace cubeforms;

namespace {

Polynomial x(int n, int i) { return Polynomial::variable(n, i); }
Polynomial one(int n) { return Polynomial::constant(n, 1); }

FormSpace span_of(int n, int k, std::vector<DiffForm> forms) {
  return FormSpace{n, k, 0, std::move(forms), "test"};
}

// Independent enumeration: walk a box larger than needed and count the
// monomials whose exponents >= 2 sum to at most r.
std::set<std::vector<int>> serendipity_oracle(int r, int n) {
  std::set<std::vector<int>> out;
  std::vector<int> e(n, 0);
  const int box = r + 3;
  while (true) {
    int s = 0;
    for (int a : e) s += a >= 2 ? a : 0;
    if (s <= r) out.insert(e);
    int i = 0;
    while (i < n && e[i] == box) e[i++] = 0;
    if (i == n) break;
    ++e[i];
  }
  return out;
}

}  // namespace

TEST_CASE("full polynomial spaces") {
  CHECK(build_P(1, 0, 2).dim() == 3);
  CHECK(build_P(2, 1, 2).dim() == 12);
  for (int n = 1; n <= 3; ++n) {
    const FormSpace top = build_P(0, n, n);
    REQUIRE(top.dim() == 1);
    CHECK(top.basis[0] == DiffForm::top(one(n)));
  }
  CHECK(build_P(-1, 1, 2).is_zero());
  CHECK_THROWS_AS(build_P(1, 3, 2), std::domain_error);
}

TEST_CASE("tensor-product trimmed spaces") {
  const FormSpace q = build_Qminus(1, 1, 2);
  const FormSpace expected =
      span_of(2, 1,
              {DiffForm::basis({{0}, 2}, one(2)), DiffForm::basis({{0}, 2}, x(2, 1)),
               DiffForm::basis({{1}, 2}, one(2)), DiffForm::basis({{1}, 2}, x(2, 0))});
  CHECK(q.dim() == 4);
  CHECK(contains(q, expected));
  CHECK(contains(expected, q));
  CHECK(q.label == "Qminus r=1 k=1 n=2");
  CHECK(build_Qminus(0, 1, 2).is_zero());
  CHECK(build_Qminus(1, 0, 3).dim() == 8);
  CHECK_THROWS_AS(build_Qminus(1, -1, 2), std::domain_error);
}

TEST_CASE("dimension formula matches the builders") {
  CHECK(dim_Qminus(1, 1, 2) == 4);
  CHECK(dim_Qminus(2, 2, 3) == 36);
  for (int r = 0; r <= 4; ++r)
    for (int n = 0; n <= 4; ++n) {
      long long expected = 1;
      for (int i = 0; i < n; ++i) expected *= r + 1;
      CHECK(dim_Qminus(r, 0, n) == expected);
    }
  for (int n = 1; n <= 3; ++n)
    for (int k = 0; k <= n; ++k)
      for (int r = 0; r <= 3; ++r) {
        const FormSpace s = build_Qminus(r, k, n);
        CHECK(s.dim() == dim_Qminus(r, k, n));
        CHECK(rank(s) == s.dim());
      }
}

TEST_CASE("tensor-product basis respects the per-variable degree caps") {
  for (int n = 1; n <= 3; ++n)
    for (int k = 0; k <= n; ++k)
      for (int r = 0; r <= 3; ++r)
        for (const auto& f : build_Qminus(r, k, n).basis)
          for (const auto& [sigma, p] : f.components())
            for (const auto& [m, c] : p.terms())
              for (int i = 0; i < n; ++i)
                CHECK(m.exponents[i] <= (sigma.contains(i) ? r - 1 : r));
}

TEST_CASE("superlinear degree") {
  CHECK(superlinear_degree(Monomial{{2, 1, 3}}) == 5);
  CHECK(superlinear_degree(Monomial{{1, 1, 1}}) == 0);
  CHECK(superlinear_degree(Monomial{{2}}) == 2);
}

TEST_CASE("serendipity spaces agree with brute-force enumeration") {
  const FormSpace s1 = build_serendipity(1, 2);
  CHECK(contains(s1, build_Qminus(1, 0, 2)));
  CHECK(contains(build_Qminus(1, 0, 2), s1));
  CHECK(build_serendipity(2, 2).dim() == 8);
  const DiffForm x1sq_x2sq = DiffForm::scalar(x(2, 0) * x(2, 0) * x(2, 1) * x(2, 1));
  CHECK_FALSE(contains(build_serendipity(3, 2), span_of(2, 0, {x1sq_x2sq})));
  for (int n = 1; n <= 3; ++n)
    for (int r = 1; r <= 6; ++r) {
      const auto oracle = serendipity_oracle(r, n);
      const FormSpace s = build_serendipity(r, n);
      std::set<std::vector<int>> got;
      for (const auto& f : s.basis) {
        const Polynomial p = f.component(IndexMap{{}, n});
        REQUIRE(p.terms().size() == 1);
        got.insert(p.terms().begin()->first.exponents);
      }
      CHECK(got == oracle);
      CHECK(static_cast<std::size_t>(s.dim()) == oracle.size());
    }
  CHECK_THROWS_AS(build_serendipity(0, 2), std::domain_error);
}

TEST_CASE("serendipity one-forms in two dimensions") {
  const FormSpace s = build_SrLambda1_2d(1);
  CHECK(s.dim() == 8);
  CHECK(rank(s) == 8);
  DiffForm d_x1sq_x2(2, 1);
  d_x1sq_x2.add({{0}, 2}, Rational(2) * x(2, 0) * x(2, 1));
  d_x1sq_x2.add({{1}, 2}, x(2, 0) * x(2, 0));
  CHECK(contains(s, span_of(2, 1, {d_x1sq_x2})));
  for (int r = 1; r <= 4; ++r) {
    const FormSpace sr = build_SrLambda1_2d(r);
    CHECK(contains(sr, build_P(r, 1, 2)));
    CHECK(sr.dim() == build_P(r, 1, 2).dim() + 2);
  }
  CHECK_THROWS_AS(build_SrLambda1_2d(0), std::domain_error);
}

TEST_CASE("subspace inclusion") {
  CHECK(contains(build_Qminus(1, 0, 2), build_P(0, 0, 2)));
  CHECK_FALSE(contains(build_Qminus(1, 1, 2), build_P(1, 1, 2)));
  CHECK(contains(build_P(2, 1, 2), build_Qminus(1, 1, 2)));
  CHECK_THROWS_AS(contains(build_P(1, 1, 2), build_P(1, 0, 2)), std::domain_error);
}

TEST_CASE("inclusion is reflexive and transitive on the catalog") {
  std::vector<FormSpace> cat;
  for (int r = 0; r <= 3; ++r) {
    cat.push_back(build_P(r, 1, 2));
    cat.push_back(build_Qminus(r, 1, 2));
    if (r >= 1) cat.push_back(build_SrLambda1_2d(r));
  }
  for (const auto& a : cat) CHECK(contains(a, a));
  for (const auto& a : cat)
    for (const auto& b : cat)
      for (const auto& c : cat)
        if (contains(a, b) && contains(b, c)) CHECK(contains(a, c));
  for (const auto& a : cat)
    for (const auto& b : cat)
      if (contains(a, b) && contains(b, a)) CHECK(rank(a) == rank(b));
}

TEST_CASE("rate predictor examples") {
  CHECK(predict_rates(build_Qminus(2, 0, 2)) == RatePrediction{3, 3});
  CHECK(predict_rates(build_Qminus(2, 2, 2)) == RatePrediction{2, 1});
  CHECK(predict_rates(build_P(4, 2, 2)) == RatePrediction{5, 2});
  CHECK(predict_rates(build_SrLambda1_2d(3)) == RatePrediction{4, 2});
  CHECK_THROWS_AS(predict_rates(build_Qminus(0, 1, 2)), std::domain_error);
}

TEST_CASE("rate predictions never favour multilinear meshes") {
  for (int n = 1; n <= 3; ++n)
    for (int k = 0; k <= n; ++k)
      for (int r = 1; r <= 4; ++r) {
        const auto p = predict_rates(build_Qminus(r, k, n));
        CHECK(p.s_multilinear <= p.s_affine);
        CHECK(p.s_multilinear >= 0);
      }
}

TEST_CASE("exterior derivative maps the trimmed family into itself") {
  for (int n = 1; n <= 3; ++n)
    for (int k = 0; k < n; ++k)
      for (int r = 0; r <= 3; ++r) {
        FormSpace images{n, k + 1, r, {}, ""};
        for (const auto& f : build_Qminus(r, k, n).basis)
          images.basis.push_back(exterior_derivative(f));
        CHECK(contains(build_Qminus(r, k + 1, n), images));
      }
}
