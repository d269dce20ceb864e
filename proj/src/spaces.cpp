#include "cubeforms/spaces.hpp"

#include "cubeforms/linalg.hpp"

#include <functional>
#include <stdexcept>

namespace cubeforms {

namespace {

void require_kn(int k, int n, const char* who) {
  if (n < 0 || k < 0 || k > n)
    throw std::domain_error(std::string(who) + ": need 0 <= k <= n");
}

// Exponent vectors with 0 <= e[i] <= caps[i], lexicographic order.
void for_each_in_box(const std::vector<int>& caps,
                     const std::function<void(const std::vector<int>&)>& fn) {
  const int n = static_cast<int>(caps.size());
  for (int c : caps)
    if (c < 0) return;
  std::vector<int> e(n, 0);
  while (true) {
    fn(e);
    int i = n - 1;
    while (i >= 0 && e[i] == caps[i]) {
      e[i] = 0;
      --i;
    }
    if (i < 0) return;
    ++e[i];
  }
}

std::string make_label(const std::string& kind, int r, int k, int n) {
  return kind + " r=" + std::to_string(r) + " k=" + std::to_string(k) +
         " n=" + std::to_string(n);
}

}  // namespace

long long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  long long b = 1;
  for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

FormSpace build_P(int r, int k, int n) {
  require_kn(k, n, "build_P");
  FormSpace space{n, k, r, {}, make_label("P", r, k, n)};
  if (r < 0) return space;
  for (const auto& sigma : enumerate_sigma(k, n)) {
    for_each_in_box(std::vector<int>(n, r), [&](const std::vector<int>& e) {
      int total = 0;
      for (int x : e) total += x;
      if (total <= r)
        space.basis.push_back(DiffForm::basis(sigma, Polynomial::monomial(Monomial{e})));
    });
  }
  return space;
}

FormSpace build_Qminus(int r, int k, int n) {
  require_kn(k, n, "build_Qminus");
  FormSpace space{n, k, r, {}, make_label("Qminus", r, k, n)};
  if (r < 0) return space;
  for (const auto& sigma : enumerate_sigma(k, n)) {
    std::vector<int> caps(n, r);
    for (int i : sigma.entries) caps[i] = r - 1;
    for_each_in_box(caps, [&](const std::vector<int>& e) {
      space.basis.push_back(DiffForm::basis(sigma, Polynomial::monomial(Monomial{e})));
    });
  }
  return space;
}

long long dim_Qminus(int r, int k, int n) {
  require_kn(k, n, "dim_Qminus");
  if (r < 0) return 0;
  long long d = binomial(n, k);
  for (int i = 0; i < n - k; ++i) d *= (r + 1);
  for (int i = 0; i < k; ++i) d *= r;
  return d;
}

int superlinear_degree(const Monomial& m) {
  int s = 0;
  for (int e : m.exponents)
    if (e >= 2) s += e;
  return s;
}

FormSpace build_serendipity(int r, int n) {
  if (r < 1) throw std::domain_error("build_serendipity: need r >= 1");
  if (n < 0) throw std::domain_error("build_serendipity: need n >= 0");
  FormSpace space{n, 0, r, {}, make_label("serendipity", r, 0, n)};
  const IndexMap empty{{}, n};
  for_each_in_box(std::vector<int>(n, r), [&](const std::vector<int>& e) {
    if (superlinear_degree(Monomial{e}) <= r)
      space.basis.push_back(DiffForm::basis(empty, Polynomial::monomial(Monomial{e})));
  });
  return space;
}

FormSpace build_SrLambda1_2d(int r) {
  if (r < 1) throw std::domain_error("build_SrLambda1_2d: need r >= 1");
  FormSpace space = build_P(r, 1, 2);
  space.label = make_label("SLambda1_2d", r, 1, 2);
  space.basis.push_back(
      exterior_derivative(DiffForm::scalar(Polynomial::monomial(Monomial{{r + 1, 1}}))));
  space.basis.push_back(
      exterior_derivative(DiffForm::scalar(Polynomial::monomial(Monomial{{1, r + 1}}))));
  return space;
}

int rank(const FormSpace& space) { return ExactSpan(space.basis).rank(); }

bool contains(const FormSpace& outer, const FormSpace& inner) {
  if (outer.n != inner.n || outer.k != inner.k)
    throw std::domain_error("contains: (n, k) mismatch");
  if (inner.is_zero()) return true;
  const ExactSpan span(outer.basis);
  for (const auto& f : inner.basis)
    if (!span.contains(f)) return false;
  return true;
}

RatePrediction predict_rates(const FormSpace& space) {
  if (space.is_zero()) throw std::domain_error("predict_rates: zero space");
  const ExactSpan span(space.basis);
  const int n = space.n;
  const int k = space.k;

  auto largest = [&](const std::function<FormSpace(int)>& family) {
    int s = 0;
    while (true) {
      const FormSpace candidate = family(s + 1);
      // a larger space cannot fit; inclusions are nested in s
      if (candidate.dim() > span.rank()) return s;
      for (const auto& f : candidate.basis)
        if (!span.contains(f)) return s;
      ++s;
    }
  };

  RatePrediction out;
  out.s_affine = largest([&](int s) { return build_P(s - 1, k, n); });
  out.s_multilinear = largest([&](int s) { return build_Qminus(s + k - 1, k, n); });
  return out;
}

}  // namespace cubeforms
