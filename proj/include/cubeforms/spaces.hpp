// Reference shape-function spaces on the unit n-cube and the rate predictor.

#pragma once

#include "cubeforms/forms.hpp"

#include <string>
#include <vector>

namespace cubeforms {

struct FormSpace {
  int n = 0;
  int k = 0;
  int r = 0;  // nominal degree parameter, used for labels and quadrature
  std::vector<DiffForm> basis;
  std::string label;

  int dim() const { return static_cast<int>(basis.size()); }
  bool is_zero() const { return basis.empty(); }
};

/// Largest s with P_{s-1} inclusion (parallelotope meshes) and with
/// Q^-_{s+k-1} inclusion (multilinear meshes). 0 means no convergence.
struct RatePrediction {
  int s_affine = 0;
  int s_multilinear = 0;
  bool operator==(const RatePrediction&) const = default;
};

long long binomial(int n, int k);

/// Full polynomial forms: coefficients of total degree <= r. r < 0 gives the
/// zero space.
FormSpace build_P(int r, int k, int n);

/// Tensor-product forms: coefficient of dx^sigma has degree <= r in every
/// variable and <= r-1 in the variables of sigma. r < 0 gives the zero space.
FormSpace build_Qminus(int r, int k, int n);
long long dim_Qminus(int r, int k, int n);

/// Total degree counting only variables with exponent >= 2.
int superlinear_degree(const Monomial& m);
/// Serendipity 0-forms: monomials of superlinear degree <= r.
FormSpace build_serendipity(int r, int n);
/// P_r 1-forms on the square extended by d(x1^{r+1} x2) and d(x1 x2^{r+1}).
FormSpace build_SrLambda1_2d(int r);

/// Exact rank of the basis (equals dim() iff the basis is independent).
int rank(const FormSpace& space);
/// True iff span(inner.basis) is a subspace of span(outer.basis).
bool contains(const FormSpace& outer, const FormSpace& inner);

RatePrediction predict_rates(const FormSpace& space);

}  // namespace cubeforms
