// Degrees of freedom of the tensor-product spaces Qminus_r Lambda^k(I^n):
//
//   v -> int_f tr_f v ^ q,   q in Qminus_{r-1} Lambda^{d-k}(f),
//
// one group per face f of dimension d >= k. On vertices (d = 0) the
// functional is point evaluation. Weight bases use the monomial ordering of
// build_Qminus on the face's free coordinates; faces follow enumerate_faces.

#pragma once

#include "cubeforms/forms.hpp"
#include "cubeforms/linalg.hpp"

#include <vector>

namespace cubeforms {

struct DofFunctional {
  Face face;
  DiffForm weight;  // degree face.dim() - k, in the face's free coordinates
};

struct DofSet {
  int r = 0;
  int k = 0;
  int n = 0;
  std::vector<DofFunctional> functionals;

  int size() const { return static_cast<int>(functionals.size()); }
};

struct UnisolvenceResult {
  RationalMatrix matrix;  // matrix(i, j) = dof_i(basis_j)
  int rank = 0;
  bool invertible = false;
};

/// Faces of dimension d ordered by fixed-coordinate set (lexicographic),
/// then by fixed values (binary counting, first fixed coordinate most
/// significant).
std::vector<Face> enumerate_faces(int n, int d);

/// Number of DOFs predicted by the face-sum counting argument.
long long dof_count_formula(int r, int k, int n);

DofSet build_dofs(int r, int k, int n);
Rational apply_dof(const DofFunctional& dof, const DiffForm& v);
UnisolvenceResult unisolvence_matrix(int r, int k, int n);
/// phi_j with apply_dof(xi_i, phi_j) = delta_ij, expanded in Qminus.
std::vector<DiffForm> dual_basis(int r, int k, int n);

}  // namespace cubeforms
