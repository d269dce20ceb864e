#include "cubeforms/dofs.hpp"

#include "cubeforms/spaces.hpp"

#include <stdexcept>

namespace cubeforms {

std::vector<Face> enumerate_faces(int n, int d) {
  if (n < 0 || d < 0 || d > n) throw std::domain_error("enumerate_faces: need 0 <= d <= n");
  std::vector<Face> faces;
  const int nfixed = n - d;
  for (const auto& fixed_set : enumerate_sigma(nfixed, n)) {
    std::vector<int> free;
    for (int i = 0; i < n; ++i)
      if (!fixed_set.contains(i)) free.push_back(i);
    for (unsigned bits = 0; bits < (1u << nfixed); ++bits) {
      Face f;
      f.n = n;
      f.free = free;
      for (int j = 0; j < nfixed; ++j)
        f.fixed[fixed_set.entries[j]] = (bits >> (nfixed - 1 - j)) & 1u;
      faces.push_back(std::move(f));
    }
  }
  return faces;
}

long long dof_count_formula(int r, int k, int n) {
  long long total = 0;
  for (int d = k; d <= n; ++d) {
    long long term = (1LL << (n - d)) * binomial(n, d) * binomial(d, k);
    for (int i = 0; i < k; ++i) term *= r;
    for (int i = 0; i < d - k; ++i) term *= (r - 1);
    total += term;
  }
  return total;
}

DofSet build_dofs(int r, int k, int n) {
  if (r < 1) throw std::domain_error("build_dofs: need r >= 1");
  if (k < 0 || k > n) throw std::domain_error("build_dofs: need 0 <= k <= n");
  DofSet set{r, k, n, {}};
  for (int d = k; d <= n; ++d) {
    const FormSpace weights = build_Qminus(r - 1, d - k, d);
    for (const auto& face : enumerate_faces(n, d))
      for (const auto& q : weights.basis) set.functionals.push_back({face, q});
  }
  return set;
}

Rational apply_dof(const DofFunctional& dof, const DiffForm& v) {
  const int d = dof.face.dim();
  if (v.n() != dof.face.n || v.k() > d || v.k() + dof.weight.k() != d)
    throw std::domain_error("apply_dof: degree mismatch");
  return integrate_unit_cube(wedge(trace(v, dof.face), dof.weight));
}

UnisolvenceResult unisolvence_matrix(int r, int k, int n) {
  const DofSet dofs = build_dofs(r, k, n);
  const FormSpace space = build_Qminus(r, k, n);
  UnisolvenceResult out;
  out.matrix = RationalMatrix(dofs.size(), space.dim());
  for (int i = 0; i < dofs.size(); ++i)
    for (int j = 0; j < space.dim(); ++j)
      out.matrix(i, j) = apply_dof(dofs.functionals[i], space.basis[j]);
  out.rank = rank(out.matrix);
  out.invertible = dofs.size() == space.dim() && out.rank == space.dim();
  return out;
}

std::vector<DiffForm> dual_basis(int r, int k, int n) {
  const UnisolvenceResult uni = unisolvence_matrix(r, k, n);
  const auto inv = uni.invertible ? inverse(uni.matrix) : std::nullopt;
  if (!inv)
    throw std::logic_error("dual_basis: degrees of freedom are not unisolvent for r=" +
                           std::to_string(r) + " k=" + std::to_string(k) +
                           " n=" + std::to_string(n));
  const FormSpace space = build_Qminus(r, k, n);
  // M C = I, so column j of C holds the coefficients of phi_j
  std::vector<DiffForm> phi;
  phi.reserve(space.dim());
  for (int j = 0; j < space.dim(); ++j) {
    DiffForm f(n, k);
    for (int l = 0; l < space.dim(); ++l)
      if (sgn((*inv)(l, j)) != 0) f += (*inv)(l, j) * space.basis[l];
    phi.push_back(std::move(f));
  }
  return phi;
}

}  // namespace cubeforms
