// Mesh families on the unit square/cube, tensor Gauss quadrature, broken
// (elementwise) L2 best approximation from mapped shape spaces, and
// h-refinement convergence studies.

#pragma once

#include "cubeforms/mapping.hpp"
#include "cubeforms/spaces.hpp"

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cubeforms {

enum class MeshFamily { uniform, parallelotope, trapezoidal, trilinear3d };

std::string to_string(MeshFamily family);
MeshFamily parse_mesh_family(const std::string& name);

/// Family parameters, independent of the refinement level N.
struct MeshSpec {
  MeshFamily family = MeshFamily::uniform;
  int n = 2;
  double distortion = 0.0;     // trapezoidal / trilinear3d
  std::vector<double> shear;   // parallelotope, row-major n x n

  bool operator==(const MeshSpec&) const = default;
};

struct Mesh {
  int n = 0;
  int subdivisions = 0;
  MeshSpec spec;
  std::vector<MultilinearMap> elements;
};

Mesh mesh_uniform(int n, int subdivisions);
Mesh mesh_parallelotope(int n, int subdivisions, std::span<const double> shear);
Mesh mesh_trapezoidal(int subdivisions, double distortion);
Mesh mesh_trilinear_3d(int subdivisions, double distortion);
Mesh build_mesh(const MeshSpec& spec, int subdivisions);

/// Exact sum over elements of the integral of det DF.
Rational mesh_volume(const Mesh& mesh);

struct QuadratureRule {
  int n = 0;
  int order = 0;                // points per axis
  std::vector<double> points;   // flat, n per point
  std::vector<double> weights;

  int size() const { return static_cast<int>(weights.size()); }
  std::span<const double> point(int i) const {
    return std::span<const double>(points).subspan(static_cast<std::size_t>(i) * n, n);
  }
};

/// Tensor product of the q-point Gauss-Legendre rule on [0,1]; 1 <= q <= 20.
QuadratureRule gauss_rule(int n, int q);

/// A smooth target k-form given by one callable per component, in
/// enumerate_sigma order.
struct TargetForm {
  int n = 0;
  int k = 0;
  std::string id;
  std::vector<std::function<double(std::span<const double>)>> components;

  void evaluate(std::span<const double> x, std::span<double> out) const;
};

/// Component m (0-based, M = binomial(n,k) components):
/// sin(pi * sum_i (i+1) x_i + m/(M+1)).
TargetForm trig_target(int n, int k);
TargetForm polynomial_target(const DiffForm& form);

/// Reference basis values at quadrature points:
/// value(q, b, t) = component t of basis b at point q.
class ReferenceTabulation {
 public:
  ReferenceTabulation(const FormSpace& space, QuadratureRule rule);

  const FormSpace& space() const { return space_; }
  const QuadratureRule& rule() const { return rule_; }
  int components() const { return components_; }
  double value(int q, int b, int t) const {
    return values_[(static_cast<std::size_t>(q) * space_.dim() + b) * components_ + t];
  }

 private:
  FormSpace space_;
  QuadratureRule rule_;
  int components_;
  std::vector<double> values_;
};

/// Weighted evaluation system on one element: rows are (quadrature point,
/// component) pairs scaled by sqrt(w det DF). The Gram matrix is A^T A and
/// the load vector A^T b.
struct LocalSystem {
  Eigen::MatrixXd matrix;
  Eigen::VectorXd rhs;
};

LocalSystem assemble_local_system(const MultilinearMap& element,
                                  const ReferenceTabulation& tab, const TargetForm& target);

/// inf over v in (F^{-1})^* Vhat of ||u - v||_{L2(K)}, by QR least squares.
double element_l2_error(const MultilinearMap& element, const ReferenceTabulation& tab,
                        const TargetForm& target);
double element_l2_error(const MultilinearMap& element, const FormSpace& space,
                        const TargetForm& target, const QuadratureRule& rule);

struct ConvergenceRow {
  int subdivisions = 0;
  double h = 0.0;
  double error = 0.0;
  std::optional<double> rate_pair;  // against the previous row
  std::optional<double> rate_lsq;   // slope over the last <= 3 rows
};

struct ConvergenceReport {
  MeshSpec mesh;
  int n = 0;
  int k = 0;
  int r = 0;
  std::string space_label;
  int quadrature_order = 0;
  std::vector<ConvergenceRow> rows;
  RatePrediction prediction;

  /// Prediction relevant to the mesh family (affine or multilinear).
  int predicted_rate() const;
  double last_rate() const;
};

/// Default per-axis quadrature order: nominal degree + 6.
int default_quadrature_order(const FormSpace& space);

ConvergenceReport convergence_study(const MeshSpec& mesh, const FormSpace& space,
                                    const TargetForm& target,
                                    const std::vector<int>& subdivisions,
                                    int quadrature_order = 0, int threads = 1);

}  // namespace cubeforms
